#include "dce/iteration.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace dce {

void CavityConfig::validate() const {
    if (K < 1) throw std::invalid_argument("CavityConfig: K must be >= 1");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("CavityConfig: omega must be positive");
    if (!(R1 > 0.0 && R1 <= 1.0)) throw std::invalid_argument("CavityConfig: R1 must lie in (0, 1]");
    if (!(R2 > 0.0 && R2 <= 1.0)) throw std::invalid_argument("CavityConfig: R2 must lie in (0, 1]");
    if (!std::isfinite(alpha)) throw std::invalid_argument("CavityConfig: alpha must be finite");
}

double CavityConfig::L() const { return K * std::numbers::pi / omega; }

double CavityConfig::r() const { return std::sqrt(R1 * R2); }

double CavityConfig::rho() const { return -0.25 * (std::log(R1) + std::log(R2)); }

double CavityConfig::alpha_eff() const {
    const double a = std::abs(alpha);
    if (a == 0.0) return 0.0;
    const double p = rho();
    return p > 0.0 ? 2.0 * a / p : std::numeric_limits<double>::infinity();
}

double CavityConfig::beta_eff() const { return std::tanh(alpha_eff()); }

CavityConfig CavityConfig::mirrored() const {
    CavityConfig m = *this;
    std::swap(m.R1, m.R2);
    m.alpha = parity() * alpha;
    return m;
}

CavityConfig make_cavity(const CavityParams& p) {
    CavityConfig c;
    c.K = p.K;
    c.omega = p.omega;
    const int optics = (p.r ? 1 : 0) + (p.rho ? 1 : 0) + ((p.R1 || p.R2) ? 1 : 0);
    if (optics != 1) throw std::invalid_argument("exactly one of r, rho or (R1, R2) is required");
    if (p.r) {
        c.R1 = c.R2 = *p.r;
    } else if (p.rho) {
        if (!(*p.rho >= 0.0)) throw std::invalid_argument("rho must be >= 0");
        c.R1 = c.R2 = std::exp(-2.0 * *p.rho);
    } else {
        if (!p.R1 || !p.R2) throw std::invalid_argument("R1 and R2 must be given together");
        c.R1 = *p.R1;
        c.R2 = *p.R2;
    }
    if ((p.alpha ? 1 : 0) + (p.alpha_eff ? 1 : 0) != 1)
        throw std::invalid_argument("exactly one of alpha or alpha_eff is required");
    if (p.alpha) {
        c.alpha = *p.alpha;
    } else {
        if (!(*p.alpha_eff >= 0.0)) throw std::invalid_argument("alpha_eff must be >= 0");
        c.alpha = 0.5 * *p.alpha_eff * c.rho();
    }
    if (!(c.alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    c.validate();
    return c;
}

HomographicMap closed_form_matrix(int K, double alpha, int p, double omega) {
    const double x = p * alpha;
    const cplx a = ipow(-K * p) * std::cosh(x);
    const cplx b = ipow(2 * K + 1 - K * p) * std::sinh(x);
    return {a, b, omega, -0.5 * K * p * std::numbers::pi};
}

double beta_p(const CavityConfig& cfg, int p) { return cfg.parity() * std::tanh(p * cfg.alpha); }

RayFamily::RayFamily(const CavityConfig& cfg, RayMode mode) : cfg_(cfg), mode_(mode) { cfg_.validate(); }

RayFamily RayFamily::closed_form(const CavityConfig& cfg) { return {cfg, RayMode::closed_form}; }

RayFamily RayFamily::composed(const CavityConfig& cfg, MirrorTrajectory mirror1, MirrorTrajectory mirror2) {
    RayFamily f(cfg, RayMode::composed);
    f.m1_ = std::move(mirror1);
    f.m2_ = std::move(mirror2);
    return f;
}

RayFamily RayFamily::composed_sinusoidal(const CavityConfig& cfg) {
    const double beta = std::tanh(cfg.alpha);
    return composed(cfg, MirrorTrajectory::cavity_mirror(1, cfg.K, beta, cfg.omega),
                    MirrorTrajectory::cavity_mirror(2, cfg.K, beta, cfg.omega));
}

MapValue RayFamily::closed_f(int p, double u) const {
    if (mode_ != RayMode::closed_form) throw std::logic_error("closed_f requires closed-form mode");
    if (p < -1) throw std::invalid_argument("closed_f: p must be >= -1");
    const HomographicMap m = closed_form_matrix(cfg_.K, cfg_.alpha, p, cfg_.omega);
    return {m.apply(u), m.derivative(u), m.schwarzian(u)};
}

namespace {

// (F∘G)′ = G′·F′(G), 𝒮(F∘G) = 𝒮G + G′²·𝒮F(G)
MapValue chain(const MapValue& inner, const MapValue& outer_at_inner) {
    return {outer_at_inner.value, inner.deriv * outer_at_inner.deriv,
            inner.schwarzian + inner.deriv * inner.deriv * outer_at_inner.schwarzian};
}

}  // namespace

std::vector<MapValue> RayFamily::sequence(int pmax, double u) const {
    if (pmax < -1) throw std::invalid_argument("sequence: pmax must be >= -1");
    std::vector<MapValue> out;
    out.reserve(static_cast<std::size_t>(pmax + 2));
    if (mode_ == RayMode::closed_form) {
        for (int p = -1; p <= pmax; ++p) out.push_back(closed_f(p, u));
        return out;
    }
    out.push_back(m2_->reflect(u));
    MapValue cur{u, 1.0, 0.0};
    for (int p = 0; p <= pmax; ++p) {
        if (p > 0) {
            const MapValue step = (p % 2 == 1) ? m1_->reflect(cur.value) : m2_->reflect_inverse(cur.value);
            cur = chain(cur, step);
        }
        out.push_back(cur);
    }
    return out;
}

MapValue RayFamily::iterate_f(int p, double u) const {
    if (mode_ != RayMode::composed) throw std::logic_error("iterate_f requires composed mode");
    if (p < -1) throw std::invalid_argument("iterate_f: p must be >= -1");
    return sequence(p, u).back();
}

MapValue RayFamily::f(int p, double u) const {
    return mode_ == RayMode::closed_form ? closed_f(p, u) : iterate_f(p, u);
}

OrbitReport periodic_orbits(const CavityConfig& cfg) {
    cfg.validate();
    OrbitReport rep;
    if (cfg.alpha == 0.0) {
        rep.degenerate = true;
        return rep;
    }
    const double half = 0.5 * std::numbers::pi / cfg.omega;
    // (−1)^K sin Ωũ = −1 gives f_p′ = 1/(ch 2pα − sh 2pα) = e^{2pα}
    const double u_minus = cfg.parity() > 0 ? -half : half;
    const bool swap = cfg.alpha < 0.0;
    rep.orbits.push_back({u_minus, swap ? Stability::repulsive : Stability::attractive});
    rep.orbits.push_back({-u_minus, swap ? Stability::attractive : Stability::repulsive});
    if (swap) std::swap(rep.orbits[0], rep.orbits[1]);
    return rep;
}

bool energy_threshold_reached(const CavityConfig& cfg) {
    const double a = std::abs(cfg.alpha);
    return a > 0.0 && a >= cfg.rho() * (1.0 - kThresholdSlack);
}

bool density_threshold_reached(const CavityConfig& cfg) { return cfg.alpha_eff() >= 1.0 - kThresholdSlack; }

ThresholdStatus threshold_status(const CavityConfig& cfg) {
    cfg.validate();
    if (energy_threshold_reached(cfg)) return ThresholdStatus::energy_divergent;
    const double ae = cfg.alpha_eff();
    if (density_threshold_reached(cfg)) return ThresholdStatus::density_divergent;
    if (ae < kLinearAlphaEff) return ThresholdStatus::linear;
    return ThresholdStatus::nonlinear_below_threshold;
}

std::string to_string(ThresholdStatus s) {
    switch (s) {
        case ThresholdStatus::linear: return "linear";
        case ThresholdStatus::nonlinear_below_threshold: return "nonlinear_below_threshold";
        case ThresholdStatus::density_divergent: return "density_divergent";
        case ThresholdStatus::energy_divergent: return "energy_divergent";
    }
    return "unknown";
}

}  // namespace dce
