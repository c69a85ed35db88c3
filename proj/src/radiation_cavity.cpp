#include "dce/radiation_cavity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "dce/errors.hpp"

namespace dce {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kAutoRoundTripCap = 20000000;
constexpr std::size_t kDirectPairLimit = 140;

/// Rest-frame geometry of one evaluation point: D(x) = eˣ s2 + e⁻ˣ c2 is 1/f_p′ at x = 2pα.
struct PhasePoint {
    double s;  ///< sin(φ/2)
    double c;  ///< cos(φ/2)
    double s2;
    double c2;
};

PhasePoint phase_point(const CavityConfig& cfg, double u) {
    // φ = Ωu + (−1)^K π/2 puts the attractive orbit at φ = 0
    const double h = 0.5 * std::remainder(cfg.omega * u, 2.0 * kPi) + 0.25 * cfg.parity() * kPi;
    const double s = std::sin(h);
    const double c = std::cos(h);
    return {s, c, s * s, c * c};
}

/// f_p(u) − u = −pL + (2/Ω) Arg(1 − th(pα) e^{−iφ}), evaluated from the shared phase so rays stay ordered.
double ray_offset(const CavityConfig& cfg, const PhasePoint& ph, double x, int p) {
    const double t = std::tanh(std::abs(x));
    const double one_minus_t = 2.0 / (std::exp(2.0 * std::abs(x)) + 1.0);
    const double re = one_minus_t + 2.0 * t * (x >= 0.0 ? ph.s2 : ph.c2);
    const double im = std::copysign(t, x) * 2.0 * ph.s * ph.c;
    return -p * cfg.L() + 2.0 * std::atan2(im, re) / cfg.omega;
}

/// ln f_p′ at x = 2pα.
double log_fprime(const PhasePoint& ph, double x) {
    if (x >= 0.0) return -x - std::log(ph.s2 + std::exp(-2.0 * x) * ph.c2);
    return x - std::log(ph.c2 + std::exp(2.0 * x) * ph.s2);
}

/// w²·(1 − f_p′²) given the weight squared w² = r^{2n} and ln f_p′; cancellation-free near x = 0.
double weighted_schwarzian(const PhasePoint& ph, double x, double r2n, double logw) {
    if (std::abs(x) < 1.0) {
        const double dm1 = std::expm1(x) * ph.s2 + std::expm1(-x) * ph.c2;
        const double d = 1.0 + dm1;
        return r2n * dm1 * (d + 1.0) / (d * d);
    }
    return r2n - std::exp(2.0 * logw);
}

/// Σ_{n≠m} w_n w_m/(n − m)², direct for short sequences and via a sum of exponentials otherwise.
double pair_sum(const std::vector<double>& w) {
    const std::size_t n = w.size();
    if (n < 2) return 0.0;
    double total = 0.0;
    if (n < kDirectPairLimit) {
        for (std::size_t k = 1; k < n; ++k) {
            double c = 0.0;
            for (std::size_t m = 0; m + k < n; ++m) c += w[m] * w[m + k];
            const double dk = static_cast<double>(k);
            total += c / (dk * dk);
        }
        return 2.0 * total;
    }
    // 1/k² = ∫ e^{2τ} exp(−k e^τ) dτ, trapezoid in τ
    constexpr double h = 0.3;
    constexpr double tau_max = 3.7;
    const double tau_min = -std::log(static_cast<double>(n)) - 15.0;
    for (double tau = tau_max; tau >= tau_min; tau -= h) {
        const double s = std::exp(tau);
        const double decay = std::exp(-s);
        double b = 0.0;
        double acc = 0.0;
        for (std::size_t m = n - 1; m-- > 0;) {
            b = decay * (w[m + 1] + b);
            acc += w[m] * b;
        }
        total += h * s * s * acc;
    }
    return 2.0 * total;
}

double dynamic_pair_sum(const std::vector<double>& w, const std::vector<double>& f, double omega) {
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = i + 1; j < w.size(); ++j) {
            const double d = omega * (f[i] - f[j]);
            total += w[i] * w[j] / (d * d);
        }
    return 2.0 * total;
}

/// c·t with a vanishing coefficient absorbing an unbounded tail.
double weighted(double c, double t) { return c == 0.0 ? 0.0 : c * t; }

/// Tail bound Σ_{k>n} w_k from the last ratio; ratios are non-increasing because ln f′ is concave in p.
double geometric_tail(double w, double ratio) {
    if (w == 0.0) return 0.0;
    if (!(ratio < 1.0)) return std::numeric_limits<double>::infinity();
    return w * ratio / (1.0 - ratio);
}

}  // namespace

DensityValue energy_density_cavity(const CavityConfig& cfg, double u, const DensityOptions& opts) {
    cfg.validate();
    if (!(opts.tail_tol > 0.0)) throw std::invalid_argument("energy_density_cavity: tail_tol must be positive");
    const double ae = cfg.alpha_eff();
    if (density_threshold_reached(cfg)) throw DensityDivergence(ae);
    DensityValue out;
    const double a = cfg.alpha;
    const double r = cfg.r();
    const double log_r = std::log(r);
    const double R1 = cfg.R1;
    const double R2 = cfg.R2;
    const double T1 = cfg.T1();
    const double T2 = cfg.T2();
    const double kpi2 = cfg.K * cfg.K * kPi * kPi;
    const double c_odd = T2 * T2 * R1;
    const double c_even = T1 * T2;
    const double c_cross = 2.0 * T2 / kpi2;
    const double c_pair_even = c_even / (4.0 * kpi2);
    const double c_pair_odd = c_odd / (4.0 * kpi2);
    const bool dynamic = opts.denominators == Denominators::dynamic;

    const PhasePoint ph = phase_point(cfg, u);
    const double log_fm1 = log_fprime(ph, -2.0 * a);
    const double fm1 = std::exp(log_fm1);
    const double schw_direct = R2 * weighted_schwarzian(ph, -2.0 * a, 1.0, log_fm1);

    const std::size_t cap = opts.round_trips > 0 ? opts.round_trips : kAutoRoundTripCap;
    std::vector<double> we;
    std::vector<double> wo;
    double schw = 0.0;
    double schw_abs = 0.0;
    double cross_static = 0.0;
    double adjacent = 0.0;
    double w_max = 0.0;
    bool converged = false;
    double bound = 0.0;

    for (std::size_t n = 0; n < cap; ++n) {
        const double dn = static_cast<double>(n);
        const double lrn = dn * log_r;
        const double r2n = std::exp(2.0 * lrn);
        const double x_even = 4.0 * dn * a;
        const double x_odd = x_even + 2.0 * a;
        const double lwe = lrn + log_fprime(ph, x_even);
        const double lwo = lrn + log_fprime(ph, x_odd);
        const double se = c_even * weighted_schwarzian(ph, x_even, r2n, lwe);
        const double so = c_odd * weighted_schwarzian(ph, x_odd, r2n, lwo);
        schw += se + so;
        schw_abs += std::abs(se) + std::abs(so);
        we.push_back(std::exp(lwe));
        wo.push_back(std::exp(lwo));
        cross_static += wo.back() / (4.0 * (dn + 1.0) * (dn + 1.0));
        if (n > 0) adjacent += c_pair_even * we[n] * we[n - 1] + c_pair_odd * wo[n] * wo[n - 1];
        w_max = std::max({w_max, we.back(), wo.back()});
        if (n < 2) continue;

        const double tail_e = geometric_tail(we[n], we[n] / we[n - 1]);
        const double tail_o = geometric_tail(wo[n], wo[n] / wo[n - 1]);
        const double ratio_e = we[n] / we[n - 1];
        const double ratio_o = wo[n] / wo[n - 1];
        const double r2 = r * r;
        const double schw_tail =
            weighted(c_even + c_odd, r2n * r2 / (1.0 - r2)) +
            weighted(c_even, we[n] * we[n] * ratio_e * ratio_e / (1.0 - ratio_e * ratio_e)) +
            weighted(c_odd, wo[n] * wo[n] * ratio_o * ratio_o / (1.0 - ratio_o * ratio_o));
        const double cross_tail = weighted(c_cross * r * fm1, tail_o / (4.0 * (dn + 2.0) * (dn + 2.0)));
        const double pair_tail =
            (weighted(c_pair_even, tail_e) + weighted(c_pair_odd, tail_o)) * 2.0 * w_max * kPi * kPi / 3.0;
        bound = (schw_tail / 12.0 + cross_tail + pair_tail) / (4.0 * kPi);
        if (!std::isfinite(bound)) continue;
        const double scale = (std::abs(schw_direct) + schw_abs) / 12.0 + c_cross * r * fm1 * cross_static + 2.0 * adjacent;
        if (bound <= opts.tail_tol * scale / (4.0 * kPi)) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw ResourceError(opts.round_trips > 0
                                ? "energy_density_cavity: tail bound unreachable at the given round-trip cutoff"
                                : "energy_density_cavity: round-trip budget exhausted");
    }

    const double schw_part = (schw_direct + schw) / 12.0;
    double cross = 0.0;
    double pairs = 0.0;
    if (!dynamic) {
        cross = c_cross * r * fm1 * cross_static;
        pairs = c_pair_even * pair_sum(we) + c_pair_odd * pair_sum(wo);
    } else {
        const std::size_t N = we.size();
        std::vector<double> fe(N);
        std::vector<double> fo(N);
        for (std::size_t n = 0; n < N; ++n) {
            const int p = static_cast<int>(2 * n);
            fe[n] = ray_offset(cfg, ph, p * 2.0 * a, p);
            fo[n] = ray_offset(cfg, ph, (p + 1) * 2.0 * a, p + 1);
        }
        const double fm1_value = ray_offset(cfg, ph, -2.0 * a, -1);
        for (std::size_t n = 0; n < N; ++n) {
            const double d = cfg.omega * (fm1_value - fo[n]);
            cross += wo[n] / (d * d);
        }
        cross *= 2.0 * T2 * r * fm1;
        pairs = c_even * dynamic_pair_sum(we, fe, cfg.omega) + c_odd * dynamic_pair_sum(wo, fo, cfg.omega);
    }
    out.value = -(schw_part - cross + pairs) / (4.0 * kPi);
    out.round_trips = we.size();
    out.tail_bound = bound;
    return out;
}

DensitySamples sample_density_cavity(const CavityConfig& cfg, std::size_t points, const DensityOptions& opts,
                                     unsigned threads) {
    cfg.validate();
    if (points == 0) throw std::invalid_argument("sample_density_cavity: points must be positive");
    const double ae = cfg.alpha_eff();
    if (density_threshold_reached(cfg)) throw DensityDivergence(ae);
    DensitySamples out;
    out.u_over_period.resize(points);
    out.e_u.resize(points);
    std::vector<DensityValue> vals(points);
    const double period = 2.0 * kPi / cfg.omega;
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const double x = static_cast<double>(k) / static_cast<double>(points);
            out.u_over_period[k] = x;
            vals[k] = energy_density_cavity(cfg, x * period, opts);
        }
    };
    const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(points)));
    if (t == 1) {
        work(0, points);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(t);
        for (unsigned i = 0; i < t; ++i) {
            const std::size_t b = points * i / t;
            const std::size_t e = points * (i + 1) / t;
            pool.emplace_back([&, b, e, i] {
                try {
                    work(b, e);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& err : errors)
            if (err) std::rethrow_exception(err);
    }
    for (std::size_t k = 0; k < points; ++k) {
        out.e_u[k] = vals[k].value;
        out.max_round_trips = std::max(out.max_round_trips, vals[k].round_trips);
        out.max_tail_bound = std::max(out.max_tail_bound, vals[k].tail_bound);
    }
    return out;
}

namespace {

/// Σ_l q^l/l² [2A/(1 + e^{−4αl}) + 2B/(1 + e^{4αl})], q = e^{−2ρ}.
double interference_series(double a, double rho, double A, double B) {
    const double q = std::exp(-2.0 * rho);
    const double scale = 2.0 * (std::abs(A) + std::abs(B));
    if (scale == 0.0) return 0.0;
    double sum = 0.0;
    double ql = 1.0;
    for (std::size_t l = 1;; ++l) {
        if (l > 1000000000) throw ResourceError("interference_series: too many terms");
        const double dl = static_cast<double>(l);
        ql *= q;
        const double e = std::exp(-4.0 * a * dl);
        // 1/(1 + e^{4αl}) = e^{−4αl}/(1 + e^{−4αl})
        sum += ql / (dl * dl) * (2.0 * A / (1.0 + e) + 2.0 * B * e / (1.0 + e));
        const double tail = scale * ql * q / ((dl + 1.0) * (dl + 1.0) * (1.0 - q));
        if (tail <= 1e-16 * std::abs(sum) || ql == 0.0) break;
    }
    return sum;
}

CavityConfig swapped(const CavityConfig& cfg) {
    CavityConfig c = cfg;
    std::swap(c.R1, c.R2);
    return c;
}

double check_energy_domain(const CavityConfig& cfg) {
    cfg.validate();
    const double a = std::abs(cfg.alpha);
    const double rho = cfg.rho();
    if (energy_threshold_reached(cfg)) throw EnergyDivergence(a, rho);
    return a;
}

}  // namespace

double radiated_energy_right(const CavityConfig& cfg) {
    const double a = check_energy_domain(cfg);
    if (a == 0.0) return 0.0;
    const double rho = cfg.rho();
    const double zp = zeta_u_minus_one(a, cfg);
    const double zm = zeta_u_minus_one(-a, cfg);
    const double A = zp - std::expm1(-2.0 * a);
    const double B = zm - std::expm1(2.0 * a);
    const double sh = std::sinh(a);
    const double T2 = cfg.T2();
    return cfg.R2 * sh * sh / 12.0 + T2 * (zp + zm) / 48.0 -
           T2 / (8.0 * kPi * kPi * cfg.K * cfg.K) * interference_series(a, rho, A, B);
}

double intracavity_energy(const CavityConfig& cfg) {
    const double a = check_energy_domain(cfg);
    if (a == 0.0) return 0.0;
    const CavityConfig sw = swapped(cfg);
    const double Zp = 0.5 * (zeta_u_minus_one(a, cfg) + zeta_u_minus_one(a, sw));
    const double Zm = 0.5 * (zeta_u_minus_one(-a, cfg) + zeta_u_minus_one(-a, sw));
    return cfg.K * (Zp + Zm) / 48.0 - interference_series(a, cfg.rho(), Zp, Zm) / (8.0 * kPi * kPi * cfg.K);
}

ApproxEnergies approx_energies(const CavityConfig& cfg) {
    const double a = check_energy_domain(cfg);
    const double rho = cfg.rho();
    ApproxEnergies out;
    out.valid = a <= 0.5 * rho && rho < kHighFinesseRho;
    if (a == 0.0) return out;
    const double K = cfg.K;
    const double a2 = a * a;
    const double gap = (rho - a) * (rho + a);
    out.E = a2 / 6.0 + (1.0 - 1.0 / (K * K)) * rho * a2 / (6.0 * gap);
    out.intracavity = (K - 1.0 / K) * a2 / (24.0 * gap);
    return out;
}

double balance_check(const CavityConfig& cfg) {
    const double a = check_energy_domain(cfg);
    if (a == 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double E = radiated_energy_right(cfg) + radiated_energy_right(swapped(cfg));
    const double sh = std::sinh(a);
    const double cavity_part = E - (cfg.R1 + cfg.R2) * sh * sh / 12.0;
    return intracavity_energy(cfg) / (cavity_part * cfg.K / (4.0 * cfg.rho()));
}

EnergyReport radiated_energy(const CavityConfig& cfg) {
    check_energy_domain(cfg);
    EnergyReport rep;
    rep.E_u = radiated_energy_right(cfg);
    rep.E_v = radiated_energy_right(swapped(cfg));
    rep.E_total = rep.E_u + rep.E_v;
    rep.E_intracavity = intracavity_energy(cfg);
    const ApproxEnergies ap = approx_energies(cfg);
    rep.approx_E = ap.E;
    rep.approx_intracavity = ap.intracavity;
    rep.approx_valid = ap.valid;
    rep.balance_ratio = balance_check(cfg);
    rep.balance_regime = cfg.rho() < kHighFinesseRho;
    return rep;
}

}  // namespace dce
