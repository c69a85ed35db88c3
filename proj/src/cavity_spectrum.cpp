#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "dce/errors.hpp"
#include "dce/radiation_cavity.hpp"

namespace dce {

namespace {

using cplx = std::complex<double>;

constexpr double kPi = std::numbers::pi;
/// Band split keeps m·y below kBandReach and ν(m − ν)·y below kCancellationReach in the connection band.
constexpr double kBandReach = 12.0;
constexpr double kCancellationReach = 64.0;
constexpr std::size_t kConnectionOrder = 64;
constexpr double kMomentTol = 1e-16;
constexpr double kTiny = 1e-300;

/// Rays of one family sharing the sign of β_p, with one or two weight variants.
struct Family {
    double sign = 1.0;
    std::vector<double> b;   ///< |β_p|
    std::vector<double> y;   ///< 1 − β_p²
    std::vector<double> ly;  ///< ln y
    std::vector<std::vector<cplx>> w;
};

/// Per-family aggregates: moments over the moderate band, log-moments over the near-unit band.
struct Aggregates {
    std::vector<std::vector<cplx>> mom;  ///< [variant][k] Σ w β^k
    std::vector<std::vector<cplx>> S;    ///< [variant][j] Σ w y^j
    std::vector<std::vector<cplx>> T;    ///< [variant][j] Σ w y^j ln y
    bool has_connection = false;
};

Aggregates aggregate(const Family& f, double y_split, std::size_t kmax) {
    const std::size_t nv = f.w.size();
    Aggregates a;
    a.mom.assign(nv, std::vector<cplx>(kmax + 1));
    a.S.assign(nv, std::vector<cplx>(kConnectionOrder));
    a.T.assign(nv, std::vector<cplx>(kConnectionOrder));
    for (std::size_t i = 0; i < f.b.size(); ++i) {
        if (f.y[i] >= y_split) {
            for (std::size_t v = 0; v < nv; ++v) {
                cplx pw = f.w[v][i];
                auto& mom = a.mom[v];
                for (std::size_t k = 0; k <= kmax; ++k) {
                    mom[k] += pw;
                    pw *= f.b[i];
                    if (std::abs(pw.real()) + std::abs(pw.imag()) < kTiny) break;
                }
            }
        } else {
            a.has_connection = true;
            for (std::size_t v = 0; v < nv; ++v) {
                double yj = 1.0;
                for (std::size_t j = 0; j < kConnectionOrder; ++j) {
                    a.S[v][j] += f.w[v][i] * yj;
                    a.T[v][j] += f.w[v][i] * (yj * f.ly[i]);
                    yj *= f.y[i];
                    if (yj < kTiny) break;
                }
            }
        }
    }
    return a;
}

/// Coefficients of G_m/β^m ... expanded in y: Σ_j y^j (P_j + Q_j ln y), with β^m = (1 − y)^{m/2}.
void connection_coefficients(int m, double nu, std::vector<double>& P, std::vector<double>& Q) {
    const std::size_t J = kConnectionOrder;
    std::vector<detail::ConnectionTerm> ct(J);
    detail::connection_terms(m, nu, J, ct.data());
    std::vector<double> bk(J);
    bk[0] = 1.0;
    for (std::size_t k = 0; k + 1 < J; ++k) bk[k + 1] = bk[k] * (static_cast<double>(k) - 0.5 * m) / (k + 1.0);
    P.assign(J, 0.0);
    Q.assign(J, 0.0);
    const double lead = 1.0 / (nu * (m - nu));
    for (std::size_t j = 0; j < J; ++j) {
        double p = bk[j] * lead;
        double q = 0.0;
        for (std::size_t n = 0; n < j; ++n) {
            const double c = bk[j - 1 - n] * ct[n].d;
            p += c * ct[n].e;
            q += c;
        }
        P[j] = p;
        Q[j] = q;
    }
}

}  // namespace

SpectrumValue spectrum_cavity(const CavityConfig& cfg, double nu, const SpectrumOptions& opts) {
    cfg.validate();
    if (!(nu > 0.0)) throw std::domain_error("spectrum_cavity: nu must be positive");
    if (opts.m_max < 2 || !(opts.weight_tol > 0.0 && opts.weight_tol < 1.0) || !(opts.rel_tol > 0.0))
        throw std::invalid_argument("spectrum_cavity: invalid options");
    const double ae = cfg.alpha_eff();
    if (density_threshold_reached(cfg)) throw DensityDivergence(ae);
    SpectrumValue out;
    const double s = sin_pi(nu);
    if (s == 0.0 || cfg.alpha == 0.0) return out;

    const double a = std::abs(cfg.alpha);
    const double sgn = cfg.parity() * (cfg.alpha < 0.0 ? -1.0 : 1.0);
    const double r = cfg.r();
    const std::size_t N = static_cast<std::size_t>(std::ceil(std::log(opts.weight_tol) / std::log(r)));
    out.round_trips = N;
    const double T1 = cfg.T1();
    const double T2 = cfg.T2();
    const double kphase = opts.envelope ? 0.0 : static_cast<double>(cfg.K);

    // odd rays p = 2n+1 and even rays p = 2n (n ≥ 1; β₀ = 0)
    Family odd;
    Family even;
    odd.sign = even.sign = sgn;
    odd.w.resize(1);
    even.w.resize(1);
    const double c_odd = std::sqrt(cfg.R1) * T2;
    for (std::size_t n = 0; n < N; ++n) {
        const double rn = std::pow(r, static_cast<double>(n));
        for (int parity = 0; parity < 2; ++parity) {
            const double p = static_cast<double>(2 * n + (parity == 0 ? 1 : 0));
            if (p == 0.0) continue;
            Family& f = parity == 0 ? odd : even;
            const double x = p * a;
            const double ch = std::cosh(x);
            f.b.push_back(std::tanh(x));
            f.y.push_back(1.0 / (ch * ch));
            f.ly.push_back(-2.0 * (x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2));
            const double turns = parity == 0 ? kphase * nu * (n + 1.0) : kphase * nu * n;
            const double ph = -2.0 * kPi * std::fmod(turns, 1.0);
            f.w[0].push_back((parity == 0 ? c_odd : 1.0) * rn * std::polar(1.0, ph));
        }
    }

    const int M = static_cast<int>(std::floor(nu)) + opts.m_max;
    const double y_split = std::min({0.5, kBandReach / M, kCancellationReach / (nu * (M - nu))});
    double z_max = 0.0;
    for (const Family* f : {&odd, &even})
        for (std::size_t i = 0; i < f->y.size(); ++i)
            if (f->y[i] >= y_split) z_max = std::max(z_max, f->b[i] * f->b[i]);
    const std::size_t l_max =
        z_max > 0.0 ? static_cast<std::size_t>(std::ceil(std::log(kMomentTol) / std::log(z_max))) + 20 : 1;
    const std::size_t kmax = static_cast<std::size_t>(M) + 2 * l_max;
    const Aggregates ag_odd = aggregate(odd, y_split, kmax);
    const Aggregates ag_even = aggregate(even, y_split, kmax);
    const bool need_conn = ag_odd.has_connection || ag_even.has_connection;

    const double beta_direct = -cfg.parity() * std::tanh(cfg.alpha);
    const double c_direct = std::sqrt(cfg.R2);
    SeriesControl ctl;
    ctl.rel_tol = 1e-15;

    std::vector<double> P;
    std::vector<double> Q;
    auto amplitude = [&](const Aggregates& ag, int m) {
        const double lead = std::exp(detail::g_log_leading(m, nu));
        cplx acc = 0.0;
        double c = lead;
        for (std::size_t l = 0; l <= l_max && static_cast<std::size_t>(m) + 2 * l <= kmax; ++l) {
            acc += c * ag.mom[0][m + 2 * l];
            const double dl = static_cast<double>(l);
            c *= (nu + dl) * (m - nu + dl) / ((m + 1.0 + dl) * (dl + 1.0));
        }
        if (ag.has_connection)
            for (std::size_t j = 0; j < kConnectionOrder; ++j) acc += P[j] * ag.S[0][j] + Q[j] * ag.T[0][j];
        return (sgn < 0.0 && m % 2 != 0) ? -acc : acc;
    };

    double sum = 0.0;
    double term_half = 0.0;
    double last = 0.0;
    int small = 0;
    const int m0 = static_cast<int>(std::floor(nu)) + 1;
    int m = m0;
    for (; m <= M; ++m) {
        if (need_conn) connection_coefficients(m, nu, P, Q);
        const cplx A = amplitude(ag_odd, m) - c_direct * hyper_G(m, nu, beta_direct, ctl);
        const cplx B = amplitude(ag_even, m);
        const double term = nu * (m - nu) * (std::norm(A) + T1 * T2 * std::norm(B));
        sum += term;
        last = term;
        if (m == (m0 + M) / 2) term_half = term;
        small = (term < opts.rel_tol * sum) ? small + 1 : 0;
        if (small >= 3) break;
    }
    out.m_used = std::min(m, M);
    if (small < 3 && last > 0.0 && term_half > last) {
        // algebraic decay t_m ~ m^{−s}
        const double mh = static_cast<double>((m0 + M) / 2);
        const double sexp = std::log(term_half / last) / std::log(M / mh);
        out.tail_estimate = sexp > 1.0 ? last * M / (sexp - 1.0) : std::numeric_limits<double>::infinity();
        out.tail_estimate *= s * s / (kPi * kPi);
    }
    out.n_nu = s * s / (kPi * kPi) * sum;
    return out;
}

SpectrumSamples sample_spectrum_cavity(const CavityConfig& cfg, double nu_max, std::size_t points,
                                       bool with_envelope, const SpectrumOptions& opts, unsigned threads) {
    cfg.validate();
    if (!(nu_max > 0.0) || points == 0) throw std::invalid_argument("sample_spectrum_cavity: invalid grid");
    const double ae = cfg.alpha_eff();
    if (density_threshold_reached(cfg)) throw DensityDivergence(ae);
    SpectrumSamples out;
    out.nu.resize(points);
    out.n_nu.resize(points);
    if (with_envelope) out.n_nu_envelope.resize(points);
    std::vector<SpectrumValue> vals(points);
    SpectrumOptions plain = opts;
    plain.envelope = false;
    SpectrumOptions env = opts;
    env.envelope = true;
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const double nu = nu_max * static_cast<double>(k + 1) / static_cast<double>(points);
            out.nu[k] = nu;
            vals[k] = spectrum_cavity(cfg, nu, plain);
            if (with_envelope) out.n_nu_envelope[k] = spectrum_cavity(cfg, nu, env).n_nu;
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
        out.n_nu[k] = vals[k].n_nu;
        out.m_used_max = std::max(out.m_used_max, vals[k].m_used);
        out.round_trips = std::max(out.round_trips, vals[k].round_trips);
        out.max_tail_estimate = std::max(out.max_tail_estimate, vals[k].tail_estimate);
    }
    return out;
}

}  // namespace dce
