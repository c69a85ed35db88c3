#include "dce/specfun.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "dce/errors.hpp"

namespace dce {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;
// connection expansion used while m(1 − β²) stays below this
constexpr double kConnectionReach = 8.0;
// terms of the expansion about y = 0 grow like exp(2√(ν(m−ν)y)) before decaying
constexpr double kCancellationReach = 64.0;

bool is_integer(double x) { return std::floor(x) == x; }

double series_G(int m, double nu, double beta, const SeriesControl& ctl) {
    const double z = beta * beta;
    const double lead = detail::g_log_leading(m, nu) + m * std::log(std::abs(beta));
    // ratio t_{l+1}/t_l falls below z once 2l > ν(m−ν) − m − 1
    const double monotone_from = 0.5 * (nu * (m - nu) - m - 1.0);
    double term = 1.0;
    double sum = 1.0;
    for (std::size_t l = 0;; ++l) {
        if (l >= ctl.max_terms) throw ResourceError("hyper_G: series did not converge within max_terms");
        const double dl = static_cast<double>(l);
        term *= (nu + dl) * (m - nu + dl) * z / ((m + 1.0 + dl) * (dl + 1.0));
        sum += term;
        if (dl + 1.0 > monotone_from && term * z / (1.0 - z) <= ctl.rel_tol * sum) break;
    }
    const double sign = (beta < 0.0 && (m % 2 != 0)) ? -1.0 : 1.0;
    return sign * std::exp(lead + std::log(sum));
}

double connection_G(int m, double nu, double beta, const SeriesControl& ctl) {
    const double ab = std::abs(beta);
    const double y = (1.0 - ab) * (1.0 + ab);
    const double ly = std::log(y);
    double d = 1.0;
    double e = 2.0 * kEulerGamma - 1.0 + digamma(nu + 1.0) + digamma(m - nu + 1.0);
    double yp = y;
    double sum = 1.0 / (nu * (m - nu));
    for (std::size_t n = 0;; ++n) {
        if (n >= ctl.max_terms) throw ResourceError("hyper_G: expansion did not converge within max_terms");
        const double t = d * yp * (ly + e);
        sum += t;
        const double dn = static_cast<double>(n);
        const double ratio = y * (nu + 1.0 + dn) * (m - nu + 1.0 + dn) / ((dn + 1.0) * (dn + 2.0));
        if (ratio < 0.5 && 2.0 * d * yp * (std::abs(ly) + std::abs(e) + 1.0) <= ctl.rel_tol * std::abs(sum)) break;
        e += -1.0 / (dn + 1.0) - 1.0 / (dn + 2.0) + 1.0 / (nu + dn + 1.0) + 1.0 / (m - nu + dn + 1.0);
        d *= (nu + 1.0 + dn) * (m - nu + 1.0 + dn) / ((dn + 1.0) * (dn + 2.0));
        yp *= y;
    }
    const double sign = (beta < 0.0 && (m % 2 != 0)) ? -1.0 : 1.0;
    return sign * std::exp(0.5 * m * std::log1p(-y)) * sum;
}

// γ_m = (1/2π)∫ e^{2iν̄ arg(1 + iβe^{−iθ})} e^{imθ} dθ by the periodic trapezoid rule with doubling.
std::complex<double> gamma_quadrature(int m, double nubar, double beta, const SeriesControl& ctl) {
    auto integrand = [&](double th) {
        const std::complex<double> w = 1.0 + std::complex<double>(0.0, beta) * std::polar(1.0, -th);
        return std::polar(1.0, 2.0 * nubar * std::arg(w) + m * th);
    };
    // more than 4|m| nodes, so the first aliases sit far out in the decaying tail
    std::size_t n = 64;
    while (n <= 4 * static_cast<std::size_t>(std::abs(m))) n *= 2;
    std::complex<double> sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += integrand(2.0 * kPi * k / n);
    std::complex<double> prev = sum / static_cast<double>(n);
    const double tol = std::max(ctl.rel_tol, 1e-15);
    while (true) {
        if (2 * n > std::max<std::size_t>(ctl.max_terms, 1u << 16))
            throw ResourceError("gamma_coeff: quadrature did not converge within max_terms");
        for (std::size_t k = 0; k < n; ++k) sum += integrand(2.0 * kPi * (2 * k + 1) / (2 * n));
        n *= 2;
        const std::complex<double> cur = sum / static_cast<double>(n);
        if (std::abs(cur - prev) <= tol) return cur;
        prev = cur;
    }
}

}  // namespace

void SeriesControl::validate() const {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("SeriesControl: rel_tol must be positive");
    if (max_terms == 0) throw std::invalid_argument("SeriesControl: max_terms must be positive");
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be positive");
    return boost::math::lgamma(x);
}

double digamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma: argument must be positive");
    return boost::math::digamma(x);
}

double sin_pi(double x) {
    // reduce to r ∈ [−1/2, 1/2] with x = r + k
    const double k = std::nearbyint(x);
    const double r = x - k;
    const double s = (r == 0.0) ? 0.0 : std::sin(kPi * r);
    return (std::fmod(std::abs(k), 2.0) == 1.0) ? -s : s;
}

double detail::g_log_leading(int m, double nu) {
    return log_gamma(nu) + log_gamma(m - nu) - log_gamma(m + 1.0);
}

void detail::connection_terms(int m, double nu, std::size_t count, ConnectionTerm* out) {
    double d = 1.0;
    double e = 2.0 * kEulerGamma - 1.0 + digamma(nu + 1.0) + digamma(m - nu + 1.0);
    for (std::size_t n = 0; n < count; ++n) {
        out[n] = {d, e};
        const double dn = static_cast<double>(n);
        e += -1.0 / (dn + 1.0) - 1.0 / (dn + 2.0) + 1.0 / (nu + dn + 1.0) + 1.0 / (m - nu + dn + 1.0);
        d *= (nu + 1.0 + dn) * (m - nu + 1.0 + dn) / ((dn + 1.0) * (dn + 2.0));
    }
}

double hyper_G(int m, double nu, double beta, const SeriesControl& ctl) {
    ctl.validate();
    if (!(std::abs(beta) < 1.0)) throw std::domain_error("hyper_G: |beta| must be < 1");
    if (!(nu > 0.0) || !(m > nu)) {
        if ((nu <= 0.0 && is_integer(nu)) || (m - nu <= 0.0 && is_integer(m - nu)))
            throw std::domain_error("hyper_G: gamma pole in leading term");
        throw std::domain_error("hyper_G: analytic evaluation requires 0 < nu < m");
    }
    if (beta == 0.0) return 0.0;
    const double ab = std::abs(beta);
    const double y = (1.0 - ab) * (1.0 + ab);
    if (y < 0.5 && m * y <= kConnectionReach && nu * (m - nu) * y <= kCancellationReach)
        return connection_G(m, nu, beta, ctl);
    return series_G(m, nu, beta, ctl);
}

std::complex<double> gamma_coeff(int m, double nubar, double beta, const SeriesControl& ctl) {
    ctl.validate();
    if (!(std::abs(beta) < 1.0)) throw std::domain_error("gamma_coeff: |beta| must be < 1");
    if (!(nubar >= 0.0)) throw std::domain_error("gamma_coeff: nubar must be >= 0");
    if (nubar == 0.0) return m == 0 ? 1.0 : 0.0;
    if (m >= 1 && m > nubar) {
        if (is_integer(nubar)) return 0.0;
        const double g = hyper_G(m, nubar, beta, ctl);
        return std::complex<double>(nubar / kPi * sin_pi(nubar) * g, 0.0) * ipow(-(m + 2));
    }
    return gamma_quadrature(m, nubar, beta, ctl);
}

std::complex<double> gamma_coeff_p(int m, double nubar, int p, const CavityConfig& cfg, const SeriesControl& ctl) {
    if (p < -1) throw std::invalid_argument("gamma_coeff_p: p must be >= -1");
    const double phase = std::fmod(cfg.K * nubar * p, 2.0) * kPi;
    return std::polar(1.0, phase) * gamma_coeff(m, nubar, beta_p(cfg, p), ctl);
}

double zeta_u_minus_one(double alpha, const CavityConfig& cfg) {
    const double rho = cfg.rho();
    if (alpha >= rho * (1.0 - kThresholdSlack)) throw EnergyDivergence(alpha, rho);
    return std::expm1(2.0 * alpha) * (cfg.R1 + std::exp(2.0 * alpha - 4.0 * rho)) / -std::expm1(4.0 * (alpha - rho));
}

double zeta_u(double alpha, const CavityConfig& cfg) { return 1.0 + zeta_u_minus_one(alpha, cfg); }

double xi(double alpha, const CavityConfig& cfg, const SeriesControl& ctl) {
    ctl.validate();
    const double rho = cfg.rho();
    const double q = std::exp(-2.0 * rho);
    double sum = 0.0;
    double ql = 1.0;
    for (std::size_t l = 1;; ++l) {
        if (l > ctl.max_terms) throw ResourceError("xi: series did not converge within max_terms");
        const double dl = static_cast<double>(l);
        ql *= q;
        // e^{2lα}/ch(2αl) = 2/(1 + e^{−4αl})
        sum += ql * 2.0 / (dl * dl * (1.0 + std::exp(-4.0 * alpha * dl)));
        const double tail = (q < 1.0) ? 2.0 * ql * q / ((dl + 1.0) * (dl + 1.0) * (1.0 - q)) : 2.0 / dl;
        if (tail <= ctl.rel_tol * sum) break;
    }
    return sum;
}

}  // namespace dce
