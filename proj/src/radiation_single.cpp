#include "dce/radiation_single.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dce/errors.hpp"

namespace dce {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

void SingleMirrorConfig::validate() const {
    if (!(R > 0.0 && R <= 1.0)) throw std::invalid_argument("SingleMirrorConfig: R must lie in (0, 1]");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("SingleMirrorConfig: alpha must be >= 0");
    if (!(omega > 0.0)) throw std::invalid_argument("SingleMirrorConfig: omega must be positive");
}

double SingleMirrorConfig::beta() const { return std::tanh(alpha); }

HomographicMap SingleMirrorConfig::map() const { return HomographicMap::from_rapidity(alpha, 0.0, 0.5 * kPi, omega); }

double energy_density_single(const SingleMirrorConfig& cfg, double u) {
    cfg.validate();
    const HomographicMap V = cfg.map();
    // V′² − 1 = −(2/Ω²)𝒮V
    return -cfg.R * 2.0 * V.schwarzian(u) / (cfg.omega * cfg.omega) / (48.0 * kPi);
}

SingleEnergy energy_per_period_single(const SingleMirrorConfig& cfg, const GridSpec& grid) {
    cfg.validate();
    SingleEnergy e;
    const double sh = std::sinh(cfg.alpha);
    e.closed_form = cfg.R * sh * sh / 12.0;
    e.quadrature = cfg.omega * integrate_period([&](double u) { return energy_density_single(cfg, u); }, cfg.omega, grid);
    return e;
}

double spectrum_single(const SingleMirrorConfig& cfg, double nu, const SeriesControl& ctl) {
    cfg.validate();
    ctl.validate();
    if (!(nu > 0.0)) throw std::domain_error("spectrum_single: nu must be positive");
    const double s = sin_pi(nu);
    if (s == 0.0 || cfg.alpha == 0.0) return 0.0;
    const double beta = cfg.beta();
    double sum = 0.0;
    int small = 0;
    for (int m = static_cast<int>(std::floor(nu)) + 1;; ++m) {
        if (static_cast<std::size_t>(m) > ctl.max_terms) throw ResourceError("spectrum_single: m-sum did not converge");
        const double g = hyper_G(m, nu, beta, ctl);
        const double term = nu * (m - nu) * g * g;
        sum += term;
        small = (term < ctl.rel_tol * sum) ? small + 1 : 0;
        if (small >= 3) break;
    }
    return cfg.R * s * s / (kPi * kPi) * sum;
}

}  // namespace dce
