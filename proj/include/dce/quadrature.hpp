#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace dce {

struct GridSpec {
    std::size_t points_per_period = 4096;
    /// Point-splitting separations in units of 1/Ω; empty means 2^{−k}·10⁻², k = 0..6.
    std::vector<double> eps_sequence;

    /// points_per_period must be a power of two, separations positive and strictly decreasing.
    void validate() const;
    [[nodiscard]] std::vector<double> separations(double omega) const;
};

/// Trapezoid rule over one period [u0, u0 + 2π/Ω).
double integrate_period(const std::function<double(double)>& f, double omega, const GridSpec& grid = {},
                        double u0 = 0.0);

/// Composite 20-point Gauss-Legendre rule on [a, b] split into equal panels.
double gauss_legendre(const std::function<double(double)>& f, double a, double b, std::size_t panels = 1);

/// A monotone ray map u ↦ V(u). `increment`, when set, returns V(u2) − V(u1) without cancellation.
struct RayMapView {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::function<double(double, double)> increment;
};

struct SplitResult {
    double value = 0.0;  ///< −(1/4π) lim_{ε→0} [V′V′/ΔV² − 1/ε²]
    double error = 0.0;  ///< extrapolation difference plus a rounding floor
};

/**
 * Point-split vacuum-subtracted correlator at coincidence, per unit reflectivity and ħ = 1.
 * Uses the symmetric pair (u − ε/2, u + ε/2) so the expansion is even in ε, then
 * Neville extrapolation in ε². Throws std::domain_error when V is not increasing near u.
 */
SplitResult point_split_density(const RayMapView& V, double u, double omega, const GridSpec& grid = {});

struct SpectrumIntegral {
    double photon_number = 0.0;
    double energy_moment = 0.0;
    double nu_max = 0.0;
    bool truncation_warning = false;  ///< last arch still above the tail tolerance
};

struct SpectrumQuadrature {
    std::size_t panels_per_arch = 4;
    double tail_tol = 1e-8;
    std::size_t max_arches = 10000;
};

/**
 * ∫n dν and ∫ν n dν over (0, nu_max], integrating arch by arch between consecutive integers.
 * nu_max ≤ 0 selects the first integer at which the last full arch adds less than tail_tol
 * of the running energy moment.
 */
SpectrumIntegral integrate_spectrum(const std::function<double(double)>& n, double nu_max,
                                    const SpectrumQuadrature& q = {});

}  // namespace dce
