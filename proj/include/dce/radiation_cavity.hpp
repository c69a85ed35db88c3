#pragma once

#include <cstddef>
#include <vector>

#include "dce/iteration.hpp"
#include "dce/specfun.hpp"

namespace dce {

enum class Denominators { static_rest, dynamic };

struct DensityOptions {
    Denominators denominators = Denominators::static_rest;
    /// Round-trip cutoff; 0 selects it adaptively from the tail bound.
    std::size_t round_trips = 0;
    double tail_tol = 1e-10;
};

struct DensityValue {
    double value = 0.0;  ///< e_u/(ħΩ²)
    std::size_t round_trips = 0;
    double tail_bound = 0.0;  ///< rigorous bound on the neglected terms, same units
};

/**
 * Energy density radiated to the right by the oscillating cavity, from the sum of
 * Schwarzian derivatives of the ray maps f_p and the interference terms between rays
 * of different round-trip counts. Closed-form f_p′, 𝒮f_p; static denominators use the
 * rest values f_p − f_q = (q − p)L.
 *
 * Throws DensityDivergence for α_eff ≥ 1 and ResourceError when the tail bound cannot
 * be met within the round-trip cutoff. Dynamic denominators cost O(N²) per point.
 */
DensityValue energy_density_cavity(const CavityConfig& cfg, double u, const DensityOptions& opts = {});

struct DensitySamples {
    std::vector<double> u_over_period;
    std::vector<double> e_u;  ///< ħΩ²
    std::size_t max_round_trips = 0;
    double max_tail_bound = 0.0;
};

/// Uniform grid u_k = (k/points)·2π/Ω; values are independent of the thread count.
DensitySamples sample_density_cavity(const CavityConfig& cfg, std::size_t points, const DensityOptions& opts = {},
                                     unsigned threads = 1);

struct EnergyReport {
    double E_u = 0.0;
    double E_v = 0.0;
    double E_total = 0.0;
    double E_intracavity = 0.0;
    double approx_E = 0.0;
    double approx_intracavity = 0.0;
    bool approx_valid = false;  ///< α ≤ ρ/2 and ρ below the high-finesse bound
    double balance_ratio = 0.0;
    bool balance_regime = false;  ///< ρ below the high-finesse bound
};

/// High-finesse bound used by the approximate energies and the balance check.
inline constexpr double kHighFinesseRho = 0.05;

/// E_u for the right-going output. Throws EnergyDivergence for |α| ≥ ρ.
double radiated_energy_right(const CavityConfig& cfg);

/// E_u, E_v (index interchange), E and the intracavity energy, all in ħΩ.
EnergyReport radiated_energy(const CavityConfig& cfg);

/// Motional intracavity energy relative to the static Casimir energy, in ħΩ.
double intracavity_energy(const CavityConfig& cfg);

struct ApproxEnergies {
    double E = 0.0;
    double intracavity = 0.0;
    bool valid = false;
};
ApproxEnergies approx_energies(const CavityConfig& cfg);

/// ℰ / ((E − direct reflection terms)·(Ω/2π)·(2L/4ρ)).
double balance_check(const CavityConfig& cfg);

struct SpectrumOptions {
    bool envelope = false;         ///< drop the round-trip phases (K = 0 in the phases only)
    int m_max = 192;               ///< Fourier orders retained above ⌊ν⌋
    double weight_tol = 1e-10;     ///< round-trip cutoff r^n < weight_tol
    double rel_tol = 1e-9;         ///< early stop after three consecutive small m-terms
};

struct SpectrumValue {
    double n_nu = 0.0;
    int m_used = 0;
    std::size_t round_trips = 0;
    double tail_estimate = 0.0;  ///< algebraic extrapolation of the omitted m-terms
};

/**
 * Photon-number spectrum radiated to the right:
 * (sin²πν/π²) Σ_{m>ν} ν(m−ν){|√R1 T2 Σ_n rⁿ e^{−2iπKν(n+1)} G_m(ν,β_{2n+1}) − √R2 G_m(ν,β_{−1})|²
 *                             + T1T2 |Σ_n rⁿ e^{−2iπKνn} G_m(ν,β_{2n})|²}.
 * Throws DensityDivergence for α_eff ≥ 1.
 */
SpectrumValue spectrum_cavity(const CavityConfig& cfg, double nu, const SpectrumOptions& opts = {});

struct SpectrumSamples {
    std::vector<double> nu;
    std::vector<double> n_nu;
    std::vector<double> n_nu_envelope;  ///< empty unless requested
    int m_used_max = 0;
    std::size_t round_trips = 0;
    double max_tail_estimate = 0.0;
};

/// ν_k = nu_max·k/points for k = 1..points.
SpectrumSamples sample_spectrum_cavity(const CavityConfig& cfg, double nu_max, std::size_t points,
                                       bool with_envelope, const SpectrumOptions& opts = {}, unsigned threads = 1);

}  // namespace dce
