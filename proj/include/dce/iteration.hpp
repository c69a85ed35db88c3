#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dce/homography.hpp"
#include "dce/trajectory.hpp"

namespace dce {

/**
 * Oscillating cavity: two mirrors at ∓L/2 with ΩL = Kπ, intensity reflectivities
 * R1 (left, mirror 1) and R2 (right, mirror 2), and per-reflection rapidity α.
 */
struct CavityConfig {
    int K = 1;
    double omega = 1.0;
    double R1 = 1.0;
    double R2 = 1.0;
    double alpha = 0.0;

    /// Throws std::invalid_argument on K < 1, Ω ≤ 0, R outside (0, 1] or non-finite α.
    void validate() const;

    [[nodiscard]] double L() const;
    [[nodiscard]] double T1() const { return 1.0 - R1; }
    [[nodiscard]] double T2() const { return 1.0 - R2; }
    /// r = √(R1 R2) = e^{−2ρ}.
    [[nodiscard]] double r() const;
    [[nodiscard]] double rho() const;
    /// α_eff = 2α/ρ (infinite for a lossless cavity with α > 0, zero when α = 0).
    [[nodiscard]] double alpha_eff() const;
    [[nodiscard]] double beta_eff() const;
    /// (−1)^K.
    [[nodiscard]] double parity() const { return (K % 2 == 0) ? 1.0 : -1.0; }

    /// Mirror exchange: swap R1 ↔ R2, reflect x ↔ −x. The reflected motion is the same
    /// cavity with α → (−1)^K α, i.e. a half-period time shift for odd K.
    [[nodiscard]] CavityConfig mirrored() const;
};

/// Builds a configuration from r (or ρ) with R1 = R2 = r, or from explicit R1, R2.
struct CavityParams {
    int K = 1;
    double omega = 1.0;
    std::optional<double> alpha;
    std::optional<double> alpha_eff;
    std::optional<double> r;
    std::optional<double> rho;
    std::optional<double> R1;
    std::optional<double> R2;
};
/// Exactly one of alpha/alpha_eff and exactly one of r/rho/(R1,R2) must be set.
CavityConfig make_cavity(const CavityParams& p);

/// Signed rapidity convention for f_p: A_p = [[(−i)^{Kp} ch pα, i^{2K+1}(−i)^{Kp} sh pα], …].
HomographicMap closed_form_matrix(int K, double alpha, int p, double omega = 1.0);

/// β_p = (−1)^K th(pα).
double beta_p(const CavityConfig& cfg, int p);

enum class RayMode { closed_form, composed };

/**
 * The iterated ray maps f_p: f₋₁ = g, f₀ = I, f_{2n} = g⁻¹∘f_{2n−1}, f_{2n+1} = h∘f_{2n}.
 */
class RayFamily {
public:
    /// Homographic mirrors with the closed-form matrix powers.
    static RayFamily closed_form(const CavityConfig& cfg);
    /// Arbitrary world lines iterated point by point.
    static RayFamily composed(const CavityConfig& cfg, MirrorTrajectory mirror1, MirrorTrajectory mirror2);
    /// Composition of the two sinusoidal world lines with β = th α.
    static RayFamily composed_sinusoidal(const CavityConfig& cfg);

    [[nodiscard]] RayMode mode() const { return mode_; }
    [[nodiscard]] const CavityConfig& config() const { return cfg_; }

    /// Closed-form f_p (value, f_p′, 𝒮f_p). Throws std::logic_error in composed mode.
    [[nodiscard]] MapValue closed_f(int p, double u) const;
    /// Chain-rule iteration of the world-line maps. Throws std::logic_error in closed-form mode.
    [[nodiscard]] MapValue iterate_f(int p, double u) const;
    /// f₋₁ … f_pmax at one u, in order (index p + 1).
    [[nodiscard]] std::vector<MapValue> sequence(int pmax, double u) const;
    /// Dispatches on the mode.
    [[nodiscard]] MapValue f(int p, double u) const;

private:
    RayFamily(const CavityConfig& cfg, RayMode mode);

    CavityConfig cfg_;
    RayMode mode_;
    std::optional<MirrorTrajectory> m1_;
    std::optional<MirrorTrajectory> m2_;
};

enum class Stability { attractive, repulsive };

struct PeriodicOrbit {
    double u_tilde = 0.0;  ///< in (−π/Ω, π/Ω]
    Stability stability = Stability::attractive;
};

struct OrbitReport {
    bool degenerate = false;  ///< α = 0: every ray is periodic
    std::vector<PeriodicOrbit> orbits;
};

/// Orbits with (−1)^K sin Ωũ = −1 (attractive, f_p′ = e^{2pα}) and +1 (repulsive).
OrbitReport periodic_orbits(const CavityConfig& cfg);

enum class ThresholdStatus { linear, nonlinear_below_threshold, density_divergent, energy_divergent };

/// Relative slack on the thresholds α = ρ and α_eff = 1: ρ is recovered from R1, R2 with a
/// few ulps of error, so parameters meant to sit on a threshold are treated as on it.
inline constexpr double kThresholdSlack = 64.0 * 2.220446049250313e-16;

/// α ≥ ρ within kThresholdSlack (α ≠ 0).
bool energy_threshold_reached(const CavityConfig& cfg);
/// α_eff ≥ 1 within kThresholdSlack.
bool density_threshold_reached(const CavityConfig& cfg);

/// Reporting boundary between the linear and nonlinear regimes.
inline constexpr double kLinearAlphaEff = 0.1;

ThresholdStatus threshold_status(const CavityConfig& cfg);
std::string to_string(ThresholdStatus s);

}  // namespace dce
