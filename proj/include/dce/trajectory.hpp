#pragma once

#include <functional>

#include "dce/homography.hpp"

namespace dce {

/// Position and its first three time derivatives at one instant.
struct Kinematics {
    double q = 0.0;
    double dq = 0.0;
    double d2q = 0.0;
    double d3q = 0.0;
};

/// Value, first derivative and Schwarzian derivative of a ray map at one point.
struct MapValue {
    double value = 0.0;
    double deriv = 1.0;
    double schwarzian = 0.0;
};

/**
 * World line x = q(t) of one mirror with sup|q′| ≤ velocity_bound < 1.
 *
 * Custom position functions are called from whatever thread evaluates the
 * trajectory and must be safe for concurrent use.
 */
class MirrorTrajectory {
public:
    enum class Kind { sinusoidal, homographic, custom };
    using Evaluator = std::function<Kinematics(double)>;

    /// Ωq(t) = mean_phase − β sin(Ωt − phase).
    static MirrorTrajectory sinusoidal(double mean_phase, double beta, double phase, double omega = 1.0);

    /// Mirror 1 (index 1, at −L/2) or mirror 2 (index 2, at +L/2) of a cavity with ΩL = Kπ.
    static MirrorTrajectory cavity_mirror(int index, int K, double beta, double omega = 1.0);

    /// sin(Ωq − θ) = −β sin(Ωt − φb), θ the lifted phase of the map; reflects exactly into the map.
    static MirrorTrajectory homographic(const HomographicMap& map);

    /// The caller guarantees sup|q′| ≤ velocity_bound; time_scale sets the root tolerance 1e−12·time_scale.
    static MirrorTrajectory custom(Evaluator eval, double velocity_bound, double time_scale = 1.0);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] double velocity_bound() const { return bound_; }
    [[nodiscard]] Kinematics at(double t) const { return eval_(t); }
    [[nodiscard]] double position(double t) const { return eval_(t).q; }

    /// Reflection of an incoming u ray: v = t* + q(t*) with t* − q(t*) = u.
    [[nodiscard]] double v_of_u(double u) const;
    /// Inverse reflection: u = t* − q(t*) with t* + q(t*) = v.
    [[nodiscard]] double u_of_v(double v) const;

    /// v = h(u) with h′ and 𝒮h from the world-line derivatives.
    [[nodiscard]] MapValue reflect(double u) const;
    /// u = g⁻¹(v) with derivatives.
    [[nodiscard]] MapValue reflect_inverse(double v) const;

    /// Root t* of t + sign·q(t) = w.
    [[nodiscard]] double solve_time(double w, double sign) const;

private:
    MirrorTrajectory(Kind kind, Evaluator eval, double bound, double time_scale);

    Kind kind_;
    Evaluator eval_;
    double bound_;
    double time_scale_;
};

/// Mirror position along the homographic world line as a function of u: Q(u) = (h(u) − u)/2.
double homographic_position(const HomographicMap& map, double u);

}  // namespace dce
