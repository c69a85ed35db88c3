#include "dce/trajectory.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace dce {

MirrorTrajectory::MirrorTrajectory(Kind kind, Evaluator eval, double bound, double time_scale)
    : kind_(kind), eval_(std::move(eval)), bound_(bound), time_scale_(time_scale) {
    if (!(bound_ >= 0.0 && bound_ < 1.0))
        throw std::invalid_argument("MirrorTrajectory: velocity bound must lie in [0, 1)");
    if (!(time_scale_ > 0.0)) throw std::invalid_argument("MirrorTrajectory: time scale must be positive");
    if (!eval_) throw std::invalid_argument("MirrorTrajectory: empty evaluator");
}

MirrorTrajectory MirrorTrajectory::sinusoidal(double mean_phase, double beta, double phase, double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("sinusoidal: omega must be positive");
    Evaluator eval = [=](double t) {
        const double w = omega * t - phase;
        const double s = std::sin(w);
        const double c = std::cos(w);
        return Kinematics{(mean_phase - beta * s) / omega, -beta * c, beta * omega * s,
                          beta * omega * omega * c};
    };
    return {Kind::sinusoidal, std::move(eval), std::abs(beta), 1.0 / omega};
}

MirrorTrajectory MirrorTrajectory::cavity_mirror(int index, int K, double beta, double omega) {
    if (K < 1) throw std::invalid_argument("cavity_mirror: K must be >= 1");
    const double half_k = 0.5 * K * std::numbers::pi;
    const double shift = 0.5 * (K + 1) * std::numbers::pi;
    if (index == 1) return sinusoidal(-half_k, beta, shift, omega);
    if (index == 2) return sinusoidal(half_k, beta, -shift, omega);
    throw std::invalid_argument("cavity_mirror: index must be 1 or 2");
}

MirrorTrajectory MirrorTrajectory::homographic(const HomographicMap& map) {
    const double omega = map.omega();
    const double theta = map.lifted_phase();
    const double phi_b = map.phi_b();
    const double beta = map.velocity();
    const double damp = 1.0 - beta * beta;
    Evaluator eval = [=](double t) {
        const double w = omega * t - phi_b;
        const double S = beta * std::sin(w);
        const double P = beta * std::cos(w);
        const double den = 1.0 - S * S;
        const double root = std::sqrt(den);
        const double y = std::asin(S);
        const double y1 = omega * P / root;
        const double y2 = -omega * omega * S * damp / (den * root);
        const double y3 = -omega * omega * omega * damp * P * (1.0 + 2.0 * S * S) / (den * den * root);
        return Kinematics{(theta - y) / omega, -y1 / omega, -y2 / omega, -y3 / omega};
    };
    return {Kind::homographic, std::move(eval), beta, 1.0 / omega};
}

MirrorTrajectory MirrorTrajectory::custom(Evaluator eval, double velocity_bound, double time_scale) {
    return {Kind::custom, std::move(eval), velocity_bound, time_scale};
}

double MirrorTrajectory::solve_time(double w, double sign) const {
    auto F = [&](double t) { return t + sign * eval_(t).q - w; };
    const double t0 = w - sign * eval_(w).q;
    const double f0 = F(t0);
    if (f0 == 0.0) return t0;
    const double tol = 1e-12 * time_scale_;
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(t0);
    const double width = std::abs(f0) / (1.0 - bound_) * (1.0 + 1e-9) + tol + floor;
    double lo = t0 - width;
    double hi = t0 + width;
    if (!(F(lo) <= 0.0 && F(hi) >= 0.0))
        throw std::domain_error("MirrorTrajectory: root not bracketed (velocity bound violated?)");

    while (hi - lo > 1e-3 * time_scale_) {
        const double mid = 0.5 * (lo + hi);
        (F(mid) < 0.0 ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        const Kinematics k = eval_(t);
        const double f = t + sign * k.q - w;
        if (f == 0.0) return t;
        (f < 0.0 ? lo : hi) = t;
        double next = t - f / (1.0 + sign * k.dq);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - t);
        t = next;
        if (step <= tol + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(t)) return t;
        if (hi - lo <= tol) return 0.5 * (lo + hi);
    }
    throw std::domain_error("MirrorTrajectory: root iteration did not converge");
}

double MirrorTrajectory::v_of_u(double u) const {
    const double t = solve_time(u, -1.0);
    return t + eval_(t).q;
}

double MirrorTrajectory::u_of_v(double v) const {
    const double t = solve_time(v, 1.0);
    return t - eval_(t).q;
}

namespace {

// Scattering map of the world line x = s·q(t): value t + s q, derivative and Schwarzian.
MapValue reflect_with(const Kinematics& k, double t, double s) {
    const double q1 = s * k.dq;
    const double q2 = s * k.d2q;
    const double q3 = s * k.d3q;
    const double m = 1.0 - q1;
    const double p = 1.0 + q1;
    MapValue r;
    r.value = t + s * k.q;
    r.deriv = p / m;
    r.schwarzian = 2.0 * q3 / (m * m * m * p) + 6.0 * q2 * q2 * q1 / (m * m * m * m * p * p);
    return r;
}

}  // namespace

MapValue MirrorTrajectory::reflect(double u) const {
    const double t = solve_time(u, -1.0);
    return reflect_with(eval_(t), t, 1.0);
}

MapValue MirrorTrajectory::reflect_inverse(double v) const {
    const double t = solve_time(v, 1.0);
    return reflect_with(eval_(t), t, -1.0);
}

double homographic_position(const HomographicMap& map, double u) { return 0.5 * (map.apply(u) - u); }

}  // namespace dce
