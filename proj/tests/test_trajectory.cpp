#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dce/homography.hpp"
#include "dce/radiation_single.hpp"
#include "dce/trajectory.hpp"

using namespace dce;
constexpr double kPi = std::numbers::pi;

namespace {
MirrorTrajectory constant(double c) {
    return MirrorTrajectory::custom([c](double) { return Kinematics{c, 0.0, 0.0, 0.0}; }, 0.0);
}
}  // namespace

TEST_CASE("static world line") {
    const MirrorTrajectory m = constant(0.8);
    CHECK(m.v_of_u(1.0) == doctest::Approx(2.6));
    CHECK(m.u_of_v(2.6) == doctest::Approx(1.0));
}

TEST_CASE("sinusoid reflection versus the homographic map is O(beta^3)") {
    const double beta = 1e-3;
    for (int K : {1, 2}) {
        const MirrorTrajectory m = MirrorTrajectory::cavity_mirror(1, K, beta);
        const HomographicMap h = mirror_matrices(K, std::atanh(beta)).first;
        for (int k = 0; k < 200; ++k) {
            const double u = 2.0 * kPi * k / 200.0;
            CHECK(std::abs(m.v_of_u(u) - h.apply(u)) <= 10.0 * beta * beta * beta);
        }
    }
}

TEST_CASE("reflection is monotone and invertible") {
    const MirrorTrajectory m = MirrorTrajectory::sinusoidal(0.2, 0.7, 0.4);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-30.0, 30.0);
    for (int i = 0; i < 1000; ++i) {
        double u1 = d(rng);
        double u2 = d(rng);
        if (u1 == u2) continue;
        if (u1 > u2) std::swap(u1, u2);
        CHECK(m.v_of_u(u2) > m.v_of_u(u1));
        CHECK(std::abs(m.u_of_v(m.v_of_u(u1)) - u1) < 1e-10);
    }
}

TEST_CASE("reflected derivative within exp(+-2 alpha)") {
    const double beta = 0.6;
    const double a = std::atanh(beta);
    const MirrorTrajectory m = MirrorTrajectory::sinusoidal(0.0, beta, 0.0);
    for (int k = 0; k < 100; ++k) {
        const double u = 0.0628 * k;
        const double s = 1e-6;
        const double d = (m.v_of_u(u + s) - m.v_of_u(u - s)) / (2.0 * s);
        CHECK(d >= std::exp(-2.0 * a) * (1.0 - 1e-6));
        CHECK(d <= std::exp(2.0 * a) * (1.0 + 1e-6));
        CHECK(m.reflect(u).deriv == doctest::Approx(d).epsilon(1e-6));
    }
}

TEST_CASE("velocity bound of the sinusoid") {
    const MirrorTrajectory m = MirrorTrajectory::sinusoidal(0.0, 0.4, 0.3);
    double vmax = 0.0;
    for (int k = 0; k < 1000; ++k) vmax = std::max(vmax, std::abs(m.at(0.01 * k).dq));
    CHECK(vmax <= m.velocity_bound());
    CHECK(m.velocity_bound() < 1.0);
}

TEST_CASE("homographic position") {
    SingleMirrorConfig s;
    s.alpha = 0.0;
    CHECK(std::abs(homographic_position(s.map(), 0.7)) < 1e-15);
    s.alpha = std::atanh(0.5);
    CHECK(std::abs(homographic_position(s.map(), 0.5 * kPi)) < 1e-15);
    s.alpha = std::atanh(0.3);
    CHECK(homographic_position(s.map(), 0.0) == doctest::Approx(std::atan(0.3)).epsilon(1e-14));
    CHECK(std::atan(0.3) == doctest::Approx(0.29146).epsilon(1e-5));
}

TEST_CASE("homographic world line reflects exactly into its map") {
    const HomographicMap h = HomographicMap::from_rapidity(0.9, 0.3, 1.4);
    const MirrorTrajectory m = MirrorTrajectory::homographic(h);
    for (double u : {-2.0, 0.0, 0.5, 3.3}) CHECK(std::abs(m.v_of_u(u) - h.apply(u)) < 1e-11);
}
