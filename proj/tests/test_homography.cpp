#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dce/homography.hpp"
#include "dce/iteration.hpp"
#include "dce/trajectory.hpp"

using namespace dce;
constexpr double kPi = std::numbers::pi;

TEST_CASE("unit determinant and periodic lift") {
    const HomographicMap h = HomographicMap::from_rapidity(0.8, 0.4, -1.2);
    CHECK(std::abs(h.determinant() - 1.0) < 1e-12);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-20.0, 20.0);
    for (int i = 0; i < 100; ++i) {
        const double u = d(rng);
        CHECK(std::abs(h.apply(u + 2.0 * kPi) - h.apply(u) - 2.0 * kPi) < 1e-12);
    }
}

TEST_CASE("compose with identity and A(g^-1) A(h) equals the closed-form A_2") {
    const HomographicMap h = HomographicMap::from_rapidity(0.3, 1.0, 0.2);
    const HomographicMap c = compose(HomographicMap::identity(), h);
    CHECK(std::abs(c.a() - h.a()) < 1e-15);
    CHECK(std::abs(c.b() - h.b()) < 1e-15);
    for (int K : {2, 4}) {
        const auto [hm, gm] = mirror_matrices(K, 0.07);
        const HomographicMap two = compose(gm.inverse(), hm);
        const HomographicMap ref = closed_form_matrix(K, 0.07, 2);
        CHECK(std::abs(two.a() - ref.a()) < 1e-14);
        CHECK(std::abs(two.b() - ref.b()) < 1e-14);
        for (double u : {-1.0, 0.3, 2.0}) CHECK(std::abs(two.apply(u) - ref.apply(u)) < 1e-13);
    }
}

TEST_CASE("determinant preserved under 200 compositions") {
    const auto [h, g] = mirror_matrices(3, 0.01);
    HomographicMap m = HomographicMap::identity();
    for (int i = 0; i < 200; ++i) m = compose(i % 2 ? g.inverse() : h, m);
    CHECK(std::abs(m.determinant() - 1.0) < 1e-12);
}

TEST_CASE("static mirror shifts by twice its position") {
    const double q0 = 0.37;
    const HomographicMap h = HomographicMap::from_rapidity(0.0, q0, 0.0);
    for (double u : {-3.0, 0.0, 1.5}) CHECK(h.apply(u) == doctest::Approx(u + 2.0 * q0).epsilon(1e-15));
    for (double u : {-3.0, 0.0, 1.5}) CHECK(h.derivative(u) == doctest::Approx(1.0));
}

TEST_CASE("extremal derivatives exp(+-2 alpha)") {
    const double a = 0.6;
    const HomographicMap h = HomographicMap::from_rapidity(a, 0.1, 0.9);
    double lo = 1e300;
    double hi = 0.0;
    for (int k = 0; k < 20000; ++k) {
        const double d = h.derivative(2.0 * kPi * k / 20000.0);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    CHECK(hi == doctest::Approx(std::exp(2.0 * a)).epsilon(1e-7));
    CHECK(lo == doctest::Approx(std::exp(-2.0 * a)).epsilon(1e-7));
}

TEST_CASE("derivative and Schwarzian against finite differences") {
    const HomographicMap h = HomographicMap::from_rapidity(0.5, 0.3, -0.4);
    for (double u : {-1.0, 0.2, 2.5}) {
        const double s = 1e-5;
        CHECK(std::abs((h.apply(u + s) - h.apply(u - s)) / (2.0 * s) - h.derivative(u)) < 1e-6);
        // fourth-order differences of h′ give h″ and h‴
        const double k = 1e-3;
        auto d = [&](double x) { return h.derivative(x); };
        const double d1 = (-d(u + 2 * k) + 8 * d(u + k) - 8 * d(u - k) + d(u - 2 * k)) / (12 * k);
        const double d2 = (-d(u + 2 * k) + 16 * d(u + k) - 30 * d(u) + 16 * d(u - k) - d(u - 2 * k)) / (12 * k * k);
        const double fd = d2 / d(u) - 1.5 * (d1 / d(u)) * (d1 / d(u));
        CHECK(std::abs(fd - h.schwarzian(u)) < 1e-5);
    }
}

TEST_CASE("Schwarzian vanishes for the identity and where h' = 1") {
    const HomographicMap id = HomographicMap::identity();
    CHECK(id.schwarzian(0.4) == 0.0);
    const HomographicMap h = HomographicMap::from_rapidity(0.4, 0.0, 0.5 * kPi);
    // bracket a crossing of h′ = 1 on a grid, then bisect
    auto f = [&](double u) { return h.derivative(u) - 1.0; };
    double lo = 0.0;
    double hi = 0.0;
    for (int k = 1; k <= 64; ++k) {
        hi = 2.0 * kPi * k / 64.0;
        lo = 2.0 * kPi * (k - 1) / 64.0;
        if ((f(lo) < 0.0) != (f(hi) < 0.0)) break;
    }
    REQUIRE((f(lo) < 0.0) != (f(hi) < 0.0));
    const bool neg_lo = f(lo) < 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((f(mid) < 0.0) == neg_lo ? lo : hi) = mid;
    }
    CHECK(std::abs(h.schwarzian(lo)) < 1e-12);
}

TEST_CASE("mirror matrices: rigid translations at rest, determinant one") {
    for (int K : {1, 2, 3}) {
        const auto [h, g] = mirror_matrices(K, 0.0);
        CHECK(std::abs(std::abs(h.apply(0.0)) - K * kPi) < 1e-14);
        CHECK(std::abs(std::abs(g.apply(0.0)) - K * kPi) < 1e-14);
        CHECK(h.derivative(1.1) == doctest::Approx(1.0));
        const auto [ha, ga] = mirror_matrices(K, 0.9);
        CHECK(std::abs(ha.determinant() - 1.0) < 1e-14);
        CHECK(std::abs(ga.determinant() - 1.0) < 1e-14);
    }
}

TEST_CASE("K = 3 mirror 1 position at t = 0 matches the sinusoid to O(beta^3)") {
    const double beta = 1e-2;
    const auto [h, g] = mirror_matrices(3, std::atanh(beta));
    const MirrorTrajectory m = MirrorTrajectory::cavity_mirror(1, 3, beta);
    const MirrorTrajectory mh = MirrorTrajectory::homographic(h);
    CHECK(std::abs(m.position(0.0) - (-1.5 * kPi - beta * std::sin(-2.0 * kPi))) < 1e-15);
    CHECK(std::abs(mh.position(0.0) - m.position(0.0)) < 10.0 * beta * beta * beta);
}

TEST_CASE("invalid mirror parameters are rejected") {
    CHECK_THROWS_AS(mirror_matrices(0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(mirror_matrices(2, -0.1), std::invalid_argument);
}
