#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dce/iteration.hpp"

using namespace dce;
constexpr double kPi = std::numbers::pi;

namespace {
CavityConfig cavity(int K, double R, double alpha) {
    CavityConfig c;
    c.K = K;
    c.R1 = c.R2 = R;
    c.alpha = alpha;
    return c;
}
}  // namespace

TEST_CASE("derived cavity quantities") {
    CavityParams p;
    p.K = 3;
    p.omega = 2.0;
    p.rho = 0.005;
    p.alpha_eff = 0.9;
    const CavityConfig c = make_cavity(p);
    CHECK(c.omega * c.L() == doctest::Approx(3.0 * kPi));
    CHECK(c.r() == doctest::Approx(std::exp(-0.01)));
    CHECK(c.T1() == doctest::Approx(1.0 - c.R1));
    CHECK(c.alpha_eff() == doctest::Approx(0.9));
    CHECK(c.beta_eff() == doctest::Approx(0.7163).epsilon(1e-4));
}

TEST_CASE("make_cavity requires exactly one parametrization") {
    CavityParams p;
    p.r = 0.99;
    CHECK_THROWS_AS(make_cavity(p), std::invalid_argument);
    p.alpha = 0.01;
    p.alpha_eff = 0.5;
    CHECK_THROWS_AS(make_cavity(p), std::invalid_argument);
    p.alpha_eff.reset();
    p.rho = 0.01;
    CHECK_THROWS_AS(make_cavity(p), std::invalid_argument);
    CHECK_THROWS_AS(cavity(0, 0.9, 0.1).validate(), std::invalid_argument);
    CHECK_THROWS_AS(cavity(1, 1.2, 0.1).validate(), std::invalid_argument);
}

TEST_CASE("closed-form derivative formula and periodicity") {
    for (int K : {1, 2, 3})
        for (int p : {-1, 1, 2, 5}) {
            const CavityConfig c = cavity(K, 0.99, 0.13);
            const RayFamily fam = RayFamily::closed_form(c);
            for (double u : {-2.0, 0.1, 1.3}) {
                const double ref = 1.0 / (std::cosh(2 * p * c.alpha) + c.parity() * std::sinh(2 * p * c.alpha) * std::sin(u));
                CHECK(fam.closed_f(p, u).deriv == doctest::Approx(ref).epsilon(1e-13));
                CHECK(fam.closed_f(p, u + 2.0 * kPi).value - fam.closed_f(p, u).value ==
                      doctest::Approx(2.0 * kPi).epsilon(1e-13));
            }
        }
}

TEST_CASE("rays of a cavity at rest") {
    for (int K : {1, 2}) {
        const CavityConfig c = cavity(K, 0.9, 0.0);
        const RayFamily comp = RayFamily::composed_sinusoidal(c);
        const RayFamily closed = RayFamily::closed_form(c);
        for (int p = -1; p <= 3; ++p) {
            CHECK(std::abs(comp.iterate_f(p, 0.4).value - (0.4 - p * c.L())) < 1e-10);
            CHECK(closed.closed_f(p, 0.4).value == doctest::Approx(0.4 - p * c.L()).epsilon(1e-13));
        }
    }
}

TEST_CASE("composed sinusoid within 100 beta^2 of the closed form at p = 40") {
    const double beta = 1e-3;
    const CavityConfig c = cavity(2, 0.99, std::atanh(beta));
    const RayFamily comp = RayFamily::composed_sinusoidal(c);
    const RayFamily closed = RayFamily::closed_form(c);
    for (double u : {0.0, 1.0, 2.0, 4.0}) CHECK(std::abs(comp.iterate_f(40, u).value - closed.closed_f(40, u).value) <= 100 * beta * beta);
}

TEST_CASE("chain rule for f_2") {
    const CavityConfig c = cavity(2, 0.99, 0.2);
    const auto [h, g] = mirror_matrices(c.K, c.alpha);
    const HomographicMap ginv = g.inverse();
    const RayFamily fam = RayFamily::closed_form(c);
    const RayFamily hom = RayFamily::composed(c, MirrorTrajectory::homographic(h), MirrorTrajectory::homographic(g));
    for (double u : {-0.5, 0.7}) {
        const double ref = h.derivative(u) * ginv.derivative(h.apply(u));
        CHECK(std::abs(fam.closed_f(2, u).deriv - ref) < 1e-10);
        CHECK(std::abs(hom.iterate_f(2, u).deriv - ref) < 1e-10);
    }
}

TEST_CASE("p = 0 is the identity and p = 1 is mirror 1") {
    const CavityConfig c = cavity(3, 0.9, 0.3);
    const RayFamily fam = RayFamily::closed_form(c);
    const MapValue v = fam.closed_f(0, 0.77);
    CHECK(v.value == doctest::Approx(0.77));
    CHECK(v.deriv == doctest::Approx(1.0));
    CHECK(v.schwarzian == 0.0);
    for (int K : {1, 2, 3, 4}) {
        const HomographicMap h = mirror_matrices(K, 0.3).first;
        const HomographicMap a1 = closed_form_matrix(K, 0.3, 1);
        CHECK(std::abs(a1.a() - h.a()) < 1e-15);
        CHECK(std::abs(a1.b() - h.b()) < 1e-15);
        CHECK(std::abs(ipow(2 * K + 1) * ipow(-K) - ipow(K + 1)) < 1e-15);
    }
}

TEST_CASE("A_7 for K = 2 equals the 7-fold product") {
    const auto [h, g] = mirror_matrices(2, 0.05);
    HomographicMap m = HomographicMap::identity();
    for (int p = 1; p <= 7; ++p) m = compose(p % 2 ? h : g.inverse(), m);
    const HomographicMap c = closed_form_matrix(2, 0.05, 7);
    CHECK(std::abs(m.a() - c.a()) < 1e-12);
    CHECK(std::abs(m.b() - c.b()) < 1e-12);
}

TEST_CASE("periodic orbits") {
    const double a = 0.04;
    const CavityConfig c = cavity(2, 0.99, a);
    const OrbitReport rep = periodic_orbits(c);
    REQUIRE(rep.orbits.size() == 2);
    CHECK(rep.orbits[0].stability == Stability::attractive);
    CHECK(rep.orbits[0].u_tilde == doctest::Approx(-0.5 * kPi));
    const RayFamily fam = RayFamily::closed_form(c);
    CHECK(fam.closed_f(3, rep.orbits[0].u_tilde).deriv == doctest::Approx(std::exp(6 * a)).epsilon(1e-12));
    CHECK(fam.closed_f(3, rep.orbits[1].u_tilde).deriv == doctest::Approx(std::exp(-6 * a)).epsilon(1e-12));
    const double s1 = fam.closed_f(1, rep.orbits[0].u_tilde).schwarzian;
    for (int p = 1; p <= 6; ++p)
        CHECK(fam.closed_f(p, rep.orbits[0].u_tilde).schwarzian / s1 ==
              doctest::Approx((1 - std::exp(4 * p * a)) / (1 - std::exp(4 * a))).epsilon(1e-10));
    CHECK(periodic_orbits(cavity(2, 0.99, 0.0)).degenerate);
}

TEST_CASE("threshold status") {
    CavityParams p;
    p.K = 2;
    p.rho = 0.01;
    p.alpha = 0.01 / 200;
    CHECK(threshold_status(make_cavity(p)) == ThresholdStatus::linear);
    p.alpha.reset();
    p.alpha_eff = 0.9;
    CHECK(threshold_status(make_cavity(p)) == ThresholdStatus::nonlinear_below_threshold);
    p.alpha_eff = 1.0;
    CHECK(threshold_status(make_cavity(p)) == ThresholdStatus::density_divergent);
    CHECK(std::tanh(1.0) == doctest::Approx(0.7616).epsilon(1e-4));
    p.alpha_eff = 2.0;
    CHECK(threshold_status(make_cavity(p)) == ThresholdStatus::energy_divergent);
    CHECK(to_string(ThresholdStatus::energy_divergent) == "energy_divergent");
}
