#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dce/homography.hpp"
#include "dce/iteration.hpp"
#include "dce/quadrature.hpp"

using namespace dce;
constexpr double kPi = std::numbers::pi;

TEST_CASE("periodic trapezoid") {
    CHECK(integrate_period([](double) { return 3.0; }, 2.0) == doctest::Approx(3.0 * kPi));
    CHECK(std::abs(integrate_period([](double u) { return std::sin(u); }, 1.0)) < 1e-14);
    CavityConfig c;
    c.K = 2;
    c.R1 = c.R2 = 0.99;
    c.alpha = 0.3;
    const RayFamily fam = RayFamily::closed_form(c);
    CHECK(integrate_period([&](double u) { return fam.closed_f(5, u).deriv; }, 1.0) ==
          doctest::Approx(2 * kPi).epsilon(1e-12));
}

TEST_CASE("grid validation") {
    GridSpec g;
    g.points_per_period = 1000;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g.points_per_period = 1024;
    g.eps_sequence = {0.01, 0.02};
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

namespace {
RayMapView view_of(const HomographicMap& V) {
    return {[V](double x) { return V.apply(x); }, [V](double x) { return V.derivative(x); },
            [V](double a, double b) { return V.increment(a, b); }};
}
}  // namespace

TEST_CASE("point splitting") {
    CHECK(std::abs(point_split_density(view_of(HomographicMap::identity()), 0.4, 1.0).value) < 1e-9);
    CHECK(std::abs(point_split_density(view_of(HomographicMap::translation(1.7)), 0.4, 1.0).value) < 1e-9);
    const HomographicMap V = HomographicMap::from_rapidity(0.4, 0.0, 0.5 * kPi);
    for (double u : {0.0, 1.0, 2.0, 4.0}) {
        const SplitResult r = point_split_density(view_of(V), u, 1.0);
        const double exact = -V.schwarzian(u) / (24 * kPi);
        const double scale = std::expm1(1.6) / (48 * kPi);
        CHECK(std::abs(r.value - exact) / scale < 1e-5);
        CHECK(std::abs(r.value - exact) <= r.error);
    }
}

TEST_CASE("spectrum integration") {
    const SpectrumIntegral zero = integrate_spectrum([](double) { return 0.0; }, 3.0);
    CHECK(zero.photon_number == 0.0);
    CHECK(zero.energy_moment == 0.0);
    const SpectrumIntegral p = integrate_spectrum([](double nu) { return nu * (1 - nu); }, 1.0);
    CHECK(p.photon_number == doctest::Approx(1.0 / 6).epsilon(1e-14));
    CHECK(p.energy_moment == doctest::Approx(1.0 / 12).epsilon(1e-14));
}

TEST_CASE("Gauss-Legendre panels") {
    CHECK(gauss_legendre([](double x) { return std::exp(x); }, 0.0, 2.0, 3) == doctest::Approx(std::exp(2.0) - 1).epsilon(1e-15));
}
