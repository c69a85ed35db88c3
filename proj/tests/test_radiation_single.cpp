#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dce/radiation_single.hpp"

using namespace dce;

namespace {
SingleMirrorConfig mirror(double alpha, double R = 1.0) {
    SingleMirrorConfig s;
    s.alpha = alpha;
    s.R = R;
    return s;
}
}  // namespace

TEST_CASE("no motion, no radiation") {
    for (double u : {0.0, 1.0, 3.0}) CHECK(energy_density_single(mirror(0.0), u) == 0.0);
    CHECK(energy_per_period_single(mirror(0.0)).closed_form == 0.0);
    CHECK(spectrum_single(mirror(0.0), 0.4) == 0.0);
}

TEST_CASE("period integral of the density") {
    const SingleEnergy e = energy_per_period_single(mirror(0.5, 0.7));
    CHECK(e.quadrature == doctest::Approx(0.7 * std::sinh(0.5) * std::sinh(0.5) / 12).epsilon(1e-10));
    CHECK(energy_per_period_single(mirror(0.1)).closed_form == doctest::Approx(8.361e-4).epsilon(1e-4));
}

TEST_CASE("energy does not saturate") {
    for (double a : {1.0, 1.5, 2.0})
        CHECK(energy_per_period_single(mirror(2 * a)).closed_form > 4 * energy_per_period_single(mirror(a)).closed_form);
}

TEST_CASE("spectrum arches") {
    const SingleMirrorConfig s = mirror(std::atanh(0.6), 0.8);
    for (double nu : {1.0, 2.0, 3.0}) CHECK(spectrum_single(s, nu) == 0.0);
    for (double nu : {1.1, 1.5, 1.9}) CHECK(spectrum_single(s, nu) > 0.0);
    const double beta = 1e-3;
    CHECK(spectrum_single(mirror(std::atanh(beta), 0.5), 0.5) == doctest::Approx(0.5 * beta * beta * 0.25).epsilon(1e-3));
    CHECK_THROWS(spectrum_single(s, -0.5));
}

TEST_CASE("spectral energy moment tracks the radiated energy") {
    double ratio[2];
    int i = 0;
    for (double beta : {0.3, 0.6}) {
        const SingleMirrorConfig s = mirror(std::atanh(beta));
        SpectrumQuadrature q;
        q.tail_tol = 1e-10;
        const SpectrumIntegral I = integrate_spectrum([&](double nu) { return spectrum_single(s, nu); }, 0.0, q);
        ratio[i++] = I.energy_moment / energy_per_period_single(s).closed_form;
    }
    CHECK(ratio[0] == doctest::Approx(ratio[1]).epsilon(1e-4));
    CHECK(ratio[0] == doctest::Approx(1.0).epsilon(1e-4));
}
