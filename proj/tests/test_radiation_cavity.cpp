#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dce/checks.hpp"
#include "dce/errors.hpp"
#include "dce/radiation_cavity.hpp"

using namespace dce;
constexpr double kPi = std::numbers::pi;

namespace {
CavityConfig cavity_rho(int K, double rho, double alpha) {
    CavityParams p;
    p.K = K;
    p.rho = rho;
    p.alpha = alpha;
    return make_cavity(p);
}
CavityConfig cavity_eff(int K, double r, double ae) {
    CavityParams p;
    p.K = K;
    p.r = r;
    p.alpha_eff = ae;
    return make_cavity(p);
}
}  // namespace

TEST_CASE("cavity at rest") {
    const CavityConfig c = cavity_rho(2, 0.01, 0.0);
    for (double u : {0.0, 1.0, 2.5}) CHECK(std::abs(energy_density_cavity(c, u).value) < 1e-12);
    const EnergyReport rep = radiated_energy(c);
    CHECK(rep.E_total == 0.0);
    CHECK(rep.E_intracavity == 0.0);
    CHECK(spectrum_cavity(c, 0.4).n_nu == 0.0);
}

TEST_CASE("density pulse near threshold") {
    const checks::PulseMetrics m9 = checks::pulse_metrics(cavity_eff(2, 0.99, 0.9), 1024);
    const checks::PulseMetrics m5 = checks::pulse_metrics(cavity_eff(2, 0.99, 0.5), 1024);
    const checks::PulseMetrics m3 = checks::pulse_metrics(cavity_eff(2, 0.99, 0.3), 1024);
    CHECK(m9.peak >= 1e-4);
    CHECK(m9.peak <= 1e-2);
    CHECK(m9.fwhm < m5.fwhm);
    CHECK(m5.fwhm < m3.fwhm);
}

TEST_CASE("dynamic denominators differ from static by O(beta)") {
    const CavityConfig c = cavity_eff(2, 0.95, 0.3);
    DensityOptions dyn;
    dyn.denominators = Denominators::dynamic;
    for (double u : {-1.5, 0.0, 1.0}) {
        const double s = energy_density_cavity(c, u).value;
        const double d = energy_density_cavity(c, u, dyn).value;
        CHECK(std::abs(d - s) <= 10 * std::tanh(c.alpha) * std::abs(s) + 1e-12);
    }
}

TEST_CASE("energies in the high-finesse regime") {
    const double rho = 0.005;
    const double a = 0.4 * rho;
    const CavityConfig c = cavity_rho(3, rho, a);
    const EnergyReport rep = radiated_energy(c);
    CHECK(rep.approx_valid);
    CHECK(rep.E_total == doctest::Approx(rep.approx_E).epsilon(0.01));
    const double K = 3;
    CHECK(rep.E_intracavity == doctest::Approx((K - 1 / K) * a * a / (24 * (rho * rho - a * a))).epsilon(0.01));
    CHECK(rep.balance_ratio == doctest::Approx(1.0).epsilon(0.05));
    CHECK(rep.E_u == doctest::Approx(rep.E_v).epsilon(1e-13));
}

TEST_CASE("approximate energies") {
    const double rho = 0.01;
    const ApproxEnergies k1 = approx_energies(cavity_rho(1, rho, 0.003));
    CHECK(k1.E == doctest::Approx(0.003 * 0.003 / 6).epsilon(1e-14));
    CHECK(k1.intracavity == 0.0);
    const double a = rho / 1000;
    const ApproxEnergies lin = approx_energies(cavity_rho(2, rho, a));
    CHECK(lin.E - a * a / 6 == doctest::Approx((1 - 0.25) * a * a / (6 * rho)).epsilon(1e-5));
    double prev = 0.0;
    for (double r : {0.045, 0.03, 0.02, 0.012, 0.01}) {
        const double E = approx_energies(cavity_rho(3, r, 0.005)).E;
        CHECK(E > prev);
        prev = E;
    }
    // algebraic balance identity of the approximations
    const CavityConfig c = cavity_rho(3, rho, 0.004);
    const ApproxEnergies ap = approx_energies(c);
    CHECK(ap.intracavity == doctest::Approx(3.0 / (4 * rho) * (ap.E - 0.004 * 0.004 / 6)).epsilon(1e-12));
}

TEST_CASE("balance fails for unequal reflectivities") {
    CavityConfig c;
    c.K = 3;
    c.R1 = 0.5;
    c.R2 = 0.99;
    c.alpha = 0.4 * c.rho();
    CHECK(std::abs(balance_check(c) - 1.0) > 0.05);
}

TEST_CASE("threshold errors") {
    CHECK_THROWS_AS(energy_density_cavity(cavity_eff(2, 0.99, 1.0), 0.0), DensityDivergence);
    CHECK_THROWS_AS(spectrum_cavity(cavity_eff(2, 0.99, 1.2), 0.5), DensityDivergence);
    CHECK_THROWS_AS(radiated_energy(cavity_rho(2, 0.01, 0.01)), EnergyDivergence);
    CHECK_THROWS_AS(intracavity_energy(cavity_rho(2, 0.01, 0.02)), EnergyDivergence);
    try {
        (void)energy_density_cavity(cavity_eff(2, 0.99, 1.0), 0.0);
    } catch (const DensityDivergence& e) {
        CHECK(std::string(e.what()).find("0.7616") != std::string::npos);
    }
    DensityOptions tight;
    tight.round_trips = 3;
    CHECK_THROWS_AS(energy_density_cavity(cavity_eff(2, 0.99, 0.9), 0.0, tight), ResourceError);
}

TEST_CASE("cavity spectrum") {
    const CavityConfig c = cavity_eff(3, 0.99, 0.9);
    for (double nu : {1.0, 2.0, 3.0}) CHECK(spectrum_cavity(c, nu).n_nu == 0.0);
    const checks::SpectralPeak p = checks::spectral_peak(c, 1.0 / 3, 0.003);
    CHECK(std::abs(p.center - 1.0 / 3) < 0.01);
    CHECK(p.value < 0.2025);
    const double w = c.rho() / (kPi * c.K);
    CHECK(p.half_width > 0.5 * w);
    CHECK(p.half_width < 2.0 * w);
    CHECK(spectrum_cavity(c, 0.5).n_nu < 0.1 * p.value);
}

TEST_CASE("sampled density independent of the thread count") {
    const CavityConfig c = cavity_eff(1, 0.98, 0.6);
    const DensitySamples a = sample_density_cavity(c, 32, {}, 1);
    const DensitySamples b = sample_density_cavity(c, 32, {}, 3);
    CHECK(a.e_u == b.e_u);
}
