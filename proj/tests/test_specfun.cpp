#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "dce/errors.hpp"
#include "dce/iteration.hpp"
#include "dce/specfun.hpp"

using namespace dce;
constexpr double kPi = std::numbers::pi;

TEST_CASE("log_gamma") {
    CHECK(log_gamma(1.0) == doctest::Approx(0.0));
    CHECK(log_gamma(0.5) == doctest::Approx(0.5723649429).epsilon(1e-10));
    // Stirling series with recurrence shift to x + 20
    const double x = 7.3;
    double shift = 0.0;
    double y = x;
    for (int k = 0; k < 20; ++k) shift += std::log(y++);
    const double stirling = (y - 0.5) * std::log(y) - y + 0.5 * std::log(2 * kPi) + 1 / (12 * y) - 1 / (360 * y * y * y) +
                            1 / (1260 * std::pow(y, 5)) - 1 / (1680 * std::pow(y, 7));
    CHECK(log_gamma(x) == doctest::Approx(stirling - shift).epsilon(1e-13));
    CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
}

TEST_CASE("sin_pi is exact at integers") {
    for (double k : {-3.0, 0.0, 1.0, 2.0, 17.0}) CHECK(sin_pi(k) == 0.0);
    CHECK(sin_pi(0.5) == doctest::Approx(1.0));
    CHECK(sin_pi(1.25) == doctest::Approx(-std::sqrt(0.5)));
}

TEST_CASE("hyper_G small-beta and zero") {
    CHECK(hyper_G(3, 0.4, 0.0) == 0.0);
    const double b = 1e-6;
    CHECK(hyper_G(1, 0.3, b) == doctest::Approx(b * kPi / std::sin(kPi * 0.3)).epsilon(1e-9));
    CHECK_THROWS_AS(hyper_G(2, 0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(hyper_G(1, 1.5, 0.3), std::domain_error);
}

namespace {
// direct Fourier integral of the field dephasing factor by the trapezoid rule
std::complex<double> fourier(int m, double nb, double beta, int n = 4096) {
    std::complex<double> s = 0.0;
    for (int k = 0; k < n; ++k) {
        const double th = 2 * kPi * k / n;
        const std::complex<double> w = 1.0 + std::complex<double>(0, beta) * std::polar(1.0, -th);
        s += std::polar(1.0, 2 * nb * std::arg(w) + m * th);
    }
    return s / double(n);
}
}  // namespace

TEST_CASE("hyper_G against the quadrature oracle, both branches") {
    for (double beta : {0.7, 0.999})
        for (int m : {3, 5, 9}) {
            const std::complex<double> g = fourier(m, 0.4, beta, beta > 0.99 ? 1 << 16 : 4096);
            const double G = hyper_G(m, 0.4, beta);
            CHECK(std::abs(g - std::complex<double>(0.4 / kPi * sin_pi(0.4) * G, 0) * ipow(-(m + 2))) < 1e-9);
        }
}

TEST_CASE("gamma_coeff") {
    CHECK(gamma_coeff(0, 0.7, 0.0) == std::complex<double>(1.0, 0.0));
    CHECK(gamma_coeff(3, 0.7, 0.0) == std::complex<double>(0.0, 0.0));
    double sum = std::norm(gamma_coeff(0, 0.3, 0.6));
    for (int m = 1; m < 400; ++m) sum += std::norm(gamma_coeff(m, 0.3, 0.6)) + std::norm(gamma_coeff(-m, 0.3, 0.6));
    CHECK(std::abs(sum - 1.0) < 1e-10);
    CHECK(std::abs(gamma_coeff(2, 1.4, 0.5) - fourier(2, 1.4, 0.5)) < 1e-9);
}

TEST_CASE("gamma_coeff_p phases") {
    CavityConfig c;
    c.K = 3;
    c.R1 = c.R2 = 0.99;
    c.alpha = 0.2;
    CHECK(gamma_coeff_p(0, 0.5, 0, c) == std::complex<double>(1.0, 0.0));
    CHECK(std::abs(gamma_coeff_p(2, 0.5, 0, c)) == 0.0);
    const std::complex<double> g = gamma_coeff(2, 0.5, beta_p(c, 3));
    CHECK(std::abs(gamma_coeff_p(2, 0.5, 3, c) - std::complex<double>(0, 1) * g) < 1e-15);
    CHECK(std::abs(std::abs(gamma_coeff_p(2, 0.37, 5, c)) - std::abs(gamma_coeff(2, 0.37, beta_p(c, 5)))) < 1e-15);
}

TEST_CASE("zeta_u and xi") {
    CavityConfig c;
    c.R1 = c.R2 = std::exp(-0.01);
    CHECK(zeta_u(0.0, c) == doctest::Approx(1.0));
    double li2 = 0.0;
    for (int l = 1; l < 200000; ++l) li2 += std::exp(-0.01 * l) / (double(l) * l);
    CHECK(xi(0.0, c) == doctest::Approx(li2).epsilon(1e-10));
    CHECK_THROWS_AS(zeta_u(0.005, c), EnergyDivergence);
}
