#include "dce/homography.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dce {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDetDrift = 1e-12;

double wrap_pi(double x) { return std::remainder(x, kTwoPi); }

}  // namespace

cplx ipow(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

HomographicMap::HomographicMap(cplx a, cplx b, double omega) : a_(a), b_(b), omega_(omega) {
    init(std::arg(a));
}

HomographicMap::HomographicMap(cplx a, cplx b, double omega, double lifted_phase)
    : a_(a), b_(b), omega_(omega) {
    init(lifted_phase);
}

void HomographicMap::init(double lifted_phase) {
    if (!(omega_ > 0.0) || !std::isfinite(omega_))
        throw std::invalid_argument("HomographicMap: omega must be positive and finite");
    // drift measured against |a|² + |b|², the rounding scale of the determinant
    const double det = determinant();
    const double scale = std::norm(a_) + std::norm(b_);
    if (!std::isfinite(scale)) throw std::invalid_argument("HomographicMap: non-finite entries");
    if (std::abs(det - 1.0) > kDetDrift * scale) {
        if (!(det > 0.0)) throw std::invalid_argument("HomographicMap: |a|^2 - |b|^2 must be positive");
        const double s = std::sqrt(det);
        a_ /= s;
        b_ /= s;
    }
    if (std::abs(wrap_pi(lifted_phase - std::arg(a_))) > 1e-9)
        throw std::invalid_argument("HomographicMap: lifted phase inconsistent with arg(a)");
    theta_ = lifted_phase;
    alpha_ = std::asinh(std::abs(b_));
    psi0_ = std::arg(b_) - std::arg(a_);
}

HomographicMap HomographicMap::identity(double omega) { return {cplx{1.0, 0.0}, cplx{0.0, 0.0}, omega, 0.0}; }

HomographicMap HomographicMap::from_rapidity(double alpha, double phi_a, double phi_b, double omega) {
    const cplx b = std::polar(std::sinh(std::abs(alpha)), phi_b) * (alpha < 0.0 ? -1.0 : 1.0);
    return {std::polar(std::cosh(alpha), phi_a), b, omega, phi_a};
}

HomographicMap HomographicMap::translation(double shift, double omega) {
    const double theta = 0.5 * omega * shift;
    return {std::polar(1.0, theta), cplx{0.0, 0.0}, omega, theta};
}

double HomographicMap::velocity() const { return std::tanh(alpha_); }

std::pair<double, double> HomographicMap::denominator(double u) const {
    // ψ = φb − φa − Ωu; |a + b e^{−iΩu}|² = e^{2α}cos²(ψ/2) + e^{−2α}sin²(ψ/2)
    const double half = 0.5 * wrap_pi(psi0_ - omega_ * u);
    const double c2 = std::cos(half) * std::cos(half);
    const double s2 = std::sin(half) * std::sin(half);
    const double value = std::exp(2.0 * alpha_) * c2 + std::exp(-2.0 * alpha_) * s2;
    const double minus_one = std::expm1(2.0 * alpha_) * c2 + std::expm1(-2.0 * alpha_) * s2;
    return {value, minus_one};
}

double HomographicMap::branch_arg(double u) const {
    if (alpha_ == 0.0) return 0.0;
    // 1 + c e^{iψ}, c = th α; real part written as (1 − c) + 2c cos²(ψ/2)
    const double psi = wrap_pi(psi0_ - omega_ * u);
    const double c = std::tanh(alpha_);
    const double one_minus_c = 2.0 / (std::exp(2.0 * alpha_) + 1.0);
    const double ch = std::cos(0.5 * psi);
    return std::atan2(c * std::sin(psi), one_minus_c + 2.0 * c * ch * ch);
}

double HomographicMap::apply(double u) const { return u + 2.0 * (theta_ + branch_arg(u)) / omega_; }

double HomographicMap::increment(double u1, double u2) const {
    const double du = u2 - u1;
    if (alpha_ == 0.0) return du;
    // ratio (1 + c z2)/(1 + c z1) = 1 + c z1 (e^{−iΩΔ} − 1)/(1 + c z1)
    const cplx c = b_ / a_;
    const cplx z1 = std::polar(1.0, -omega_ * u1);
    const double half = 0.5 * omega_ * du;
    const cplx dz = cplx{0.0, -2.0 * std::sin(half)} * std::polar(1.0, -half);
    const cplx delta = c * z1 * dz / (1.0 + c * z1);
    return du + 2.0 * std::atan2(delta.imag(), 1.0 + delta.real()) / omega_;
}

double HomographicMap::derivative(double u) const { return 1.0 / denominator(u).first; }

double HomographicMap::derivative_minus_one(double u) const {
    const auto [d, dm1] = denominator(u);
    return -dm1 / d;
}

double HomographicMap::schwarzian(double u) const {
    // 1 − h′² = (D − 1)(D + 1)/D²
    const auto [d, dm1] = denominator(u);
    return 0.5 * omega_ * omega_ * dm1 * (d + 1.0) / (d * d);
}

HomographicMap HomographicMap::inverse() const { return {std::conj(a_), -b_, omega_, -theta_}; }

HomographicMap compose(const HomographicMap& h, const HomographicMap& g) {
    if (h.omega() != g.omega()) throw std::invalid_argument("compose: frequency mismatch");
    const cplx a = h.a() * g.a() + h.b() * std::conj(g.b());
    const cplx b = h.a() * g.b() + h.b() * std::conj(g.a());
    const double theta = h.lifted_phase() + g.lifted_phase() +
                         std::arg(1.0 + h.b() * std::conj(g.b()) / (h.a() * g.a()));
    return {a, b, h.omega(), theta};
}

std::pair<HomographicMap, HomographicMap> mirror_matrices(int K, double alpha, double omega) {
    if (K < 1) throw std::invalid_argument("mirror_matrices: K must be >= 1");
    if (!(alpha >= 0.0)) throw std::invalid_argument("mirror_matrices: alpha must be >= 0");
    const double ch = std::cosh(alpha);
    const double sh = std::sinh(alpha);
    const double lift = 0.5 * K * std::numbers::pi;
    HomographicMap h(ipow(-K) * ch, ipow(K + 1) * sh, omega, -lift);
    HomographicMap g(ipow(K) * ch, ipow(-(K + 1)) * sh, omega, lift);
    return {h, g};
}

}  // namespace dce
