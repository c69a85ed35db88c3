#pragma once

#include <complex>
#include <utility>

namespace dce {

using cplx = std::complex<double>;

/**
 * Möbius action on the phase circle: e^{iΩh(u)} = (a e^{iΩu} + b)/(b* e^{iΩu} + a*),
 * with |a|² − |b|² = 1.
 *
 * The matrix fixes h only modulo 2π/Ω, so the map also carries a real lifted phase
 * θ with e^{iθ} = a/|a|. The lift selects the branch h(u) = u + 2(θ + arg(1 + (b/a)e^{−iΩu}))/Ω
 * and is propagated exactly through composition.
 */
class HomographicMap {
public:
    /// Identity map at frequency Ω = 1.
    HomographicMap() = default;

    /// Lift taken as the principal argument of a. Throws std::invalid_argument if
    /// |a|² − |b|² ≤ 0 or omega ≤ 0; renormalizes when the determinant drifts.
    HomographicMap(cplx a, cplx b, double omega);

    /// Explicit lift; must agree with arg(a) modulo 2π.
    HomographicMap(cplx a, cplx b, double omega, double lifted_phase);

    static HomographicMap identity(double omega = 1.0);

    /// a = e^{iφa} ch α, b = e^{iφb} sh α with lift φa.
    static HomographicMap from_rapidity(double alpha, double phi_a, double phi_b, double omega = 1.0);

    /// Rigid translation h(u) = u + shift.
    static HomographicMap translation(double shift, double omega = 1.0);

    [[nodiscard]] cplx a() const { return a_; }
    [[nodiscard]] cplx b() const { return b_; }
    [[nodiscard]] double omega() const { return omega_; }
    [[nodiscard]] double lifted_phase() const { return theta_; }
    [[nodiscard]] double phi_a() const { return std::arg(a_); }
    [[nodiscard]] double phi_b() const { return std::arg(b_); }
    /// α = asinh|b|.
    [[nodiscard]] double rapidity() const { return alpha_; }
    /// β = th α.
    [[nodiscard]] double velocity() const;
    [[nodiscard]] double determinant() const { return std::norm(a_) - std::norm(b_); }

    [[nodiscard]] double apply(double u) const;
    /// h(u2) − h(u1) without cancellation for close arguments.
    [[nodiscard]] double increment(double u1, double u2) const;
    [[nodiscard]] double derivative(double u) const;
    /// h′(u) − 1, accurate when α is small.
    [[nodiscard]] double derivative_minus_one(double u) const;
    /// (Ω²/2)(1 − h′²).
    [[nodiscard]] double schwarzian(double u) const;

    [[nodiscard]] HomographicMap inverse() const;

private:
    void init(double lifted_phase);
    /// |a + b e^{−iΩu}|², returned as (value, value − 1).
    [[nodiscard]] std::pair<double, double> denominator(double u) const;
    /// arg(1 + (b/a) e^{−iΩu}).
    [[nodiscard]] double branch_arg(double u) const;

    cplx a_{1.0, 0.0};
    cplx b_{0.0, 0.0};
    double omega_ = 1.0;
    double theta_ = 0.0;
    double alpha_ = 0.0;
    double psi0_ = 0.0;  // φb − φa
};

/// A(h∘g) = A(h)·A(g). Throws std::invalid_argument on frequency mismatch.
HomographicMap compose(const HomographicMap& h, const HomographicMap& g);

/// Maps (h, g) of the two cavity mirrors for Ω L = Kπ.
std::pair<HomographicMap, HomographicMap> mirror_matrices(int K, double alpha, double omega = 1.0);

/// i^n for integer n (exact).
cplx ipow(int n);

}  // namespace dce
