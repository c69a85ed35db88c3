#pragma once

#include <stdexcept>
#include <string>

namespace dce {

/// Base for parametric-threshold violations.
class DivergenceError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when r·e^{4α} ≥ 1 (α_eff ≥ 1): the energy density has no finite value.
class DensityDivergence : public DivergenceError {
public:
    explicit DensityDivergence(double alpha_eff)
        : DivergenceError("energy density diverges: alpha_eff = " + std::to_string(alpha_eff) +
                          " >= 1 (beta_eff capped at tanh(1) = 0.7616)"),
          alpha_eff_(alpha_eff) {}
    [[nodiscard]] double alpha_eff() const { return alpha_eff_; }

private:
    double alpha_eff_;
};

/// Raised when α ≥ ρ: the period-integrated energies have no finite value.
class EnergyDivergence : public DivergenceError {
public:
    EnergyDivergence(double alpha, double rho)
        : DivergenceError("radiated energy diverges: alpha = " + std::to_string(alpha) +
                          " >= rho = " + std::to_string(rho)),
          alpha_(alpha), rho_(rho) {}
    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] double rho() const { return rho_; }

private:
    double alpha_;
    double rho_;
};

/// A truncation or iteration budget was exhausted before the requested accuracy.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dce
