#pragma once

#include <complex>
#include <cstddef>

#include "dce/iteration.hpp"

namespace dce {

struct SeriesControl {
    double rel_tol = 1e-12;
    std::size_t max_terms = 1000000;
    void validate() const;
};

/// ln Γ(x) for x > 0; std::domain_error otherwise.
double log_gamma(double x);
/// ψ(x) for x > 0.
double digamma(double x);
/// sin(πx), exactly zero at integers.
double sin_pi(double x);

/**
 * G_m(ν, β) = β^m Σ_l Γ(ν+l)Γ(m−ν+l)/Γ(m+1+l) · β^{2l}/l!, for 0 < ν < m and |β| < 1.
 *
 * Uses the power series in β² for moderate β and the logarithmic expansion about β² = 1
 * when m(1 − β²) is small. Throws std::domain_error outside the domain and
 * dce::ResourceError when max_terms is exhausted.
 */
double hyper_G(int m, double nu, double beta, const SeriesControl& ctl = {});

/// Fourier coefficient γ_m of e^{2iν̄ΩQ(u)} = Σ_m γ_m e^{−imΩu} for the canonical homographic mirror.
std::complex<double> gamma_coeff(int m, double nubar, double beta, const SeriesControl& ctl = {});

/// γ_{m,p}: γ_m at β_p with the propagation phase e^{iKπν̄p}.
std::complex<double> gamma_coeff_p(int m, double nubar, int p, const CavityConfig& cfg,
                                   const SeriesControl& ctl = {});

/// ζ_u(α) for the right-going output. Throws EnergyDivergence for α ≥ ρ.
double zeta_u(double alpha, const CavityConfig& cfg);
/// ζ_u(α) − 1 without cancellation.
double zeta_u_minus_one(double alpha, const CavityConfig& cfg);

/// ξ(α) = Σ_{l≥1} e^{2l(α−ρ)}/(l² ch 2αl).
double xi(double alpha, const CavityConfig& cfg, const SeriesControl& ctl = {});

namespace detail {

/// ln(Γ(ν)Γ(m−ν)/Γ(m+1)).
double g_log_leading(int m, double nu);

/// Coefficients of the expansion about β² = 1:
/// G_m/β^m = 1/(ν(m−ν)) + Σ_n d_n y^{n+1}(ln y + e_n), y = 1 − β².
struct ConnectionTerm {
    double d = 0.0;
    double e = 0.0;
};
void connection_terms(int m, double nu, std::size_t count, ConnectionTerm* out);

}  // namespace detail

}  // namespace dce
