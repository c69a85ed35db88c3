#pragma once

#include "dce/homography.hpp"
#include "dce/quadrature.hpp"
#include "dce/specfun.hpp"

namespace dce {

/// One partially transmitting mirror on the homographic world line with a = ch α, b = i sh α.
struct SingleMirrorConfig {
    double R = 1.0;
    double alpha = 0.0;
    double omega = 1.0;

    void validate() const;
    [[nodiscard]] double beta() const;
    [[nodiscard]] HomographicMap map() const;
};

/// e_u(u)/(ħΩ²) = (R/48π)(V′(u)² − 1).
double energy_density_single(const SingleMirrorConfig& cfg, double u);

struct SingleEnergy {
    double closed_form = 0.0;  ///< (R/12) sh²α, in ħΩ
    double quadrature = 0.0;   ///< trapezoid period integral of the density, in ħΩ
};
SingleEnergy energy_per_period_single(const SingleMirrorConfig& cfg, const GridSpec& grid = {});

/// n_ν = R (sin²πν/π²) Σ_{m>ν} ν(m−ν) G_m(ν, β)², exactly zero at integer ν.
double spectrum_single(const SingleMirrorConfig& cfg, double nu, const SeriesControl& ctl = {});

}  // namespace dce
