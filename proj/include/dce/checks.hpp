#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dce/iteration.hpp"

namespace dce::checks {

struct Result {
    std::string id;
    std::string description;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct Check {
    std::string id;
    std::string description;
    std::function<Result()> run;
};

/// AC1 … AC12.
const std::vector<Check>& acceptance();
/// Module invariants and properties, ids of the form module.name.
const std::vector<Check>& invariants();

/// Runs one check and times it. When `breach` equals the check id every tolerance of that
/// check is scaled to zero, so a harness can confirm that failures are reported.
Result run(const Check& check, const std::string& breach = {});

/// Scale applied by checks to their tolerances (1, or 0 under an injected breach).
double tolerance_scale();

struct PulseMetrics {
    double peak = 0.0;         ///< max_u e_u in ħΩ²
    double peak_u = 0.0;       ///< location, units of the period
    double fwhm = 0.0;         ///< full width at half maximum, units of the period
};
/// Peak and FWHM of the cavity pulse, refined locally around the sampled maximum.
PulseMetrics pulse_metrics(const CavityConfig& cfg, std::size_t points);

struct SpectralPeak {
    double center = 0.0;
    double value = 0.0;
    double half_width = 0.0;  ///< half width at half maximum in ν
};
/// Local maximum of the cavity spectrum within ±window of `guess`, with its half width.
SpectralPeak spectral_peak(const CavityConfig& cfg, double guess, double window);

}  // namespace dce::checks
