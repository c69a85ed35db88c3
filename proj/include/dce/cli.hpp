#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "dce/iteration.hpp"
#include "dce/quadrature.hpp"
#include "dce/radiation_cavity.hpp"
#include "dce/radiation_single.hpp"
#include "dce/specfun.hpp"

namespace dce::cli {

inline constexpr int kSchemaVersion = 1;

enum class Command { energy_density, spectrum, energy, sweep, verify };
enum class Format { csv, json };

struct SweepGrid {
    std::vector<double> alpha_over_rho;
    std::vector<double> rho;
    std::vector<int> K;
};

/// Everything one invocation needs. Physics is stored resolved (α, R1, R2), never as α_eff or r.
struct RunConfig {
    Command command = Command::energy_density;
    bool single = false;
    CavityConfig cavity;
    SingleMirrorConfig mirror;
    GridSpec grid;
    SeriesControl series;
    std::size_t points = 4096;
    double nu_max = 3.0;
    bool envelope = false;
    Denominators denominators = Denominators::static_rest;
    double tail_tol = 1e-10;
    unsigned threads = 1;
    SweepGrid sweep;
    std::string breach;             ///< verify: check id whose tolerances are forced to zero
    std::vector<std::string> only;  ///< verify: restrict to these check ids
    std::string out;  ///< empty: standard output
    Format format = Format::csv;

    void validate() const;
};

/// Versioned JSON document; fixed key order.
std::string to_json(const RunConfig& cfg);
/// Throws std::invalid_argument on a wrong schema_version, unknown fields or bad values.
RunConfig from_json(const std::string& text);

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);

/// Output of one run as bytes; identical for identical configs regardless of cfg.threads.
/// Verify output is the pass/fail table; `failed` is set when a check fails.
std::string execute(const RunConfig& cfg, bool* failed = nullptr);

std::string energy_density_csv(const RunConfig& cfg);
std::string spectrum_csv(const RunConfig& cfg);
std::string sweep_csv(const RunConfig& cfg);

/// Default thread count: DCE_THREADS when set, else the hardware concurrency.
unsigned default_threads();

/// Entry point. Exit codes: 0 success, 1 verification failure, 2 usage, 3 divergence, 4 resource.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace dce::cli
