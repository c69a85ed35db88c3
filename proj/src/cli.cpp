#include "dce/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "dce/checks.hpp"
#include "dce/errors.hpp"

namespace dce::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kPi = std::numbers::pi;

struct Names {
    Command command;
    const char* name;
};
constexpr Names kCommands[] = {{Command::energy_density, "energy-density"},
                               {Command::spectrum, "spectrum"},
                               {Command::energy, "energy"},
                               {Command::sweep, "sweep"},
                               {Command::verify, "verify"}};

std::string command_name(Command c) {
    for (const auto& n : kCommands)
        if (n.command == c) return n.name;
    return "?";
}

Command parse_command(const std::string& s) {
    for (const auto& n : kCommands)
        if (s == n.name) return n.command;
    throw std::invalid_argument("unknown command '" + s + "'");
}

std::string denominators_name(Denominators d) { return d == Denominators::dynamic ? "dynamic" : "static"; }

Denominators parse_denominators(const std::string& s) {
    if (s == "static") return Denominators::static_rest;
    if (s == "dynamic") return Denominators::dynamic;
    throw std::invalid_argument("denominators must be static or dynamic");
}

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw std::invalid_argument("format must be csv or json");
}

/// Reads an object, rejecting keys outside `allowed`.
void expect_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw std::invalid_argument(std::string(where) + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) known = known || it.key() == k;
        if (!known) throw std::invalid_argument(std::string(where) + ": unknown field '" + it.key() + "'");
    }
}

template <typename T>
void read(const json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

std::string status_name(const CavityConfig& c) {
    try {
        return to_string(threshold_status(c));
    } catch (const std::exception&) {
        return "invalid";
    }
}

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

class Pool {
public:
    /// Runs body(i) for i < n on up to `threads` workers; first exception rethrown.
    template <typename F>
    static void run(std::size_t n, unsigned threads, F body) {
        const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
        if (t == 1) {
            for (std::size_t i = 0; i < n; ++i) body(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(t);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < t; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < n; i = next++) body(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
};

std::string csv_bool(bool b) { return b ? "true" : "false"; }

// ------------------------------------------------------------ command bodies

std::string single_density(const RunConfig& cfg) {
    const double period = 2.0 * kPi / cfg.mirror.omega;
    std::vector<double> e(cfg.points);
    std::vector<double> split(cfg.points);
    const HomographicMap V = cfg.mirror.map();
    RayMapView view{[&](double x) { return V.apply(x); }, [&](double x) { return V.derivative(x); },
                    [&](double x1, double x2) { return V.increment(x1, x2); }};
    Pool::run(cfg.points, cfg.threads, [&](std::size_t k) {
        const double u = period * static_cast<double>(k) / static_cast<double>(cfg.points);
        e[k] = energy_density_single(cfg.mirror, u) / (cfg.mirror.omega * cfg.mirror.omega);
        split[k] = cfg.mirror.R * point_split_density(view, u, cfg.mirror.omega, cfg.grid).value /
                   (cfg.mirror.omega * cfg.mirror.omega);
    });
    if (cfg.format == Format::json) {
        json j;
        std::vector<double> uk(cfg.points);
        for (std::size_t k = 0; k < cfg.points; ++k) uk[k] = static_cast<double>(k) / static_cast<double>(cfg.points);
        j["u_over_period"] = uk;
        j["e_u_in_hbar_Omega2"] = e;
        j["e_u_point_split"] = split;
        return j.dump(2) + "\n";
    }
    std::string s = "u_over_period,e_u_in_hbar_Omega2,e_u_point_split\n";
    for (std::size_t k = 0; k < cfg.points; ++k)
        s += format_double(static_cast<double>(k) / static_cast<double>(cfg.points)) + "," + format_double(e[k]) + "," +
             format_double(split[k]) + "\n";
    return s;
}

DensityOptions density_options(const RunConfig& cfg) {
    DensityOptions o;
    o.denominators = cfg.denominators;
    o.tail_tol = cfg.tail_tol;
    return o;
}

std::string single_spectrum(const RunConfig& cfg) {
    std::vector<double> nu(cfg.points);
    std::vector<double> n(cfg.points);
    Pool::run(cfg.points, cfg.threads, [&](std::size_t k) {
        nu[k] = cfg.nu_max * static_cast<double>(k + 1) / static_cast<double>(cfg.points);
        n[k] = spectrum_single(cfg.mirror, nu[k], cfg.series);
    });
    if (cfg.format == Format::json) {
        json j;
        j["nu"] = nu;
        j["n_nu"] = n;
        return j.dump(2) + "\n";
    }
    std::string s = "nu,n_nu\n";
    for (std::size_t k = 0; k < cfg.points; ++k) s += format_double(nu[k]) + "," + format_double(n[k]) + "\n";
    return s;
}

json energy_json(const CavityConfig& c) {
    const EnergyReport r = radiated_energy(c);
    json j;
    j["K"] = c.K;
    j["R1"] = c.R1;
    j["R2"] = c.R2;
    j["alpha"] = c.alpha;
    j["rho"] = c.rho();
    j["alpha_eff"] = number(c.alpha_eff());
    j["threshold_status"] = status_name(c);
    j["E_u"] = r.E_u;
    j["E_v"] = r.E_v;
    j["E_total"] = r.E_total;
    j["E_intracavity"] = r.E_intracavity;
    j["approx_E"] = number(r.approx_E);
    j["approx_intracavity"] = number(r.approx_intracavity);
    j["approx_valid"] = r.approx_valid;
    j["balance_ratio"] = number(r.balance_ratio);
    j["balance_regime"] = r.balance_regime;
    return j;
}

constexpr const char* kEnergyColumns[] = {"E_u",      "E_v",          "E_total",       "E_intracavity",
                                          "approx_E", "approx_intracavity", "approx_valid", "balance_ratio",
                                          "balance_regime"};

std::string energy_row(const json& j) {
    std::string s;
    for (const char* k : kEnergyColumns) {
        s += ",";
        const json& v = j.at(k);
        if (v.is_boolean()) s += csv_bool(v.get<bool>());
        else if (v.is_number()) s += format_double(v.get<double>());
    }
    return s;
}

std::string energy(const RunConfig& cfg) {
    if (cfg.single) {
        const SingleEnergy e = energy_per_period_single(cfg.mirror, cfg.grid);
        json j;
        j["R"] = cfg.mirror.R;
        j["alpha"] = cfg.mirror.alpha;
        j["E_u"] = e.closed_form;
        j["E_u_quadrature"] = e.quadrature;
        if (cfg.format == Format::json) return j.dump(2) + "\n";
        return "R,alpha,E_u,E_u_quadrature\n" + format_double(cfg.mirror.R) + "," + format_double(cfg.mirror.alpha) +
               "," + format_double(e.closed_form) + "," + format_double(e.quadrature) + "\n";
    }
    const json j = energy_json(cfg.cavity);
    if (cfg.format == Format::json) return j.dump(2) + "\n";
    std::string s = "K,R1,R2,alpha,threshold_status";
    for (const char* k : kEnergyColumns) s += std::string(",") + k;
    s += "\n" + std::to_string(cfg.cavity.K) + "," + format_double(cfg.cavity.R1) + "," + format_double(cfg.cavity.R2) +
         "," + format_double(cfg.cavity.alpha) + "," + j.at("threshold_status").get<std::string>() + energy_row(j) + "\n";
    return s;
}

struct SweepRow {
    std::size_t index = 0;
    int K = 1;
    double rho = 0.0;
    double ratio = 0.0;
    double alpha = 0.0;
    std::string status;
    json report;
    std::string error;
};

std::vector<SweepRow> sweep_rows(const RunConfig& cfg) {
    std::vector<SweepRow> rows;
    for (int K : cfg.sweep.K)
        for (double rho : cfg.sweep.rho)
            for (double ratio : cfg.sweep.alpha_over_rho) {
                SweepRow r;
                r.index = rows.size();
                r.K = K;
                r.rho = rho;
                r.ratio = ratio;
                r.alpha = ratio * rho;
                rows.push_back(r);
            }
    Pool::run(rows.size(), cfg.threads, [&](std::size_t i) {
        SweepRow& r = rows[i];
        try {
            CavityParams p;
            p.K = r.K;
            p.omega = cfg.cavity.omega;
            p.rho = r.rho;
            p.alpha = r.alpha;
            const CavityConfig c = make_cavity(p);
            r.status = status_name(c);
            r.report = energy_json(c);
        } catch (const EnergyDivergence&) {
            r.error = "EnergyDivergence";
        } catch (const DensityDivergence&) {
            r.error = "DensityDivergence";
        } catch (const ResourceError&) {
            r.error = "ResourceError";
        } catch (const std::exception&) {
            r.error = "InvalidConfig";
            r.status = "invalid";
        }
    });
    return rows;
}

std::vector<checks::Check> cli_checks();

std::string verify(const RunConfig& cfg, bool* failed) {
    std::vector<checks::Check> all = checks::acceptance();
    const auto& inv = checks::invariants();
    all.insert(all.end(), inv.begin(), inv.end());
    const auto extra = cli_checks();
    all.insert(all.end(), extra.begin(), extra.end());
    if (!cfg.only.empty()) {
        std::vector<checks::Check> kept;
        for (const auto& id : cfg.only) {
            const auto it = std::find_if(all.begin(), all.end(), [&](const checks::Check& c) { return c.id == id; });
            if (it == all.end()) throw std::invalid_argument("verify: unknown check id '" + id + "'");
            kept.push_back(*it);
        }
        all = std::move(kept);
    }
    std::vector<checks::Result> results(all.size());
    Pool::run(all.size(), cfg.threads, [&](std::size_t i) { results[i] = checks::run(all[i], cfg.breach); });
    std::size_t width = 0;
    for (const auto& r : results) width = std::max(width, r.id.size());
    std::string s;
    int fails = 0;
    double total = 0.0;
    for (const auto& r : results) {
        char head[128];
        std::snprintf(head, sizeof head, "%s  %-*s  %6.2fs  ", r.pass ? "PASS" : "FAIL", static_cast<int>(width),
                      r.id.c_str(), r.seconds);
        s += head + r.description + ": " + r.detail + "\n";
        fails += r.pass ? 0 : 1;
        total += r.seconds;
    }
    char tail[128];
    std::snprintf(tail, sizeof tail, "%zu checks, %d failed, %.1f s check time\n", results.size(), fails, total);
    s += tail;
    if (failed) *failed = fails > 0;
    return s;
}

// ------------------------------------------------------------ cli invariants

RunConfig sample_config() {
    RunConfig c;
    c.command = Command::spectrum;
    CavityParams p;
    p.K = 3;
    p.r = 0.99;
    p.alpha_eff = 0.9;
    c.cavity = make_cavity(p);
    c.points = 40;
    c.nu_max = 3.0;
    c.envelope = true;
    c.grid.eps_sequence = {0.01, 0.005, 0.0025};
    c.sweep = {{0.1, 0.3, 0.45, 1.0}, {0.005, 0.01, 0.05}, {1, 3}};
    return c;
}

checks::Result check_round_trip() {
    checks::Result r;
    const RunConfig c = sample_config();
    const std::string a = to_json(c);
    const std::string b = to_json(from_json(a));
    const std::string d = to_json(from_json(b));
    r.pass = a == b && b == d && checks::tolerance_scale() > 0.0;
    r.detail = r.pass ? "serialize(deserialize(doc)) byte-identical" : "round trip changed the document";
    return r;
}

checks::Result check_determinism() {
    checks::Result r;
    RunConfig c = sample_config();
    c.threads = 1;
    const std::string s1 = spectrum_csv(c);
    const std::string w1 = sweep_csv(c);
    const std::string s1_again = spectrum_csv(c);
    c.threads = 4;
    const std::string s4 = spectrum_csv(c);
    const std::string w4 = sweep_csv(c);
    c.command = Command::energy_density;
    c.points = 64;
    c.cavity.alpha *= 0.5;
    c.threads = 1;
    const std::string d1 = energy_density_csv(c);
    c.threads = 3;
    const std::string d3 = energy_density_csv(c);
    r.pass = s1 == s4 && s1 == s1_again && w1 == w4 && d1 == d3 && checks::tolerance_scale() > 0.0;
    r.detail = r.pass ? "spectrum, density and sweep CSV byte-equal for 1 and several threads"
                      : "CSV differs across runs or thread counts";
    return r;
}

std::vector<checks::Check> cli_checks() {
    return {{"cli.round_trip", "config JSON round trip", check_round_trip},
            {"cli.csv_determinism", "CSV bytes independent of runs and threads", check_determinism}};
}

}  // namespace

// ------------------------------------------------------------ public

void RunConfig::validate() const {
    if (single) mirror.validate();
    else cavity.validate();
    grid.validate();
    series.validate();
    if (points == 0) throw std::invalid_argument("points must be positive");
    if (!(nu_max > 0.0)) throw std::invalid_argument("nu_max must be positive");
    if (!(tail_tol > 0.0)) throw std::invalid_argument("tail_tol must be positive");
    if (threads == 0) throw std::invalid_argument("threads must be positive");
    if (command == Command::sweep) {
        if (single) throw std::invalid_argument("sweep applies to the cavity only");
        if (sweep.alpha_over_rho.empty() || sweep.rho.empty() || sweep.K.empty())
            throw std::invalid_argument("sweep needs alpha_over_rho, rho and K lists");
    }
}

unsigned default_threads() {
    if (const char* env = std::getenv("DCE_THREADS")) {
        unsigned v = 0;
        const auto [p, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), v);
        if (ec == std::errc() && *p == '\0' && v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string to_json(const RunConfig& c) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command_name(c.command);
    json phys;
    if (c.single) {
        phys["kind"] = "single";
        phys["R"] = c.mirror.R;
        phys["alpha"] = c.mirror.alpha;
        phys["omega"] = c.mirror.omega;
    } else {
        phys["kind"] = "cavity";
        phys["K"] = c.cavity.K;
        phys["omega"] = c.cavity.omega;
        phys["R1"] = c.cavity.R1;
        phys["R2"] = c.cavity.R2;
        phys["alpha"] = c.cavity.alpha;
    }
    j["physics"] = phys;
    j["grid"] = {{"points_per_period", c.grid.points_per_period}, {"eps_sequence", c.grid.eps_sequence}};
    j["series"] = {{"rel_tol", c.series.rel_tol}, {"max_terms", c.series.max_terms}};
    j["sampling"] = {{"points", c.points},
                     {"nu_max", c.nu_max},
                     {"envelope", c.envelope},
                     {"denominators", denominators_name(c.denominators)},
                     {"tail_tol", c.tail_tol},
                     {"threads", c.threads}};
    j["sweep"] = {{"alpha_over_rho", c.sweep.alpha_over_rho}, {"rho", c.sweep.rho}, {"K", c.sweep.K}};
    j["output"] = {{"path", c.out}, {"format", c.format == Format::json ? "json" : "csv"}};
    if (!c.breach.empty()) j["inject_breach"] = c.breach;
    if (!c.only.empty()) j["only"] = c.only;
    return j.dump(2) + "\n";
}

RunConfig from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    try {
        expect_keys(j, "config",
                    {"schema_version", "command", "physics", "grid", "series", "sampling", "sweep", "output",
                     "inject_breach", "only"});
        if (!j.contains("schema_version")) throw std::invalid_argument("config: schema_version is required");
        if (j.at("schema_version").get<int>() != kSchemaVersion)
            throw std::invalid_argument("config: unsupported schema_version");
        RunConfig c;
        if (j.contains("command")) c.command = parse_command(j.at("command").get<std::string>());
        if (j.contains("physics")) {
            const json& p = j.at("physics");
            const std::string kind = p.value("kind", "cavity");
            if (kind == "single") {
                expect_keys(p, "physics", {"kind", "R", "alpha", "omega"});
                c.single = true;
                read(p, "R", c.mirror.R);
                read(p, "alpha", c.mirror.alpha);
                read(p, "omega", c.mirror.omega);
            } else if (kind == "cavity") {
                expect_keys(p, "physics", {"kind", "K", "omega", "R1", "R2", "alpha"});
                read(p, "K", c.cavity.K);
                read(p, "omega", c.cavity.omega);
                read(p, "R1", c.cavity.R1);
                read(p, "R2", c.cavity.R2);
                read(p, "alpha", c.cavity.alpha);
            } else {
                throw std::invalid_argument("physics: kind must be cavity or single");
            }
        }
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            expect_keys(g, "grid", {"points_per_period", "eps_sequence"});
            read(g, "points_per_period", c.grid.points_per_period);
            read(g, "eps_sequence", c.grid.eps_sequence);
        }
        if (j.contains("series")) {
            const json& s = j.at("series");
            expect_keys(s, "series", {"rel_tol", "max_terms"});
            read(s, "rel_tol", c.series.rel_tol);
            read(s, "max_terms", c.series.max_terms);
        }
        if (j.contains("sampling")) {
            const json& s = j.at("sampling");
            expect_keys(s, "sampling", {"points", "nu_max", "envelope", "denominators", "tail_tol", "threads"});
            read(s, "points", c.points);
            read(s, "nu_max", c.nu_max);
            read(s, "envelope", c.envelope);
            if (s.contains("denominators")) c.denominators = parse_denominators(s.at("denominators").get<std::string>());
            read(s, "tail_tol", c.tail_tol);
            read(s, "threads", c.threads);
        }
        if (j.contains("sweep")) {
            const json& s = j.at("sweep");
            expect_keys(s, "sweep", {"alpha_over_rho", "rho", "K"});
            read(s, "alpha_over_rho", c.sweep.alpha_over_rho);
            read(s, "rho", c.sweep.rho);
            read(s, "K", c.sweep.K);
        }
        if (j.contains("output")) {
            const json& o = j.at("output");
            expect_keys(o, "output", {"path", "format"});
            read(o, "path", c.out);
            if (o.contains("format")) c.format = parse_format(o.at("format").get<std::string>());
        }
        read(j, "inject_breach", c.breach);
        read(j, "only", c.only);
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

std::string energy_density_csv(const RunConfig& cfg) {
    if (cfg.single) return single_density(cfg);
    const DensitySamples s = sample_density_cavity(cfg.cavity, cfg.points, density_options(cfg), cfg.threads);
    const double scale = cfg.cavity.omega * cfg.cavity.omega;
    if (cfg.format == Format::json) {
        json j;
        j["u_over_period"] = s.u_over_period;
        std::vector<double> e = s.e_u;
        for (double& x : e) x /= scale;
        j["e_u_in_hbar_Omega2"] = e;
        j["max_round_trips"] = s.max_round_trips;
        j["max_tail_bound"] = s.max_tail_bound;
        return j.dump(2) + "\n";
    }
    std::string out = "u_over_period,e_u_in_hbar_Omega2\n";
    for (std::size_t k = 0; k < s.e_u.size(); ++k)
        out += format_double(s.u_over_period[k]) + "," + format_double(s.e_u[k] / scale) + "\n";
    return out;
}

std::string spectrum_csv(const RunConfig& cfg) {
    if (cfg.single) return single_spectrum(cfg);
    const SpectrumSamples s = sample_spectrum_cavity(cfg.cavity, cfg.nu_max, cfg.points, cfg.envelope, {}, cfg.threads);
    if (cfg.format == Format::json) {
        json j;
        j["nu"] = s.nu;
        j["n_nu"] = s.n_nu;
        if (cfg.envelope) j["n_nu_envelope"] = s.n_nu_envelope;
        j["m_used_max"] = s.m_used_max;
        j["round_trips"] = s.round_trips;
        j["max_tail_estimate"] = number(s.max_tail_estimate);
        return j.dump(2) + "\n";
    }
    std::string out = cfg.envelope ? "nu,n_nu,n_nu_envelope\n" : "nu,n_nu\n";
    for (std::size_t k = 0; k < s.nu.size(); ++k) {
        out += format_double(s.nu[k]) + "," + format_double(s.n_nu[k]);
        if (cfg.envelope) out += "," + format_double(s.n_nu_envelope[k]);
        out += "\n";
    }
    return out;
}

std::string sweep_csv(const RunConfig& cfg) {
    const std::vector<SweepRow> rows = sweep_rows(cfg);
    if (cfg.format == Format::json) {
        json arr = json::array();
        for (const auto& r : rows) {
            json j;
            j["index"] = r.index;
            j["K"] = r.K;
            j["rho"] = r.rho;
            j["alpha_over_rho"] = r.ratio;
            j["alpha"] = r.alpha;
            if (!r.error.empty()) {
                j["threshold_status"] = r.status.empty() ? "energy_divergent" : r.status;
                j["error"] = r.error;
            } else {
                j["report"] = r.report;
            }
            arr.push_back(j);
        }
        return arr.dump(2) + "\n";
    }
    std::string out = "index,K,rho,alpha_over_rho,alpha,alpha_eff,threshold_status";
    for (const char* k : kEnergyColumns) out += std::string(",") + k;
    out += ",error\n";
    for (const auto& r : rows) {
        out += std::to_string(r.index) + "," + std::to_string(r.K) + "," + format_double(r.rho) + "," +
               format_double(r.ratio) + "," + format_double(r.alpha) + ",";
        if (r.error.empty()) {
            const json& a = r.report.at("alpha_eff");
            out += (a.is_number() ? format_double(a.get<double>()) : "") + "," + r.status + energy_row(r.report) + ",\n";
        } else {
            out += format_double(2.0 * r.ratio) + "," + (r.status.empty() ? "energy_divergent" : r.status);
            for (std::size_t i = 0; i < std::size(kEnergyColumns); ++i) out += ",";
            out += "," + r.error + "\n";
        }
    }
    return out;
}

std::string execute(const RunConfig& cfg, bool* failed) {
    cfg.validate();
    if (failed) *failed = false;
    switch (cfg.command) {
        case Command::energy_density: return energy_density_csv(cfg);
        case Command::spectrum: return spectrum_csv(cfg);
        case Command::energy: return energy(cfg);
        case Command::sweep: return sweep_csv(cfg);
        case Command::verify: return verify(cfg, failed);
    }
    throw std::logic_error("unreachable");
}

namespace {

/// Flags shared by the physics subcommands; unset optionals leave the loaded config alone.
struct Flags {
    std::string config;
    bool dump_config = false;
    std::optional<int> K;
    std::optional<double> omega, alpha, alpha_eff, r, rho, R1, R2, R;
    bool single = false;
    std::optional<std::size_t> points;
    std::optional<double> nu_max;
    std::optional<int> eps_levels;
    std::optional<double> tol;
    std::optional<std::string> out, format, denominators;
    bool envelope = false;
    std::optional<unsigned> threads;
    std::vector<double> sweep_ratio, sweep_rho;
    std::vector<int> sweep_K;
    std::string breach;
    std::vector<std::string> only;
};

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config, "JSON run configuration to start from");
    app->add_flag("--dump-config", f.dump_config, "print the resolved configuration as JSON and exit");
    app->add_option("--threads", f.threads, "worker threads (default: DCE_THREADS or hardware concurrency)")
        ->check(CLI::PositiveNumber);
    app->add_option("--out", f.out, "output file (default: standard output)");
    app->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void add_physics(CLI::App* app, Flags& f, bool sweep) {
    if (!sweep) {
        app->add_option("--K", f.K, "cavity length in half mechanical wavelengths, Omega L = K pi");
        auto* a = app->add_option("--alpha", f.alpha, "rapidity per reflection");
        auto* ae = app->add_option("--alpha-eff", f.alpha_eff, "effective rapidity 2 alpha / rho");
        a->excludes(ae);
        auto* r = app->add_option("--r", f.r, "round-trip amplitude r = sqrt(R1 R2), sets R1 = R2 = r");
        auto* rho = app->add_option("--rho", f.rho, "inverse finesse, r = exp(-2 rho)");
        auto* r1 = app->add_option("--R1", f.R1, "left mirror reflectivity");
        auto* r2 = app->add_option("--R2", f.R2, "right mirror reflectivity");
        r->excludes(rho)->excludes(r1)->excludes(r2);
        rho->excludes(r1)->excludes(r2);
        auto* single = app->add_flag("--single", f.single, "single mirror instead of the cavity");
        auto* R = app->add_option("--R", f.R, "single-mirror reflectivity");
        R->needs(single);
    } else {
        app->add_option("--alpha-over-rho", f.sweep_ratio, "alpha/rho grid")->delimiter(',');
        app->add_option("--rho", f.sweep_rho, "rho grid")->delimiter(',');
        app->add_option("--K", f.sweep_K, "K grid")->delimiter(',');
    }
    app->add_option("--Omega", f.omega, "mechanical angular frequency (default 1)");
    app->add_option("--points", f.points, "samples per period or spectral samples");
    app->add_option("--nu-max", f.nu_max, "upper end of the spectral grid, in units of Omega");
    app->add_option("--eps-levels", f.eps_levels, "point-splitting levels, eps_k = 0.01 * 2^-k / Omega")
        ->check(CLI::Range(2, 20));
    app->add_option("--tol", f.tol, "relative series tolerance and density tail tolerance");
    app->add_flag("--envelope", f.envelope, "also write the phase-free envelope");
    app->add_option("--denominators", f.denominators, "static or dynamic interference denominators")
        ->check(CLI::IsMember({"static", "dynamic"}));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig resolve(Command cmd, const Flags& f) {
    RunConfig c = f.config.empty() ? RunConfig{} : from_json(read_file(f.config));
    if (f.config.empty()) c.threads = default_threads();
    c.command = cmd;
    const bool cavity_flags = f.K || f.alpha || f.alpha_eff || f.r || f.rho || f.R1 || f.R2;
    if (f.single) {
        c.single = true;
        if (f.alpha_eff || f.r || f.rho || f.R1 || f.R2 || f.K)
            throw std::invalid_argument("--single takes only --alpha, --R and --Omega");
        if (f.alpha) c.mirror.alpha = *f.alpha;
        if (f.R) c.mirror.R = *f.R;
        if (f.omega) c.mirror.omega = *f.omega;
    } else if (cavity_flags || f.omega) {
        c.single = false;
        if (cavity_flags && cmd != Command::sweep) {
            CavityParams p;
            p.K = f.K.value_or(c.cavity.K);
            p.omega = f.omega.value_or(c.cavity.omega);
            p.alpha = f.alpha;
            p.alpha_eff = f.alpha_eff;
            p.r = f.r;
            p.rho = f.rho;
            p.R1 = f.R1;
            p.R2 = f.R2;
            if (!p.alpha && !p.alpha_eff) p.alpha = c.cavity.alpha;
            if (!p.r && !p.rho && !p.R1 && !p.R2) {
                p.R1 = c.cavity.R1;
                p.R2 = c.cavity.R2;
            }
            c.cavity = make_cavity(p);
        } else if (f.omega) {
            c.cavity.omega = *f.omega;
        }
    }
    if (f.points) c.points = *f.points;
    if (f.nu_max) c.nu_max = *f.nu_max;
    if (f.eps_levels) {
        c.grid.eps_sequence.clear();
        for (int k = 0; k < *f.eps_levels; ++k) c.grid.eps_sequence.push_back(std::ldexp(1e-2, -k));
    }
    if (f.tol) {
        c.series.rel_tol = *f.tol;
        c.tail_tol = *f.tol;
    }
    if (f.out) c.out = *f.out;
    if (f.format) c.format = parse_format(*f.format);
    else if (f.config.empty() && cmd == Command::energy) c.format = Format::json;
    if (f.denominators) c.denominators = parse_denominators(*f.denominators);
    if (f.envelope) c.envelope = true;
    if (f.threads) c.threads = *f.threads;
    if (!f.sweep_ratio.empty()) c.sweep.alpha_over_rho = f.sweep_ratio;
    if (!f.sweep_rho.empty()) c.sweep.rho = f.sweep_rho;
    if (!f.sweep_K.empty()) c.sweep.K = f.sweep_K;
    if (!f.breach.empty()) c.breach = f.breach;
    if (!f.only.empty()) c.only = f.only;
    c.validate();
    return c;
}

int report(std::ostream& err, const char* identity, const std::exception& e, int code) {
    err << "error[" << identity << "]: " << e.what() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Radiation from an oscillating mirror or an oscillating high-finesse cavity"};
    app.require_subcommand(1);
    Flags f;
    std::vector<std::pair<CLI::App*, Command>> subs;
    auto* density = app.add_subcommand("energy-density", "time-resolved energy density over one period");
    auto* spectrum = app.add_subcommand("spectrum", "photon-number spectrum n_nu");
    auto* energy = app.add_subcommand("energy", "period-integrated and intracavity energies");
    auto* sweep = app.add_subcommand("sweep", "energy report over a grid in alpha/rho, rho and K");
    auto* verify = app.add_subcommand("verify", "run the acceptance criteria and invariant suite");
    std::string run_config;
    auto* run = app.add_subcommand("run", "execute a JSON run configuration as stored");
    run->add_option("config", run_config, "configuration file")->required();
    for (auto [sub, cmd] : {std::pair{density, Command::energy_density}, std::pair{spectrum, Command::spectrum},
                            std::pair{energy, Command::energy}, std::pair{sweep, Command::sweep}}) {
        add_common(sub, f);
        add_physics(sub, f, cmd == Command::sweep);
        subs.emplace_back(sub, cmd);
    }
    add_common(verify, f);
    verify->add_option("--inject-breach", f.breach, "check id whose tolerances are forced to zero");
    verify->add_option("--only", f.only, "run only these check ids")->delimiter(',');
    subs.emplace_back(verify, Command::verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error[Usage]: " << e.what() << "\n";
        return 2;
    }

    try {
        RunConfig cfg;
        if (run->parsed()) {
            cfg = from_json(read_file(run_config));
        } else {
            for (auto [sub, cmd] : subs)
                if (sub->parsed()) cfg = resolve(cmd, f);
            if (f.dump_config) {
                out << to_json(cfg);
                return 0;
            }
        }
        bool failed = false;
        const std::string body = execute(cfg, &failed);
        if (cfg.out.empty()) {
            out << body;
        } else {
            std::ofstream file(cfg.out, std::ios::binary);
            if (!file) throw std::invalid_argument("cannot write " + cfg.out);
            file << body;
            if (!file) throw std::invalid_argument("write failed for " + cfg.out);
        }
        return failed ? 1 : 0;
    } catch (const DensityDivergence& e) {
        return report(err, "DensityDivergence", e, 3);
    } catch (const EnergyDivergence& e) {
        return report(err, "EnergyDivergence", e, 3);
    } catch (const ResourceError& e) {
        return report(err, "ResourceError", e, 4);
    } catch (const std::invalid_argument& e) {
        return report(err, "Usage", e, 2);
    } catch (const std::domain_error& e) {
        return report(err, "Usage", e, 2);
    } catch (const std::exception& e) {
        return report(err, "Internal", e, 4);
    }
}

}  // namespace dce::cli
