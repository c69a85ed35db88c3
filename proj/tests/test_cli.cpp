#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "dce/cli.hpp"

using namespace dce;

namespace {
struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "dce");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}
}  // namespace

TEST_CASE("energy-density CSV columns") {
    const Outcome o = invoke({"energy-density", "--r", "0.99", "--alpha-eff", "0.9", "--K", "2", "--points", "64", "--threads", "2"});
    REQUIRE(o.code == 0);
    const auto l = lines(o.out);
    CHECK(l.size() == 65);
    CHECK(l[0] == "u_over_period,e_u_in_hbar_Omega2");
    CHECK(o.out.find('\r') == std::string::npos);
}

TEST_CASE("spectrum CSV with envelope") {
    const Outcome o = invoke({"spectrum", "--K", "3", "--alpha-eff", "0.9", "--r", "0.99", "--nu-max", "3", "--envelope", "--points", "12"});
    REQUIRE(o.code == 0);
    const auto l = lines(o.out);
    CHECK(l[0] == "nu,n_nu,n_nu_envelope");
    CHECK(l.size() == 13);
    CHECK(l.back().rfind("3,0,", 0) == 0);
}

TEST_CASE("energy report as JSON") {
    const Outcome o = invoke({"energy", "--K", "1", "--rho", "0.005", "--alpha", "0.002"});
    REQUIRE(o.code == 0);
    CHECK(o.out.find("\"E_total\"") != std::string::npos);
    CHECK(o.out.find("\"balance_ratio\"") != std::string::npos);
}

TEST_CASE("sweep rows") {
    const Outcome o = invoke({"sweep", "--alpha-over-rho", "0.1,0.3,0.45", "--rho", "0.005,0.01,0.05", "--K", "3"});
    REQUIRE(o.code == 0);
    const auto l = lines(o.out);
    REQUIRE(l.size() == 10);
    for (std::size_t i = 1; i < l.size(); ++i) {
        CHECK(l[i].find("divergent") == std::string::npos);
        CHECK(l[i].find("nan") == std::string::npos);
        CHECK(l[i].find("inf") == std::string::npos);
    }
    const Outcome d = invoke({"sweep", "--alpha-over-rho", "0.3,1", "--rho", "0.01", "--K", "2"});
    REQUIRE(d.code == 0);
    CHECK(lines(d.out)[2].find("energy_divergent") != std::string::npos);
    const Outcome t1 = invoke({"sweep", "--alpha-over-rho", "0.1,0.45", "--rho", "0.005,0.05", "--K", "1,3", "--threads", "1"});
    const Outcome t3 = invoke({"sweep", "--alpha-over-rho", "0.1,0.45", "--rho", "0.005,0.05", "--K", "1,3", "--threads", "3"});
    CHECK(t1.out == t3.out);
}

TEST_CASE("exit codes") {
    CHECK(invoke({"energy-density", "--r", "0.99", "--alpha-eff", "1", "--K", "2"}).code == 3);
    CHECK(invoke({"energy", "--rho", "0.01", "--alpha", "0.01"}).code == 3);
    const Outcome u = invoke({"spectrum", "--nope"});
    CHECK(u.code == 2);
    CHECK(invoke({"energy", "--alpha", "0.1", "--alpha-eff", "0.2", "--r", "0.9"}).code == 2);
    CHECK(invoke({"energy-density", "--r", "0.99", "--alpha-eff", "0.9", "--tol", "1e-10", "--points", "4"}).code == 0);
    const Outcome r = invoke({"energy-density", "--r", "0.99", "--alpha-eff", "0.9", "--K", "2", "--points", "8", "--denominators", "dynamic", "--tol", "1e-14"});
    CHECK((r.code == 0 || r.code == 4));
    CHECK(invoke({"verify", "--only", "AC1,AC2"}).code == 0);
    const Outcome b = invoke({"verify", "--only", "AC1", "--inject-breach", "AC1"});
    CHECK(b.code == 1);
    CHECK(b.out.find("FAIL  AC1") != std::string::npos);
}

TEST_CASE("config round trip and strictness") {
    const Outcome o = invoke({"spectrum", "--K", "3", "--alpha-eff", "0.9", "--r", "0.99", "--envelope", "--dump-config"});
    REQUIRE(o.code == 0);
    const std::string once = cli::to_json(cli::from_json(o.out));
    CHECK(once == o.out);
    CHECK(cli::to_json(cli::from_json(once)) == once);
    std::string bad = o.out;
    bad.insert(bad.find('{') + 1, "\n  \"surprise\": 1,");
    CHECK_THROWS_AS(cli::from_json(bad), std::invalid_argument);
    std::string old = o.out;
    old.replace(old.find("\"schema_version\": 1"), 19, "\"schema_version\": 9");
    CHECK_THROWS_AS(cli::from_json(old), std::invalid_argument);
}

TEST_CASE("shortest round-trip number format") {
    CHECK(cli::format_double(0.1) == "0.1");
    CHECK(cli::format_double(1e-300) == "1e-300");
    const double x = 0.1 + 0.2;
    CHECK(std::stod(cli::format_double(x)) == x);
}
