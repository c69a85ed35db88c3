#include <cstdio>

#include "dce/checks.hpp"

int main() {
    int failures = 0;
    for (const auto& check : dce::checks::acceptance()) {
        const auto r = dce::checks::run(check);
        std::printf("%s %s: %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", r.id.c_str(), r.detail.c_str(), r.seconds);
        std::fflush(stdout);
        if (!r.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
