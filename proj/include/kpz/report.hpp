#pragma once
// Verification bookkeeping shared by the process identities and the limit
// suites: one row per check, overall pass only if every row passes.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace kpz {

struct CheckResult {
    std::string description;
    double statistic = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    // ladder scale the row refers to; NaN when the row aggregates scales
    double scale = std::numeric_limits<double>::quiet_NaN();
};

struct VerificationReport {
    std::string suite;
    std::vector<CheckResult> checks;
    uint64_t seed = 0;
    std::string config;

    bool overall() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

}  // namespace kpz
