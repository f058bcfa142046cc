#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace igkit {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

struct AcceptanceReport {
    std::uint64_t seed = 0;
    std::vector<CriterionResult> criteria;

    bool all_passed() const {
        for (const auto& c : criteria)
            if (!c.passed) return false;
        return true;
    }
};

/// Runs the full verification suite. The determinism criterion re-runs the
/// other checks and compares the serialized reports byte for byte.
AcceptanceReport run_acceptance(std::uint64_t seed);

nlohmann::ordered_json report_to_json(const AcceptanceReport& rep);

} // namespace igkit
