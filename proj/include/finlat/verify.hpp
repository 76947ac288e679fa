#pragma once

#include <string>
#include <vector>

namespace finlat {

struct PropertyResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<PropertyResult> results;

    bool all_pass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return true;
    }
};

// Invariant suites behind `verify <suite>`; each checks the documented
// properties of one module at desk scale with seeded randomness.
SuiteReport verify_engine(unsigned long long seed = 1);
SuiteReport verify_string(unsigned long long seed = 1);
SuiteReport verify_rss(unsigned long long seed = 1);
SuiteReport verify_embedding(unsigned long long seed = 1);
SuiteReport verify_ledger(unsigned long long seed = 1);
std::vector<SuiteReport> verify_all(unsigned long long seed = 1);

} // namespace finlat
