#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace apbias {

struct SelftestOptions {
    std::vector<std::uint64_t> moduli = {3, 4, 5, 7, 8, 12, 13}; // --q appends
    std::uint64_t P0 = 1'000'000;
    std::uint64_t P1 = 10'000'000;
    int workers = 1;
    std::string cache_dir;
};

struct SelftestReport {
    std::string text; // deterministic: no timings, no worker count
    int checks = 0;
    int failures = 0;
    bool all_pass() const { return failures == 0; }
};

// Runs the invariant suite (>= 25 checks) and renders one line per check.
// The text depends only on the numeric configuration, never on worker count.
SelftestReport run_selftest(const SelftestOptions& opts);

} // namespace apbias
