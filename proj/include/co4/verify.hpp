#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace co4 {

struct VerifyOptions {
    std::uint64_t seed = 20240801;
    bool inject_fault = false; // invariants suite self-test hook
};

struct VerifyResult {
    std::string suite;
    int checks = 0;
    int failures = 0;
    std::vector<std::string> messages; // one per failure, with its seed
};

/// Run one verification suite: "gradcheck" (analytic vs central-difference
/// attention gradients), "oracle" (library ops vs independent scalar loops),
/// or "invariants" (bound, row-sum, monotonicity and budget properties).
/// Failures are results, not errors; unknown suite names throw.
VerifyResult verify_suite(std::string_view name,
                          const VerifyOptions& opts = {});

} // namespace co4
