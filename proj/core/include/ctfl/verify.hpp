#pragma once

// Seeded property suites, one per module, behind the `verify` command.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ctfl {

struct PropertyOutcome {
    std::string suite;
    std::string name;
    bool passed = false;
    /// Smallest margin (tolerance minus observed violation) over all samples;
    /// negative means the property failed.
    double worst_slack = 0.0;
    std::size_t samples = 0;
    std::string note;
};

struct VerifyConfig {
    std::uint64_t seed = 42;
    /// Base sample count per property; heavy properties use a fraction.
    int samples = 200;
};

/// "special_fn", "cantor", "operator", "experiments".
const std::vector<std::string>& verify_suites();

/// Runs one suite, or every suite for "all". Throws ValidationError for an
/// unknown name.
std::vector<PropertyOutcome> run_verify(std::string_view suite, const VerifyConfig& config);

}  // namespace ctfl
