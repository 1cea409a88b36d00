#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace metamorph::verify {

struct CheckResult {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::uint64_t seed = 42;
    double tol_scale = 1.0;
    bool swap_br = false;  // negative control: swaps the b/r derivative slots
};

using Results = std::vector<CheckResult>;

Results closed_forms_suite(const VerifyOptions& opts);
Results annihilator_suite(const VerifyOptions& opts);
Results roundtrip_suite(const VerifyOptions& opts);
Results helmholtz_suite(const VerifyOptions& opts);

/// suite: one of all | closed-forms | annihilators | roundtrip | helmholtz.
/// Throws std::invalid_argument for unknown names.
Results run_suite(const std::string& suite, const VerifyOptions& opts);

bool all_pass(const Results& results);

}  // namespace metamorph::verify
