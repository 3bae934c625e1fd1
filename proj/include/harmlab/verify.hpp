#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace harmlab {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

// Closed-form identity suites behind the `verify` subcommand. Each returns
// one row per check; a suite passes iff every row passes.
std::vector<CheckResult> verify_sigma();
std::vector<CheckResult> verify_densities();
std::vector<CheckResult> verify_coeffs(std::uint64_t mc_samples = 10'000'000,
                                       std::uint64_t seed = 0xC001D00D);
std::vector<CheckResult> verify_integrals();

bool all_pass(const std::vector<CheckResult>& checks);

}  // namespace harmlab
