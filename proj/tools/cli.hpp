#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace trapdyn::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kClaimFailure = 1;
inline constexpr int kInvalidInput = 2;
inline constexpr int kBudgetExceeded = 3;

/// Runs the command line `args` (without the program name), writing normal
/// output to `out` and diagnostics to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "2..199", "7" or "2,3,5..11". Range members are filtered to primes;
/// listed values must be prime. Throws trapdyn::Error on bad input.
std::vector<std::uint64_t> parse_primes(const std::string& spec);

}  // namespace trapdyn::cli
