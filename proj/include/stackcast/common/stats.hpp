#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace stackcast {

// Median with the midpoint of the central pair for even counts. Empty -> nullopt.
std::optional<double> median(std::vector<double> values);

double mean(std::span<const double> values);

// Population variance (divides by n).
double variance(std::span<const double> values);

// Deterministic seed derivation (splitmix64 mixing) so that parallel tasks draw
// independent streams regardless of scheduling order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t hash_string(std::string_view s);

}  // namespace stackcast
