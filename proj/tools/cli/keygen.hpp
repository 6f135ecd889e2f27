#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace phobic::cli {

inline constexpr size_t kMinKeyLength = 10;
inline constexpr size_t kMaxKeyLength = 50;

/// n distinct random strings of printable ASCII, lengths uniform in [10, 50].
/// Deterministic for a given (n, seed).
std::vector<std::string> gen_keys(uint64_t n, uint64_t seed);

} // namespace phobic::cli
