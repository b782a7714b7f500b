#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>

namespace qdist {

struct FactorResult {
  /// Empty means RETRY.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> factors;
  std::uint64_t period = 0;
  std::uint64_t measured = 0;
  int attempts = 0;
};

/// Classical half of order finding for one counting-register value `y` out
/// of `countBits` bits: continued fractions of y / 2^countBits, the smallest
/// period consistent with a convergent denominator, then the gcd split.
[[nodiscard]] FactorResult factorFromMeasurement(std::uint64_t y, int countBits,
                                                 std::uint64_t modulus,
                                                 std::uint64_t base);

/// Tries outcomes of a Shor run in descending frequency, at most
/// `maxAttempts` of them. Keys are full-width logical bitstrings (most
/// significant first); the counting register is their leading 2n bits.
[[nodiscard]] FactorResult
shorPostprocess(const std::map<std::string, std::uint64_t>& histogram,
                std::uint64_t modulus, std::uint64_t base, int maxAttempts = 10);

} // namespace qdist
