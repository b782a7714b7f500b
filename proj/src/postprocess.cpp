#include "qdist/postprocess.hpp"

#include "qdist/errors.hpp"
#include "qdist/generators.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace qdist {

FactorResult factorFromMeasurement(std::uint64_t y, int countBits,
                                   std::uint64_t modulus, std::uint64_t base) {
  FactorResult out;
  out.measured = y;
  out.attempts = 1;
  if (countBits < 1 || countBits > 62) {
    throw ArgumentError("counting register width out of range");
  }
  const std::uint64_t denom = std::uint64_t{1} << countBits;
  if (y == 0 || y >= denom) {
    return out;
  }

  // convergents h/k of y/denom
  std::uint64_t num = y;
  std::uint64_t den = denom;
  std::uint64_t kPrev = 1;
  std::uint64_t k = 0;
  std::uint64_t period = 0;
  while (den != 0 && period == 0) {
    const auto a = num / den;
    const auto kNext = a * k + kPrev;
    kPrev = k;
    k = kNext;
    std::tie(num, den) = std::pair{den, num % den};
    if (k > modulus) {
      break;
    }
    if (k == 0) {
      continue;
    }
    for (std::uint64_t r = k; r <= modulus; r += k) {
      if (modPow(base, r, modulus) == 1) {
        period = r;
        break;
      }
    }
  }
  out.period = period;
  if (period == 0 || period % 2 != 0) {
    return out;
  }
  const auto half = modPow(base, period / 2, modulus);
  if (half == modulus - 1) {
    return out;
  }
  for (const auto candidate : {half + modulus - 1, half + 1}) {
    const auto g = std::gcd(candidate % modulus, modulus);
    if (g > 1 && g < modulus) {
      const auto other = modulus / g;
      out.factors = std::pair{std::min(g, other), std::max(g, other)};
      return out;
    }
  }
  return out;
}

FactorResult shorPostprocess(const std::map<std::string, std::uint64_t>& histogram,
                             std::uint64_t modulus, std::uint64_t base,
                             int maxAttempts) {
  const auto regs = ShorRegisters::forModulus(modulus);
  std::vector<std::pair<std::string, std::uint64_t>> outcomes(histogram.begin(),
                                                              histogram.end());
  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  FactorResult last;
  int attempts = 0;
  for (const auto& [bits, count] : outcomes) {
    if (attempts >= maxAttempts) {
      break;
    }
    if (bits.size() != static_cast<std::size_t>(regs.nQubits)) {
      throw ArgumentError("outcome width does not match the Shor register");
    }
    std::uint64_t y = 0;
    for (int i = 0; i < regs.countBits; ++i) {
      y = (y << 1) | static_cast<std::uint64_t>(bits[static_cast<std::size_t>(i)] == '1');
    }
    ++attempts;
    last = factorFromMeasurement(y, regs.countBits, modulus, base);
    last.attempts = attempts;
    if (last.factors) {
      return last;
    }
  }
  last.attempts = attempts;
  return last;
}

} // namespace qdist
