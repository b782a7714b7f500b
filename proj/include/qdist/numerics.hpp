#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace qdist {

using Complex = std::complex<double>;

inline constexpr double kDefaultTolerance = 1e-12;

inline constexpr Complex kZero{0.0, 0.0};
inline constexpr Complex kOne{1.0, 0.0};

/// True iff both component differences are below `tolerance`.
[[nodiscard]] bool approxEqual(const Complex& a, const Complex& b,
                               double tolerance = kDefaultTolerance) noexcept;

/// Tolerance-based interning of complex values.
///
/// Values are bucketed on their quantized components. A lookup inspects the
/// 3x3 neighbourhood of buckets and returns the first stored value lying
/// within the tolerance in both components; otherwise the value is stored as
/// given. ZERO and ONE are stored first, so anything close to them interns
/// to the exact constants.
///
/// One table per rank. Not thread-safe.
class ComplexTable {
public:
  explicit ComplexTable(double tolerance = kDefaultTolerance);

  /// Throws NumericDomainError on non-finite input.
  Complex intern(double re, double im);
  Complex intern(const Complex& c) { return intern(c.real(), c.imag()); }

  [[nodiscard]] double tolerance() const noexcept { return tolerance_; }
  [[nodiscard]] std::size_t size() const noexcept { return count_; }

private:
  struct Key {
    std::int64_t re;
    std::int64_t im;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      auto h = static_cast<std::uint64_t>(k.re) * 0x9E3779B97F4A7C15ULL;
      h ^= static_cast<std::uint64_t>(k.im) + 0x632BE59BD9B4E019ULL +
           (h << 6) + (h >> 2);
      return static_cast<std::size_t>(h);
    }
  };

  [[nodiscard]] std::int64_t quantize(double x) const;
  void store(const Complex& c);

  double tolerance_;
  std::size_t count_ = 0;
  std::unordered_map<Key, std::vector<Complex>, KeyHash> buckets_;
};

} // namespace qdist
