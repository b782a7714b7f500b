#include "qdist/numerics.hpp"

#include "qdist/errors.hpp"

#include <cmath>
#include <limits>

namespace qdist {

bool approxEqual(const Complex& a, const Complex& b,
                 double tolerance) noexcept {
  return std::abs(a.real() - b.real()) < tolerance &&
         std::abs(a.imag() - b.imag()) < tolerance;
}

ComplexTable::ComplexTable(double tolerance) : tolerance_(tolerance) {
  if (!(tolerance > 0.0) || !std::isfinite(tolerance)) {
    throw NumericDomainError("tolerance must be positive and finite");
  }
  store(kZero);
  store(kOne);
}

std::int64_t ComplexTable::quantize(double x) const {
  const double q = std::floor(x / tolerance_);
  // keep the +-1 neighbourhood representable
  constexpr double kLimit = 4.0e18;
  if (std::abs(q) > kLimit) {
    throw NumericDomainError("value outside the interning range");
  }
  return static_cast<std::int64_t>(q);
}

void ComplexTable::store(const Complex& c) {
  buckets_[Key{quantize(c.real()), quantize(c.imag())}].push_back(c);
  ++count_;
}

Complex ComplexTable::intern(double re, double im) {
  if (!std::isfinite(re) || !std::isfinite(im)) {
    throw NumericDomainError("cannot intern a non-finite complex value");
  }
  // components within tolerance of zero are snapped so that purely real or
  // purely imaginary values stay that way
  if (std::abs(re) < tolerance_) {
    re = 0.0;
  }
  if (std::abs(im) < tolerance_) {
    im = 0.0;
  }
  const Complex c{re, im};
  const auto kr = quantize(re);
  const auto ki = quantize(im);
  for (std::int64_t dr = -1; dr <= 1; ++dr) {
    for (std::int64_t di = -1; di <= 1; ++di) {
      const auto it = buckets_.find(Key{kr + dr, ki + di});
      if (it == buckets_.end()) {
        continue;
      }
      for (const auto& stored : it->second) {
        if (approxEqual(stored, c, tolerance_)) {
          return stored;
        }
      }
    }
  }
  store(c);
  return c;
}

} // namespace qdist
