#include "qdist/errors.hpp"
#include "qdist/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace qdist;

TEST_CASE("intern maps exact constants and near values onto them") {
  ComplexTable table;
  CHECK(table.intern(0.0, 0.0) == kZero);
  // |1e-13| < 1e-12
  const auto one = table.intern(1.0 + 1e-13, 0.0);
  CHECK(one == kOne);
  CHECK(one.real() == 1.0);
  CHECK(table.intern(-1e-13, 5e-13) == kZero);
}

TEST_CASE("intern is idempotent and first-stored-wins") {
  ComplexTable table;
  const auto a = table.intern(0.5, -0.5);
  const auto b = table.intern(0.5, -0.5);
  CHECK(a == b);
  const auto c = table.intern(0.5 + 4e-13, -0.5 - 4e-13);
  CHECK(c == a);
  CHECK(table.intern(c) == a);
}

TEST_CASE("intern rejects non-finite input") {
  ComplexTable table;
  CHECK_THROWS_AS(table.intern(std::nan(""), 0.0), NumericDomainError);
  CHECK_THROWS_AS(table.intern(0.0, std::numeric_limits<double>::infinity()),
                  NumericDomainError);
}

TEST_CASE("approxEqual") {
  CHECK(approxEqual({1, 0}, {1, 0}));
  CHECK(approxEqual({1, 0}, {1 + 1e-13, 0}));
  CHECK_FALSE(approxEqual({0.5, 0}, {0.5 + 1e-6, 0}));
}

TEST_CASE("tolerance is configurable") {
  ComplexTable loose(1e-6);
  CHECK(loose.intern(1.0 + 1e-7, 0.0) == kOne);
  ComplexTable tight(1e-15);
  CHECK(tight.intern(1.0 + 1e-13, 0.0) != kOne);
}

TEST_CASE("property: interning is a projection within tolerance") {
  ComplexTable table;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int i = 0; i < 20000; ++i) {
    const double re = d(rng);
    const double im = (i % 3 == 0) ? re : d(rng);
    const auto x = table.intern(re, im);
    CHECK(std::abs(x.real() - re) < table.tolerance());
    CHECK(std::abs(x.imag() - im) < table.tolerance());
    CHECK(table.intern(x) == x);
    CHECK(approxEqual(x, x));
  }
}
