#include "qdist/dd.hpp"
#include "qdist/errors.hpp"
#include "qdist/gate_dd.hpp"
#include "qdist/oracle.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qdist;
using namespace qdist::dd;
using qdist::testing::maxAbsDiff;

using qdist::testing::buildSharedLeafState;

TEST_CASE("hand-built three-qubit diagram: amplitudes by path product and node sharing") {
  Package pkg;
  const auto v = buildSharedLeafState(pkg);
  CHECK(pkg.amplitude(v, "101") == Complex{-0.5, 0.0});
  CHECK(pkg.amplitude(v, "110") == kZero);
  CHECK(pkg.size(v) == 4);
  CHECK(pkg.vectorNodeCount() == 4);
  CHECK(pkg.size(v) < 8);
  const auto dense = pkg.toDense(v, 3);
  const std::vector<Complex> expected{0, 0, 0.5, 0.5, -0.5, -0.5, 0, 0};
  CHECK(maxAbsDiff(dense, expected) == 0.0);
}

TEST_CASE("makeVectorNode normalization") {
  Package pkg;
  SUBCASE("all-zero children collapse to the zero edge") {
    CHECK(pkg.makeVectorNode(0, {VectorEdge::zero(), VectorEdge::zero()})
              .isZero());
    CHECK(pkg.vectorNodeCount() == 0);
  }
  SUBCASE("magnitude tie goes to child 0") {
    const auto e = pkg.makeVectorNode(
        0, {VectorEdge::one(), VectorEdge{kTerminal, Complex{-1.0, 0.0}}});
    CHECK(e.weight == kOne);
    const auto& n = pkg.vectorNode(e.node);
    CHECK(n.children[0].weight == kOne);
    CHECK(n.children[1].weight == Complex{-1.0, 0.0});
  }
  SUBCASE("largest child becomes one, divisor moves up") {
    const auto e = pkg.makeVectorNode(
        0, {VectorEdge{kTerminal, 0.3}, VectorEdge{kTerminal, Complex{0, 0.6}}});
    CHECK(approxEqual(e.weight, Complex{0, 0.6}));
    const auto& n = pkg.vectorNode(e.node);
    CHECK(n.children[1].weight == kOne);
    CHECK(approxEqual(n.children[0].weight, Complex{0, -0.5}));
  }
  SUBCASE("normalization is idempotent") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      const auto amps = qdist::testing::randomState(rng, 4);
      const auto v = pkg.fromDense(amps);
      const auto& n = pkg.vectorNode(v.node);
      const auto again = pkg.makeVectorNode(n.level, n.children);
      CHECK(again.node == v.node);
      CHECK(again.weight == kOne);
    }
  }
  SUBCASE("inconsistent child levels are rejected") {
    const auto leaf = pkg.makeVectorNode(0, {VectorEdge::one(), VectorEdge::zero()});
    CHECK_THROWS_AS(pkg.makeVectorNode(2, {leaf, VectorEdge::zero()}),
                    StructuralError);
    CHECK_THROWS_AS(pkg.makeVectorNode(1, {VectorEdge::one(), leaf}),
                    StructuralError);
  }
}

TEST_CASE("makeMatrixNode examples") {
  Package pkg;
  CHECK(pkg.makeMatrixNode(0, {}).isZero());

  SUBCASE("H (x) I uses two nodes and nine weights") {
    const auto h = Gate{GateKind::H, {}, {0}, {}}.matrix();
    const std::array<Matrix2, 2> factors{Matrix2{1.0, 0.0, 0.0, 1.0}, h};
    const auto m = pkg.productOperator(factors);
    CHECK(pkg.size(m) == 2);
    CHECK(approxEqual(m.weight, 1.0 / std::numbers::sqrt2));
    const auto& top = pkg.matrixNode(m.node);
    CHECK(top.children[0].node == top.children[3].node);
    CHECK(pkg.matrixNode(top.children[0].node).identity);
  }

  SUBCASE("identity on k qubits has k nodes") {
    for (int k = 1; k <= 6; ++k) {
      const auto id = pkg.identity(k);
      CHECK(pkg.size(id) == static_cast<std::size_t>(k));
      const auto dense = pkg.toDense(id, k);
      CHECK(maxAbsDiff(dense, qdist::testing::denseIdentity(std::size_t{1} << k)) == 0.0);
    }
  }
}

TEST_CASE("add") {
  Package pkg;
  std::mt19937_64 rng(11);

  SUBCASE("zero is the additive identity") {
    const auto v = pkg.fromDense(qdist::testing::randomState(rng, 3));
    CHECK(pkg.add(v, VectorEdge::zero()) == v);
    CHECK(pkg.add(VectorEdge::zero(), v) == v);
  }
  SUBCASE("v + v doubles the weight") {
    const auto v = pkg.fromDense(qdist::testing::randomState(rng, 3));
    const auto w = pkg.add(v, v);
    CHECK(w.node == v.node);
    CHECK(approxEqual(w.weight, 2.0 * v.weight));
    const auto dense = pkg.toDense(w, 3);
    auto expected = pkg.toDense(v, 3);
    for (auto& a : expected) {
      a *= 2.0;
    }
    CHECK(maxAbsDiff(dense, expected) < 1e-10);
  }
  SUBCASE("random 4-qubit states add elementwise") {
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = qdist::testing::randomState(rng, 4);
      const auto b = qdist::testing::randomState(rng, 4);
      const auto sum = pkg.add(pkg.fromDense(a), pkg.fromDense(b));
      std::vector<Complex> expected(16);
      for (std::size_t i = 0; i < 16; ++i) {
        expected[i] = a[i] + b[i];
      }
      CHECK(maxAbsDiff(pkg.toDense(sum, 4), expected) < 1e-10);
    }
  }
  SUBCASE("matrix add") {
    const auto a = pkg.identity(2);
    const auto h = physicalGateDD(pkg, Gate{GateKind::H, {}, {1}, {}}, 2);
    const auto sum = pkg.add(a, h);
    auto expected = qdist::testing::denseIdentity(4);
    const auto hd = pkg.toDense(h, 2);
    for (std::size_t i = 0; i < 16; ++i) {
      expected[i] += hd[i];
    }
    CHECK(maxAbsDiff(pkg.toDense(sum, 2), expected) < 1e-10);
  }
  SUBCASE("level mismatch is a structural error") {
    const auto a = pkg.basisState(2, 1);
    const auto b = pkg.basisState(3, 1);
    CHECK_THROWS_AS((void)pkg.add(a, b), StructuralError);
  }
}

TEST_CASE("multiply") {
  Package pkg;
  std::mt19937_64 rng(5);

  SUBCASE("identity returns the same handle") {
    const auto v = pkg.fromDense(qdist::testing::randomState(rng, 4));
    const auto r = pkg.multiply(pkg.identity(4), v);
    CHECK(r.node == v.node);
    CHECK(approxEqual(r.weight, v.weight));
  }
  SUBCASE("H|0>") {
    const auto h = physicalGateDD(pkg, Gate{GateKind::H, {}, {0}, {}}, 1);
    const auto r = pkg.multiply(h, pkg.basisState(1, 0));
    CHECK(approxEqual(pkg.amplitude(r, "0"), 1.0 / std::numbers::sqrt2));
    CHECK(approxEqual(pkg.amplitude(r, "1"), 1.0 / std::numbers::sqrt2));
  }
  SUBCASE("random 5-qubit operator products match dense matmul") {
    for (int trial = 0; trial < 20; ++trial) {
      auto m = pkg.identity(5);
      Circuit c(5);
      for (int g = 0; g < 4; ++g) {
        c.append(qdist::testing::randomGate(rng, 5));
      }
      // build the operator as a sum of gate DDs times a random scalar to get
      // a non-unitary, non-trivial matrix DD
      for (const auto& g : c.gates()) {
        m = pkg.add(m, pkg.scale(physicalGateDD(pkg, g, 5),
                                 Complex{qdist::testing::uniform01(rng), 0.3}));
      }
      const auto amps = qdist::testing::randomState(rng, 5);
      const auto r = pkg.multiply(m, pkg.fromDense(amps));
      const auto expected =
          qdist::testing::denseMatVec(pkg.toDense(m, 5), amps);
      CHECK(maxAbsDiff(pkg.toDense(r, 5), expected) < 1e-10);
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS((void)pkg.multiply(pkg.identity(3), pkg.basisState(2, 0)),
                    StructuralError);
  }
}

TEST_CASE("kron") {
  Package pkg;
  const auto i1 = pkg.identity(1);
  CHECK(pkg.kron(i1, i1) == pkg.identity(2));

  const auto h = physicalGateDD(pkg, Gate{GateKind::H, {}, {0}, {}}, 1);
  const auto x = physicalGateDD(pkg, Gate{GateKind::X, {}, {0}, {}}, 1);
  const auto hi = pkg.kron(h, i1);
  CHECK(pkg.size(hi) == 2);
  CHECK(hi == physicalGateDD(pkg, Gate{GateKind::H, {}, {1}, {}}, 2));

  const auto xh = pkg.kron(x, h);
  const auto expected =
      qdist::testing::denseKron(pkg.toDense(x, 1), 2, pkg.toDense(h, 1), 2);
  CHECK(maxAbsDiff(pkg.toDense(xh, 2), expected) < 1e-12);

  std::mt19937_64 rng(9);
  const auto a = physicalGateDD(pkg, qdist::testing::randomGate(rng, 2), 2);
  const auto b = physicalGateDD(pkg, qdist::testing::randomGate(rng, 3), 3);
  const auto ab = pkg.kron(a, b);
  CHECK(maxAbsDiff(pkg.toDense(ab, 5),
                   qdist::testing::denseKron(pkg.toDense(a, 2), 4,
                                             pkg.toDense(b, 3), 8)) < 1e-10);
}

TEST_CASE("amplitude") {
  Package pkg;
  const auto zero = pkg.basisState(5, 0);
  CHECK(pkg.amplitude(zero, "00000") == kOne);
  CHECK(pkg.amplitude(zero, "00100") == kZero);
  CHECK(pkg.amplitude(VectorEdge::zero(), "010") == kZero);
  CHECK_THROWS_AS((void)pkg.amplitude(zero, "0000"), ArgumentError);
  CHECK_THROWS_AS((void)pkg.amplitude(zero, "00x00"), ArgumentError);
  CHECK(pkg.amplitude(pkg.basisState(3, 5), 3, 5) == kOne);
}

TEST_CASE("squaredNorm") {
  Package pkg;
  CHECK(pkg.squaredNorm(VectorEdge::zero()) == 0.0);
  std::mt19937_64 rng(13);
  for (int n = 1; n <= 10; ++n) {
    auto amps = qdist::testing::randomState(rng, n);
    for (auto& a : amps) {
      a *= 1.7;
    }
    double brute = 0.0;
    for (const auto& a : amps) {
      brute += std::norm(a);
    }
    CHECK(pkg.squaredNorm(pkg.fromDense(amps)) == doctest::Approx(brute).epsilon(1e-12));
  }
  Circuit c = qdist::testing::randomCircuit(rng, 6, 30);
  auto v = pkg.basisState(6, 0);
  for (const auto& g : c.gates()) {
    v = pkg.multiply(physicalGateDD(pkg, g, 6), v);
  }
  CHECK(std::abs(pkg.squaredNorm(v) - 1.0) < 1e-9);
}

TEST_CASE("reclaim") {
  Package pkg;
  std::mt19937_64 rng(17);
  const auto v = pkg.fromDense(qdist::testing::randomState(rng, 6));
  const auto vOnly = pkg.vectorNodeCount();

  CHECK(pkg.reclaim(std::array{v}) == 0);

  {
    const auto w = pkg.fromDense(qdist::testing::randomState(rng, 6));
    CHECK(pkg.vectorNodeCount() > vOnly);
    (void)w;
  }
  const auto freed = pkg.reclaim(std::array{v});
  CHECK(freed > 0);
  CHECK(pkg.vectorNodeCount() == vOnly);
  CHECK(pkg.reclaim(std::array{v}) == 0);

  // reachable nodes keep their handles and values
  const auto before = pkg.toDense(v, 6);
  CHECK(maxAbsDiff(pkg.toDense(v, 6), before) == 0.0);

  // removed tuples are re-created on demand
  const auto x = pkg.basisState(6, 3);
  CHECK(pkg.amplitude(x, 6, 3) == kOne);

  // matrix roots are honoured too
  const auto id = pkg.identity(4);
  pkg.reclaim(std::array{v}, std::array{id});
  CHECK(pkg.matrixNodeCount() == 4);
  pkg.reclaim(std::array{v});
  CHECK(pkg.matrixNodeCount() == 0);
}

TEST_CASE("property: canonicity across construction orders") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    Package pkg;
    const int n = qdist::testing::uniformInt(rng, 1, 8);
    const auto amps = qdist::testing::randomState(rng, n);
    const auto direct = pkg.fromDense(amps);

    std::vector<std::size_t> order(amps.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      order[i] = i;
    }
    std::shuffle(order.begin(), order.end(), rng);
    auto summed = VectorEdge::zero();
    for (const auto i : order) {
      if (amps[i] != kZero) {
        summed = pkg.add(summed, pkg.scale(pkg.basisState(n, i), amps[i]));
      }
    }
    CHECK(summed.node == direct.node);
    CHECK(approxEqual(summed.weight, direct.weight, 1e-10));
  }
}

TEST_CASE("property: clearing the compute cache never changes results") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = qdist::testing::randomCircuit(rng, 6, 30);
    Package cached;
    Package cleared;
    auto a = cached.basisState(6, 0);
    auto b = cleared.basisState(6, 0);
    for (const auto& g : c.gates()) {
      a = cached.multiply(physicalGateDD(cached, g, 6), a);
      cleared.clearComputeCaches();
      const auto m = physicalGateDD(cleared, g, 6);
      cleared.clearComputeCaches();
      b = cleared.multiply(m, b);
      cleared.clearComputeCaches();
    }
    CHECK(maxAbsDiff(cached.toDense(a, 6), cleared.toDense(b, 6)) < 1e-12);
  }
}

TEST_CASE("property: gate-by-gate DD simulation equals dense linear algebra") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = qdist::testing::uniformInt(rng, 1, 6);
    const auto c = qdist::testing::randomCircuit(
        rng, n, qdist::testing::uniformInt(rng, 1, 30));
    Package pkg;
    auto v = pkg.basisState(n, 0);
    for (const auto& g : c.gates()) {
      v = pkg.multiply(physicalGateDD(pkg, g, n), v);
    }
    CHECK(maxAbsDiff(pkg.toDense(v, n), denseOracle(c)) < 1e-10);
  }
}
