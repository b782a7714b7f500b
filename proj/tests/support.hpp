#pragma once

#include "qdist/circuit.hpp"
#include "qdist/dd.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace qdist::testing {

// 1/2 * [0, 0, 1, 1, -1, -1, 0, 0] built node by node: a shared leaf
// (1, 1), two level-1 nodes and the root
inline dd::VectorEdge buildSharedLeafState(dd::Package& pkg) {
  using dd::VectorEdge;
  const auto leaf = pkg.makeVectorNode(0, {VectorEdge::one(), VectorEdge::one()});
  const auto left = pkg.makeVectorNode(1, {VectorEdge::zero(), leaf});
  const auto right = pkg.makeVectorNode(1, {leaf, VectorEdge::zero()});
  const auto root = pkg.makeVectorNode(2, {left, pkg.scale(right, -1.0)});
  return pkg.scale(root, 0.5);
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11U) * 0x1.0p-53;
}

inline int uniformInt(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

/// Normalized random amplitudes; roughly a third of them zeroed so that
/// diagrams have some structure.
inline std::vector<Complex> randomState(std::mt19937_64& rng, int n,
                                        bool sparse = true) {
  std::vector<Complex> v(std::size_t{1} << n);
  double norm = 0.0;
  for (auto& a : v) {
    if (sparse && rng() % 3 == 0) {
      a = 0.0;
      continue;
    }
    a = Complex{uniform01(rng) * 2 - 1, uniform01(rng) * 2 - 1};
    norm += std::norm(a);
  }
  if (norm == 0.0) {
    v[0] = 1.0;
    norm = 1.0;
  }
  for (auto& a : v) {
    a /= std::sqrt(norm);
  }
  return v;
}

/// Random gate from the supported set, with up to two controls.
inline Gate randomGate(std::mt19937_64& rng, int n) {
  static constexpr GateKind kinds[] = {
      GateKind::H,  GateKind::X,   GateKind::Y,  GateKind::Z,
      GateKind::S,  GateKind::Sdg, GateKind::T,  GateKind::Tdg,
      GateKind::RX, GateKind::RY,  GateKind::RZ, GateKind::Phase,
      GateKind::Swap};
  for (;;) {
    const auto kind = kinds[rng() % std::size(kinds)];
    const auto nt = static_cast<int>(targetCount(kind));
    if (nt > n) {
      continue;
    }
    std::vector<int> qubits(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      qubits[static_cast<std::size_t>(i)] = i;
    }
    std::shuffle(qubits.begin(), qubits.end(), rng);
    const int maxControls = std::min(2, n - nt);
    const int nc = maxControls == 0 ? 0 : uniformInt(rng, 0, maxControls);
    Gate g;
    g.kind = kind;
    g.targets.assign(qubits.begin(), qubits.begin() + nt);
    g.controls.assign(qubits.begin() + nt, qubits.begin() + nt + nc);
    if (paramCount(kind) == 1) {
      g.params.push_back(uniform01(rng) * 2 * 3.141592653589793);
    }
    return g;
  }
}

inline Circuit randomCircuit(std::mt19937_64& rng, int n, int gates) {
  Circuit c(n);
  for (int i = 0; i < gates; ++i) {
    c.append(randomGate(rng, n));
  }
  return c;
}

inline double maxAbsDiff(std::span<const Complex> a,
                         std::span<const Complex> b) {
  double m = a.size() == b.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

/// Dense row-major matrix-vector product.
inline std::vector<Complex> denseMatVec(std::span<const Complex> m,
                                        std::span<const Complex> v) {
  const std::size_t dim = v.size();
  std::vector<Complex> out(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    Complex acc = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      acc += m[r * dim + c] * v[c];
    }
    out[r] = acc;
  }
  return out;
}

/// Dense Kronecker product of square row-major matrices.
inline std::vector<Complex> denseKron(std::span<const Complex> a,
                                      std::size_t da,
                                      std::span<const Complex> b,
                                      std::size_t db) {
  const std::size_t d = da * db;
  std::vector<Complex> out(d * d);
  for (std::size_t ar = 0; ar < da; ++ar) {
    for (std::size_t ac = 0; ac < da; ++ac) {
      for (std::size_t br = 0; br < db; ++br) {
        for (std::size_t bc = 0; bc < db; ++bc) {
          out[(ar * db + br) * d + ac * db + bc] =
              a[ar * da + ac] * b[br * db + bc];
        }
      }
    }
  }
  return out;
}

inline std::vector<Complex> denseIdentity(std::size_t dim) {
  std::vector<Complex> out(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    out[i * dim + i] = 1.0;
  }
  return out;
}

} // namespace qdist::testing
