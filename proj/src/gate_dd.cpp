#include "qdist/gate_dd.hpp"

#include "qdist/errors.hpp"

#include <vector>

namespace qdist {

namespace {

constexpr dd::Matrix2 kIdentity{1.0, 0.0, 0.0, 1.0};
constexpr dd::Matrix2 kProjectOne{0.0, 0.0, 0.0, 1.0};
constexpr dd::Matrix2 kPauliX{0.0, 1.0, 1.0, 0.0};
constexpr dd::Matrix2 kPauliZ{1.0, 0.0, 0.0, -1.0};
const dd::Matrix2 kPauliY{0.0, Complex{0.0, -1.0}, Complex{0.0, 1.0}, 0.0};

dd::Matrix2 scaled(const dd::Matrix2& m, const Complex& s) {
  return {m[0] * s, m[1] * s, m[2] * s, m[3] * s};
}

} // namespace

// Every supported gate is I + P_C (x) (U - I), where P_C projects the controls
// onto |1>. U - I is itself a short sum of Kronecker products, so the gate is
// assembled from product-operator chains and DD additions.
dd::MatrixEdge physicalGateDD(dd::Package& pkg, const Gate& physicalGate,
                              int nQubits) {
  validateGate(physicalGate, nQubits);

  std::vector<dd::Matrix2> base(static_cast<std::size_t>(nQubits), kIdentity);
  for (const auto c : physicalGate.controls) {
    base[static_cast<std::size_t>(c)] = kProjectOne;
  }

  auto result = pkg.identity(nQubits);
  if (physicalGate.kind == GateKind::Swap) {
    // SWAP - I = (-II + XX + YY + ZZ) / 2
    const auto p = static_cast<std::size_t>(physicalGate.targets[0]);
    const auto q = static_cast<std::size_t>(physicalGate.targets[1]);
    const std::array<std::pair<dd::Matrix2, Complex>, 4> terms{{
        {kIdentity, -0.5},
        {kPauliX, 0.5},
        {kPauliY, 0.5},
        {kPauliZ, 0.5},
    }};
    for (const auto& [pauli, coeff] : terms) {
      auto factors = base;
      factors[p] = scaled(pauli, coeff);
      factors[q] = pauli;
      result = pkg.add(result, pkg.productOperator(factors));
    }
    return result;
  }

  const auto u = physicalGate.matrix();
  const dd::Matrix2 delta{u[0] - 1.0, u[1], u[2], u[3] - 1.0};
  auto factors = base;
  factors[static_cast<std::size_t>(physicalGate.targets[0])] = delta;
  return pkg.add(result, pkg.productOperator(factors));
}

dd::MatrixEdge gateMatrixDD(dd::Package& pkg, const Gate& gate, int nQubits,
                            const QubitLayout& layout) {
  if (layout.nQubits() != nQubits) {
    throw ArgumentError("layout width does not match the operator width");
  }
  return physicalGateDD(pkg, remapGate(gate, layout), nQubits);
}

} // namespace qdist
