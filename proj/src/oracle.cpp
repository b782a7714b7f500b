#include "qdist/oracle.hpp"

#include "qdist/errors.hpp"

#include <string>
#include <utility>

namespace qdist {

void applyDenseGate(std::span<Complex> state, const Gate& gate) {
  std::uint64_t controlMask = 0;
  for (const auto c : gate.controls) {
    controlMask |= std::uint64_t{1} << c;
  }
  const auto dim = static_cast<std::uint64_t>(state.size());

  if (gate.kind == GateKind::Swap) {
    const auto p = std::uint64_t{1} << gate.targets[0];
    const auto q = std::uint64_t{1} << gate.targets[1];
    for (std::uint64_t i = 0; i < dim; ++i) {
      // visit each (p=1, q=0) index once and exchange with (p=0, q=1)
      if ((i & controlMask) == controlMask && (i & p) != 0 && (i & q) == 0) {
        std::swap(state[i], state[(i & ~p) | q]);
      }
    }
    return;
  }

  const auto u = gate.matrix();
  const auto t = std::uint64_t{1} << gate.targets[0];
  for (std::uint64_t i = 0; i < dim; ++i) {
    if ((i & t) != 0 || (i & controlMask) != controlMask) {
      continue;
    }
    const Complex a0 = state[i];
    const Complex a1 = state[i | t];
    state[i] = u[0] * a0 + u[1] * a1;
    state[i | t] = u[2] * a0 + u[3] * a1;
  }
}

std::vector<Complex> denseOracle(const Circuit& circuit) {
  if (circuit.nQubits() > kOracleMaxQubits) {
    throw CapacityError("dense oracle limited to " +
                        std::to_string(kOracleMaxQubits) + " qubits, got " +
                        std::to_string(circuit.nQubits()));
  }
  std::vector<Complex> state(std::size_t{1} << circuit.nQubits(), kZero);
  state[0] = kOne;
  for (const auto& g : circuit.gates()) {
    applyDenseGate(state, g);
  }
  return state;
}

double denseFidelity(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) {
    throw ArgumentError("fidelity: width mismatch");
  }
  Complex overlap = kZero;
  for (std::size_t i = 0; i < a.size(); ++i) {
    overlap += std::conj(a[i]) * b[i];
  }
  return std::norm(overlap);
}

} // namespace qdist
