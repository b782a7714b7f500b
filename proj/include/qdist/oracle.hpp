#pragma once

#include "qdist/circuit.hpp"

#include <span>
#include <vector>

namespace qdist {

inline constexpr int kOracleMaxQubits = 24;

/// Applies one gate to a dense statevector (index bit q = qubit q).
void applyDenseGate(std::span<Complex> state, const Gate& gate);

/// Gate-by-gate dense simulation from |0...0>. Throws CapacityError above
/// kOracleMaxQubits.
[[nodiscard]] std::vector<Complex> denseOracle(const Circuit& circuit);

/// |<a|b>|^2
[[nodiscard]] double denseFidelity(std::span<const Complex> a,
                                   std::span<const Complex> b);

} // namespace qdist
