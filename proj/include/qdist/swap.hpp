#pragma once

#include "qdist/circuit.hpp"
#include "qdist/layout.hpp"
#include "qdist/partition.hpp"

#include <span>
#include <utility>
#include <vector>

namespace qdist {

enum class SwapMode { None, V1, V2 };

struct SwapPlan {
  /// Physical position pairs, applied in order.
  std::vector<std::pair<int, int>> swaps;
  QubitLayout result;
};

/// Logical qubits that should occupy the global area when `fromGate` is
/// about to run: scans forward collecting touched qubits (targets, then
/// controls) until the local area is full, pads with currently local
/// qubits by ascending physical position, and returns the rest, ascending.
[[nodiscard]] std::vector<Qubit> lookaheadGlobals(const Circuit& circuit,
                                                  std::size_t fromGate,
                                                  const PartitionPlan& plan,
                                                  const QubitLayout& layout);

/// Order-preserving: local qubits then global qubits, each ascending by
/// logical index, reached by a front-to-back selection of swaps.
[[nodiscard]] SwapPlan planSwapsV1(const QubitLayout& layout,
                                   std::span<const Qubit> nextGlobal,
                                   const PartitionPlan& plan);

/// Minimum swaps: exchanges each incoming qubit with an outgoing one,
/// both sides ascending by logical index.
[[nodiscard]] SwapPlan planSwapsV2(const QubitLayout& layout,
                                   std::span<const Qubit> nextGlobal,
                                   const PartitionPlan& plan);

[[nodiscard]] SwapPlan planSwaps(SwapMode mode, const QubitLayout& layout,
                                 std::span<const Qubit> nextGlobal,
                                 const PartitionPlan& plan);

} // namespace qdist
