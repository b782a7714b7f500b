#pragma once

#include "qdist/circuit.hpp"
#include "qdist/dd.hpp"
#include "qdist/layout.hpp"

#include <vector>

namespace qdist {

/// Equal statevector slices over P = 2^M ranks. The M most significant
/// physical positions form the global area and select the rank.
struct PartitionPlan {
  int N = 0;
  int M = 0;
  int P = 1;
  int nLocal = 0;

  /// Throws ArgumentError unless ranks is a power of two no larger than 2^N.
  static PartitionPlan make(int nQubits, int ranks);
  bool operator==(const PartitionPlan&) const = default;
};

enum class GateScope { Local, Global };

/// Part r is the sub-DD under the top M levels along the bits of r, with
/// the path weight folded into its root edge.
std::vector<dd::VectorEdge> splitState(dd::Package& pkg,
                                       const dd::VectorEdge& v,
                                       const PartitionPlan& plan);

dd::VectorEdge mergeState(dd::Package& pkg,
                          const std::vector<dd::VectorEdge>& parts,
                          const PartitionPlan& plan);

/// Block (r, c) of m: row bits from r, column bits from c.
dd::MatrixEdge extractBlock(dd::Package& pkg, const dd::MatrixEdge& m, int r,
                            int c, const PartitionPlan& plan);

[[nodiscard]] GateScope classifyGate(const Gate& gate,
                                     const PartitionPlan& plan,
                                     const QubitLayout& layout);

/// Scope of a gate whose indices are already physical positions.
[[nodiscard]] GateScope classifyPhysical(const Gate& physicalGate,
                                         const PartitionPlan& plan);

} // namespace qdist
