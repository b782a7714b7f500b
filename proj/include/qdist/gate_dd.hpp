#pragma once

#include "qdist/circuit.hpp"
#include "qdist/dd.hpp"
#include "qdist/layout.hpp"

namespace qdist {

/// Full-width operator DD of a gate whose indices are already physical
/// positions. All untouched levels carry the identity.
dd::MatrixEdge physicalGateDD(dd::Package& pkg, const Gate& physicalGate,
                              int nQubits);

/// Same, for a logical gate mapped through `layout`.
dd::MatrixEdge gateMatrixDD(dd::Package& pkg, const Gate& gate, int nQubits,
                            const QubitLayout& layout);

} // namespace qdist
