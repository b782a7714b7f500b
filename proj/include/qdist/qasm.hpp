#pragma once

#include "qdist/circuit.hpp"

#include <iosfwd>
#include <string>
#include <string_view>

namespace qdist::qasm {

/// Parses the OpenQASM 2.0 subset: optional header and qelib1 include, a
/// single qreg, the gates named by `gateName` with any number of leading `c`
/// control prefixes (cx, ccx, cu1, cswap, ...), and barrier (ignored).
/// Parameters accept arithmetic over numbers and `pi`.
///
/// measure, reset, creg, if, opaque and gate definitions are rejected with a
/// ParseError naming the line.
[[nodiscard]] Circuit parse(std::string_view text);
[[nodiscard]] Circuit parseFile(const std::string& path);

/// Inverse of parse: a register named `q`, controls before targets,
/// parameters printed with round-trip precision.
[[nodiscard]] std::string print(const Circuit& circuit);
void print(const Circuit& circuit, std::ostream& out);

} // namespace qdist::qasm
