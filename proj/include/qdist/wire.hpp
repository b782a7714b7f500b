#pragma once

#include "qdist/dd.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qdist {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint16_t kWireVersion = 1;

/// Little-endian encoding: "DDQW", version u16, qubits u16, node count u32,
/// nodes bottom-up (level u16, then per child: target u32, re f64, im f64),
/// then the root edge. Child targets are ordinals of earlier nodes or
/// 0xFFFFFFFF for the terminal.
[[nodiscard]] Bytes serializeDD(const dd::Package& pkg, const dd::VectorEdge& v,
                                int nQubits);

/// Rebuilds the diagram in `pkg` through canonical construction. Throws
/// DecodeError naming the byte offset of the first problem.
dd::VectorEdge deserializeDD(dd::Package& pkg, std::span<const std::uint8_t> bytes);

/// Qubit count recorded in the header.
[[nodiscard]] int wireQubitCount(std::span<const std::uint8_t> bytes);

} // namespace qdist
