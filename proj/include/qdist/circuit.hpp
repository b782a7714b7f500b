#pragma once

#include "qdist/dd.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qdist {

using Qubit = int;

enum class GateKind { H, X, Y, Z, S, Sdg, T, Tdg, RX, RY, RZ, Phase, Swap };

/// Lower-case mnemonic without control prefix ("h", "rx", "u1", "swap").
[[nodiscard]] std::string_view gateName(GateKind kind) noexcept;
[[nodiscard]] std::optional<GateKind> gateKindFromName(std::string_view name);
[[nodiscard]] std::size_t paramCount(GateKind kind) noexcept;
[[nodiscard]] std::size_t targetCount(GateKind kind) noexcept;

/// A (possibly multi-controlled) gate. CX is X with one control; the
/// controlled phase family is Phase with one or more controls.
struct Gate {
  GateKind kind = GateKind::H;
  std::vector<double> params;
  std::vector<Qubit> targets;
  std::vector<Qubit> controls;

  /// Targets first, then controls, each in declaration order.
  [[nodiscard]] std::vector<Qubit> qubits() const;
  [[nodiscard]] Gate inverse() const;
  /// 2x2 matrix of the single-target part. Not defined for Swap.
  [[nodiscard]] dd::Matrix2 matrix() const;

  bool operator==(const Gate&) const = default;
};

[[nodiscard]] Gate makeGate(GateKind kind, std::vector<Qubit> targets,
                            std::vector<Qubit> controls = {},
                            std::vector<double> params = {});

/// An ordered gate list over a fixed qubit count. Validated on insertion.
class Circuit {
public:
  explicit Circuit(int nQubits);

  [[nodiscard]] int nQubits() const noexcept { return nQubits_; }
  [[nodiscard]] const std::vector<Gate>& gates() const noexcept {
    return gates_;
  }
  [[nodiscard]] std::size_t size() const noexcept { return gates_.size(); }
  [[nodiscard]] const Gate& operator[](std::size_t i) const {
    return gates_[i];
  }

  /// Throws ArgumentError on out-of-range or overlapping qubits, or a wrong
  /// parameter count.
  void append(Gate gate);
  void append(const Circuit& other);

  /// Gates of `other` in reverse order, each inverted.
  void appendInverse(const Circuit& other);

  bool operator==(const Circuit&) const = default;

private:
  int nQubits_;
  std::vector<Gate> gates_;
};

void validateGate(const Gate& gate, int nQubits);

} // namespace qdist
