#pragma once

#include "qdist/circuit.hpp"

#include <vector>

namespace qdist {

/// Live logical-to-physical qubit permutation. Starts as the identity and is
/// changed only by swapping two physical positions.
class QubitLayout {
public:
  explicit QubitLayout(int nQubits);
  /// `physicalOrder[p]` is the logical qubit held at physical position p.
  static QubitLayout fromPhysicalOrder(std::vector<Qubit> physicalOrder);

  [[nodiscard]] int nQubits() const noexcept {
    return static_cast<int>(perm_.size());
  }
  [[nodiscard]] int physical(Qubit logical) const { return perm_.at(logical); }
  [[nodiscard]] Qubit logical(int physical) const {
    return inv_.at(physical);
  }
  [[nodiscard]] const std::vector<int>& perm() const noexcept { return perm_; }
  [[nodiscard]] const std::vector<Qubit>& physicalOrder() const noexcept {
    return inv_;
  }
  [[nodiscard]] bool isIdentity() const noexcept;

  void swapPhysical(int p, int q);

  /// Maps a logical basis index to the physical one (bit p of the result is
  /// bit logical(p) of the input).
  [[nodiscard]] std::uint64_t toPhysicalIndex(std::uint64_t logicalIndex) const;
  [[nodiscard]] std::uint64_t toLogicalIndex(std::uint64_t physicalIndex) const;

  bool operator==(const QubitLayout&) const = default;

private:
  std::vector<int> perm_;
  std::vector<Qubit> inv_;
};

/// Gate with every target and control translated to its physical position.
[[nodiscard]] Gate remapGate(const Gate& gate, const QubitLayout& layout);

} // namespace qdist
