#include "qdist/layout.hpp"

#include "qdist/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace qdist {

QubitLayout::QubitLayout(int nQubits) {
  if (nQubits < 0) {
    throw ArgumentError("layout width must be non-negative");
  }
  perm_.resize(static_cast<std::size_t>(nQubits));
  std::iota(perm_.begin(), perm_.end(), 0);
  inv_ = perm_;
}

QubitLayout QubitLayout::fromPhysicalOrder(std::vector<Qubit> physicalOrder) {
  QubitLayout layout(static_cast<int>(physicalOrder.size()));
  std::vector<bool> seen(physicalOrder.size(), false);
  for (std::size_t p = 0; p < physicalOrder.size(); ++p) {
    const auto q = physicalOrder[p];
    if (q < 0 || static_cast<std::size_t>(q) >= physicalOrder.size() ||
        seen[static_cast<std::size_t>(q)]) {
      throw ArgumentError("physical order is not a permutation");
    }
    seen[static_cast<std::size_t>(q)] = true;
    layout.perm_[static_cast<std::size_t>(q)] = static_cast<int>(p);
  }
  layout.inv_ = std::move(physicalOrder);
  return layout;
}

bool QubitLayout::isIdentity() const noexcept {
  for (std::size_t i = 0; i < perm_.size(); ++i) {
    if (perm_[i] != static_cast<int>(i)) {
      return false;
    }
  }
  return true;
}

void QubitLayout::swapPhysical(int p, int q) {
  const int n = nQubits();
  if (p < 0 || q < 0 || p >= n || q >= n) {
    throw ArgumentError("swap position out of range");
  }
  const auto a = inv_[static_cast<std::size_t>(p)];
  const auto b = inv_[static_cast<std::size_t>(q)];
  std::swap(inv_[static_cast<std::size_t>(p)], inv_[static_cast<std::size_t>(q)]);
  perm_[static_cast<std::size_t>(a)] = q;
  perm_[static_cast<std::size_t>(b)] = p;
}

std::uint64_t QubitLayout::toPhysicalIndex(std::uint64_t logicalIndex) const {
  std::uint64_t out = 0;
  for (std::size_t l = 0; l < perm_.size(); ++l) {
    if (((logicalIndex >> l) & 1U) != 0) {
      out |= std::uint64_t{1} << perm_[l];
    }
  }
  return out;
}

std::uint64_t QubitLayout::toLogicalIndex(std::uint64_t physicalIndex) const {
  std::uint64_t out = 0;
  for (std::size_t p = 0; p < inv_.size(); ++p) {
    if (((physicalIndex >> p) & 1U) != 0) {
      out |= std::uint64_t{1} << inv_[p];
    }
  }
  return out;
}

Gate remapGate(const Gate& gate, const QubitLayout& layout) {
  Gate g = gate;
  for (auto& t : g.targets) {
    t = layout.physical(t);
  }
  for (auto& c : g.controls) {
    c = layout.physical(c);
  }
  return g;
}

} // namespace qdist
