#include "qdist/swap.hpp"

#include "qdist/errors.hpp"

#include <algorithm>

namespace qdist {

namespace {

std::vector<bool> membership(std::span<const Qubit> qubits, int n) {
  std::vector<bool> in(static_cast<std::size_t>(n), false);
  for (const auto q : qubits) {
    if (q < 0 || q >= n) {
      throw ArgumentError("qubit out of range in global set");
    }
    in[static_cast<std::size_t>(q)] = true;
  }
  return in;
}

void checkGlobalSet(std::span<const Qubit> nextGlobal,
                    const PartitionPlan& plan, const QubitLayout& layout) {
  if (layout.nQubits() != plan.N) {
    throw ArgumentError("layout width does not match the plan");
  }
  const auto in = membership(nextGlobal, plan.N);
  if (std::count(in.begin(), in.end(), true) != plan.M ||
      nextGlobal.size() != static_cast<std::size_t>(plan.M)) {
    throw ArgumentError("global set must hold exactly M distinct qubits");
  }
}

} // namespace

std::vector<Qubit> lookaheadGlobals(const Circuit& circuit,
                                    std::size_t fromGate,
                                    const PartitionPlan& plan,
                                    const QubitLayout& layout) {
  const auto n = static_cast<std::size_t>(plan.N);
  const auto nLocal = static_cast<std::size_t>(plan.nLocal);
  std::vector<bool> local(n, false);
  std::size_t count = 0;
  const auto insert = [&](Qubit q) {
    if (count < nLocal && !local[static_cast<std::size_t>(q)]) {
      local[static_cast<std::size_t>(q)] = true;
      ++count;
    }
  };
  for (std::size_t i = fromGate; i < circuit.size() && count < nLocal; ++i) {
    const auto& g = circuit[i];
    for (const auto q : g.targets) {
      insert(q);
    }
    for (const auto q : g.controls) {
      insert(q);
    }
  }
  for (int p = 0; p < plan.nLocal && count < nLocal; ++p) {
    insert(layout.logical(p));
  }
  std::vector<Qubit> global;
  for (std::size_t q = 0; q < n; ++q) {
    if (!local[q]) {
      global.push_back(static_cast<Qubit>(q));
    }
  }
  return global;
}

SwapPlan planSwapsV1(const QubitLayout& layout,
                     std::span<const Qubit> nextGlobal,
                     const PartitionPlan& plan) {
  checkGlobalSet(nextGlobal, plan, layout);
  const auto in = membership(nextGlobal, plan.N);
  std::vector<Qubit> target;
  target.reserve(static_cast<std::size_t>(plan.N));
  for (int pass = 0; pass < 2; ++pass) {
    for (Qubit q = 0; q < plan.N; ++q) {
      if (in[static_cast<std::size_t>(q)] == (pass == 1)) {
        target.push_back(q);
      }
    }
  }
  SwapPlan out{{}, layout};
  for (int p = 0; p < plan.N; ++p) {
    const auto want = target[static_cast<std::size_t>(p)];
    if (out.result.logical(p) != want) {
      const int from = out.result.physical(want);
      out.swaps.emplace_back(p, from);
      out.result.swapPhysical(p, from);
    }
  }
  return out;
}

SwapPlan planSwapsV2(const QubitLayout& layout,
                     std::span<const Qubit> nextGlobal,
                     const PartitionPlan& plan) {
  checkGlobalSet(nextGlobal, plan, layout);
  const auto in = membership(nextGlobal, plan.N);
  std::vector<Qubit> incoming;
  std::vector<Qubit> outgoing;
  for (Qubit q = 0; q < plan.N; ++q) {
    const bool isGlobal = layout.physical(q) >= plan.nLocal;
    const bool wantGlobal = in[static_cast<std::size_t>(q)];
    if (wantGlobal && !isGlobal) {
      incoming.push_back(q);
    } else if (!wantGlobal && isGlobal) {
      outgoing.push_back(q);
    }
  }
  SwapPlan out{{}, layout};
  for (std::size_t i = 0; i < incoming.size(); ++i) {
    const int a = layout.physical(incoming[i]);
    const int b = layout.physical(outgoing[i]);
    out.swaps.emplace_back(std::min(a, b), std::max(a, b));
    out.result.swapPhysical(a, b);
  }
  return out;
}

SwapPlan planSwaps(SwapMode mode, const QubitLayout& layout,
                   std::span<const Qubit> nextGlobal,
                   const PartitionPlan& plan) {
  switch (mode) {
  case SwapMode::V1:
    return planSwapsV1(layout, nextGlobal, plan);
  case SwapMode::V2:
    return planSwapsV2(layout, nextGlobal, plan);
  case SwapMode::None:
    break;
  }
  return SwapPlan{{}, layout};
}

} // namespace qdist
