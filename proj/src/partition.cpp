#include "qdist/partition.hpp"

#include "qdist/errors.hpp"

#include <string>

namespace qdist {

using dd::MatrixEdge;
using dd::VectorEdge;

PartitionPlan PartitionPlan::make(int nQubits, int ranks) {
  if (nQubits < 0 || nQubits > 62) {
    throw ArgumentError("qubit count out of range");
  }
  if (ranks < 1 || (ranks & (ranks - 1)) != 0) {
    throw ArgumentError("rank count must be a power of two, got " +
                        std::to_string(ranks));
  }
  int m = 0;
  while ((1 << m) < ranks) {
    ++m;
  }
  if (m > nQubits) {
    throw ArgumentError("rank count " + std::to_string(ranks) +
                        " exceeds 2^" + std::to_string(nQubits));
  }
  return PartitionPlan{nQubits, m, ranks, nQubits - m};
}

namespace {

void checkWidth(const dd::Package& pkg, const VectorEdge& v, int nQubits,
                const char* what) {
  if (v.isZero()) {
    return;
  }
  if (pkg.level(v) != nQubits - 1) {
    throw StructuralError(std::string(what) + ": expected a " +
                          std::to_string(nQubits) + "-qubit state, got level " +
                          std::to_string(pkg.level(v)));
  }
}

void splitInto(dd::Package& pkg, const VectorEdge& v, int depth, int rank,
               const PartitionPlan& plan, std::vector<VectorEdge>& out) {
  if (v.isZero()) {
    return; // parts default to zero
  }
  if (depth == plan.M) {
    out[static_cast<std::size_t>(rank)] = {
        v.node, pkg.complexTable().intern(v.weight)};
    return;
  }
  const auto children = pkg.vectorNode(v.node).children;
  for (int bit = 0; bit < 2; ++bit) {
    splitInto(pkg, pkg.scale(children[bit], v.weight), depth + 1,
              (rank << 1) | bit, plan, out);
  }
}

VectorEdge mergeRange(dd::Package& pkg, const std::vector<VectorEdge>& parts,
                      std::size_t begin, std::size_t count, int level) {
  if (count == 1) {
    return parts[begin];
  }
  const auto half = count / 2;
  const auto lo = mergeRange(pkg, parts, begin, half, level - 1);
  const auto hi = mergeRange(pkg, parts, begin + half, half, level - 1);
  return pkg.makeVectorNode(level, {lo, hi});
}

} // namespace

std::vector<VectorEdge> splitState(dd::Package& pkg, const VectorEdge& v,
                                   const PartitionPlan& plan) {
  checkWidth(pkg, v, plan.N, "splitState");
  std::vector<VectorEdge> out(static_cast<std::size_t>(plan.P),
                              VectorEdge::zero());
  splitInto(pkg, v, 0, 0, plan, out);
  return out;
}

VectorEdge mergeState(dd::Package& pkg, const std::vector<VectorEdge>& parts,
                      const PartitionPlan& plan) {
  if (parts.size() != static_cast<std::size_t>(plan.P)) {
    throw StructuralError("mergeState: expected " + std::to_string(plan.P) +
                          " parts, got " + std::to_string(parts.size()));
  }
  for (const auto& p : parts) {
    checkWidth(pkg, p, plan.nLocal, "mergeState");
  }
  return mergeRange(pkg, parts, 0, parts.size(), plan.N - 1);
}

MatrixEdge extractBlock(dd::Package& pkg, const MatrixEdge& m, int r, int c,
                        const PartitionPlan& plan) {
  if (r < 0 || r >= plan.P || c < 0 || c >= plan.P) {
    throw ArgumentError("extractBlock: rank index out of range");
  }
  if (!m.isZero() && pkg.level(m) != plan.N - 1) {
    throw StructuralError("extractBlock: operator width does not match plan");
  }
  MatrixEdge e = m;
  for (int depth = 0; depth < plan.M && !e.isZero(); ++depth) {
    const int shift = plan.M - 1 - depth;
    const int child = 2 * ((r >> shift) & 1) + ((c >> shift) & 1);
    e = pkg.scale(pkg.matrixNode(e.node).children[child], e.weight);
  }
  if (e.isZero()) {
    return MatrixEdge::zero();
  }
  return {e.node, pkg.complexTable().intern(e.weight)};
}

GateScope classifyPhysical(const Gate& physicalGate,
                           const PartitionPlan& plan) {
  for (const auto q : physicalGate.qubits()) {
    if (q >= plan.nLocal) {
      return GateScope::Global;
    }
  }
  return GateScope::Local;
}

GateScope classifyGate(const Gate& gate, const PartitionPlan& plan,
                       const QubitLayout& layout) {
  return classifyPhysical(remapGate(gate, layout), plan);
}

} // namespace qdist
