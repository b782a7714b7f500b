#include "qdist/engine.hpp"

#include "qdist/errors.hpp"
#include "qdist/gate_dd.hpp"
#include "qdist/oracle.hpp"
#include "qdist/wire.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qdist {

using dd::MatrixEdge;
using dd::VectorEdge;

Schedule scheduleCircuit(const Circuit& circuit, const PartitionPlan& plan,
                         SwapMode mode, bool forceGlobal, bool restoreLayout) {
  if (circuit.nQubits() != plan.N) {
    throw ArgumentError("circuit width " + std::to_string(circuit.nQubits()) +
                        " does not match the plan's " + std::to_string(plan.N));
  }
  Schedule s{{}, QubitLayout(plan.N), 0};
  auto& layout = s.finalLayout;
  const auto scopeOf = [&](const Gate& physical) {
    return forceGlobal ? GateScope::Global : classifyPhysical(physical, plan);
  };
  for (std::size_t i = 0; i < circuit.size(); ++i) {
    auto physical = remapGate(circuit[i], layout);
    if (mode != SwapMode::None &&
        classifyPhysical(physical, plan) == GateScope::Global) {
      const auto next = lookaheadGlobals(circuit, i, plan, layout);
      const auto swaps = planSwaps(mode, layout, next, plan);
      for (const auto& [p, q] : swaps.swaps) {
        auto g = makeGate(GateKind::Swap, {p, q});
        const auto scope = scopeOf(g);
        s.ops.push_back({std::move(g), scope, true});
      }
      s.swapsInserted += swaps.swaps.size();
      layout = swaps.result;
      physical = remapGate(circuit[i], layout);
    }
    const auto scope = scopeOf(physical);
    s.ops.push_back({std::move(physical), scope, false});
  }
  if (restoreLayout) {
    for (int p = 0; p < plan.N; ++p) {
      if (layout.logical(p) != p) {
        const int q = layout.physical(p);
        auto g = makeGate(GateKind::Swap, {p, q});
        const auto scope = scopeOf(g);
        s.ops.push_back({std::move(g), scope, true});
        layout.swapPhysical(p, q);
        ++s.swapsInserted;
      }
    }
  }
  return s;
}

RankSimulator::RankSimulator(Endpoint& endpoint, dd::Package& pkg,
                             const PartitionPlan& plan, const RunConfig& config)
    : ep_(endpoint), pkg_(pkg), plan_(plan), config_(config),
      state_(endpoint.rank() == 0 ? pkg.basisState(plan.nLocal, 0)
                                  : VectorEdge::zero()) {
  if (endpoint.size() != plan.P) {
    throw ArgumentError("endpoint cluster size does not match the plan");
  }
}

void RankSimulator::applyLocal(const Gate& physicalGate) {
  if (classifyPhysical(physicalGate, plan_) != GateScope::Local) {
    throw ArgumentError("gate touches the global area");
  }
  if (!state_.isZero()) {
    const auto m = physicalGateDD(pkg_, physicalGate, plan_.nLocal);
    state_ = pkg_.multiply(m, state_);
  }
  ++ep_.metrics().localApplies;
}

VectorEdge RankSimulator::receiveBlockInput(const Bytes& bytes) {
  return deserializeDD(pkg_, bytes);
}

void RankSimulator::applyGlobal(const Gate& physicalGate, CommSchedule comm) {
  const int r = ep_.rank();
  const int p = plan_.P;
  const auto m = physicalGateDD(pkg_, physicalGate, plan_.N);
  consumed_.clear();
  VectorEdge acc = VectorEdge::zero();
  const auto accumulate = [&](int source, const VectorEdge* own,
                              const Bytes* wire) {
    const auto block = extractBlock(pkg_, m, r, source, plan_);
    if (block.isZero() && config_.skipZeroBlocks) {
      return;
    }
    const auto v = own != nullptr ? *own : receiveBlockInput(*wire);
    consumed_.push_back(source);
    acc = pkg_.add(acc, pkg_.multiply(block, v));
  };

  if (comm == CommSchedule::Broadcast) {
    const auto mine = serializeDD(pkg_, state_, plan_.nLocal);
    for (int k = 0; k < p; ++k) {
      const auto got =
          broadcastFrom(ep_, k, k == r ? std::optional<Bytes>(mine)
                                       : std::nullopt);
      if (k == r) {
        accumulate(k, &state_, nullptr);
      } else {
        accumulate(k, nullptr, &got);
      }
    }
  } else {
    accumulate(r, &state_, nullptr);
    Bytes buffer = p > 1 ? serializeDD(pkg_, state_, plan_.nLocal) : Bytes{};
    for (int t = 1; t < p; ++t) {
      buffer = ringShift(ep_, buffer);
      accumulate((r - t + p) % p, nullptr, &buffer);
    }
  }
  state_ = acc;
  ++ep_.metrics().globalApplies;
}

void RankSimulator::apply(const ScheduledOp& op) {
  if (op.scope == GateScope::Global) {
    applyGlobal(op.gate, config_.comm);
  } else {
    applyLocal(op.gate);
  }
  if (op.inserted) {
    ++ep_.metrics().swapsInserted;
  }
}

void RankSimulator::endGate() {
  auto& metrics = ep_.metrics();
  metrics.peakNodes = std::max<std::uint64_t>(metrics.peakNodes, pkg_.nodeCount());
  if (pkg_.nodeCount() > config_.reclaimWatermark) {
    const std::array<VectorEdge, 1> roots{state_};
    pkg_.reclaim(roots);
  }
}

std::uint64_t RunResult::totalMessages() const {
  std::uint64_t n = 0;
  for (const auto& m : metrics) {
    n += m.messagesSent;
  }
  return n;
}

std::uint64_t RunResult::maxSendsPerRound() const {
  std::uint64_t n = 0;
  for (const auto& m : metrics) {
    n = std::max(n, m.maxSendsPerRound);
  }
  return n;
}

std::uint64_t RunResult::peakNodes() const {
  std::uint64_t n = 0;
  for (const auto& m : metrics) {
    n = std::max(n, m.peakNodes);
  }
  return n;
}

RunResult runCircuit(const Circuit& circuit, const RunConfig& config) {
  const auto plan = PartitionPlan::make(circuit.nQubits(), config.ranks);
  const auto schedule =
      scheduleCircuit(circuit, plan, config.swap, config.forceGlobal,
                      config.restoreLayout);

  RunResult result;
  result.plan = plan;
  result.layout = schedule.finalLayout;
  result.swapsInserted = schedule.swapsInserted;
  for (const auto& op : schedule.ops) {
    ++(op.scope == GateScope::Global ? result.globalApplies
                                     : result.localApplies);
  }
  result.ranks.resize(static_cast<std::size_t>(plan.P));
  for (auto& rs : result.ranks) {
    rs.pkg = std::make_unique<dd::Package>(config.package);
  }
  std::vector<std::vector<double>> norms(static_cast<std::size_t>(plan.P));

  ClusterOptions options;
  options.ranks = plan.P;
  options.transport = config.transport;
  options.scheduling = config.scheduling;
  options.receiveTimeout = config.receiveTimeout;
  result.metrics = runCluster(options, [&](Endpoint& ep) {
    const auto r = static_cast<std::size_t>(ep.rank());
    auto& pkg = *result.ranks[r].pkg;
    RankSimulator sim(ep, pkg, plan, config);
    sim.endGate();
    for (const auto& op : schedule.ops) {
      sim.apply(op);
      if (config.traceNorms) {
        norms[r].push_back(pkg.squaredNorm(sim.state()));
      }
      sim.endGate();
    }
    result.ranks[r].part = sim.state();
  });

  if (config.traceNorms) {
    result.normTrace.assign(schedule.ops.size(), 0.0);
    for (const auto& perRank : norms) {
      for (std::size_t i = 0; i < perRank.size(); ++i) {
        result.normTrace[i] += perRank[i];
      }
    }
  }
  return result;
}

Complex queryAmplitude(const RunResult& result, std::uint64_t logicalIndex) {
  const auto& plan = result.plan;
  if (plan.N < 64 && (logicalIndex >> plan.N) != 0) {
    throw ArgumentError("index out of range");
  }
  const auto phys = result.layout.toPhysicalIndex(logicalIndex);
  const auto rank = static_cast<std::size_t>(phys >> plan.nLocal);
  const auto local = phys & ((std::uint64_t{1} << plan.nLocal) - 1);
  const auto& rs = result.ranks[rank];
  return rs.pkg->amplitude(rs.part, plan.nLocal, local);
}

Complex queryAmplitude(const RunResult& result, std::string_view logicalBits) {
  if (logicalBits.size() != static_cast<std::size_t>(result.plan.N)) {
    throw ArgumentError("index length does not match the qubit count");
  }
  std::uint64_t index = 0;
  for (const char ch : logicalBits) {
    if (ch != '0' && ch != '1') {
      throw ArgumentError("index must be a bitstring");
    }
    index = (index << 1) | static_cast<std::uint64_t>(ch == '1');
  }
  return queryAmplitude(result, index);
}

std::vector<Complex> mergedAmplitudes(const RunResult& result) {
  const auto& plan = result.plan;
  if (plan.N > kOracleMaxQubits) {
    throw CapacityError("state too wide to expand densely");
  }
  const std::size_t slice = std::size_t{1} << plan.nLocal;
  std::vector<Complex> physical;
  physical.reserve(slice * static_cast<std::size_t>(plan.P));
  for (const auto& rs : result.ranks) {
    const auto part = rs.pkg->toDense(rs.part, plan.nLocal);
    physical.insert(physical.end(), part.begin(), part.end());
  }
  if (result.layout.isIdentity()) {
    return physical;
  }
  std::vector<Complex> logical(physical.size());
  for (std::uint64_t i = 0; i < logical.size(); ++i) {
    logical[i] = physical[result.layout.toPhysicalIndex(i)];
  }
  return logical;
}

double fidelity(const RunResult& result, std::span<const Complex> oracle) {
  const auto amps = mergedAmplitudes(result);
  if (amps.size() != oracle.size()) {
    throw ArgumentError("fidelity: width mismatch");
  }
  return denseFidelity(oracle, amps);
}

Histogram sample(const RunResult& result, std::uint64_t shots,
                 std::uint64_t seed) {
  const auto& plan = result.plan;
  std::vector<std::unordered_map<dd::NodeId, double>> norms;
  std::vector<double> sliceNorm;
  double total = 0.0;
  for (const auto& rs : result.ranks) {
    norms.push_back(rs.pkg->nodeNorms(rs.part));
    const double n =
        rs.part.isZero()
            ? 0.0
            : std::norm(rs.part.weight) *
                  (rs.part.isTerminal() ? 1.0 : norms.back().at(rs.part.node));
    sliceNorm.push_back(n);
    total += n;
  }
  if (!std::isfinite(total) || std::abs(total - 1.0) > 1e-6) {
    throw NumericDomainError("cannot sample: squared norm is " +
                             std::to_string(total));
  }

  std::mt19937_64 rng(seed);
  const auto uniform = [&] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  const auto nodeNorm = [](const std::unordered_map<dd::NodeId, double>& memo,
                           dd::NodeId id) {
    return id == dd::kTerminal ? 1.0 : memo.at(id);
  };

  Histogram hist;
  for (std::uint64_t shot = 0; shot < shots; ++shot) {
    std::size_t rank = 0;
    double u = uniform() * total;
    for (rank = 0; rank + 1 < sliceNorm.size(); ++rank) {
      if (sliceNorm[rank] > 0.0 && u < sliceNorm[rank]) {
        break;
      }
      u -= sliceNorm[rank];
    }
    while (sliceNorm[rank] == 0.0 && rank > 0) {
      --rank; // rounding pushed the draw past the last non-empty slice
    }
    const auto& rs = result.ranks[rank];
    const auto& memo = norms[rank];
    std::uint64_t phys = static_cast<std::uint64_t>(rank) << plan.nLocal;
    dd::NodeId node = rs.part.node;
    for (int lvl = plan.nLocal - 1; lvl >= 0; --lvl) {
      const auto& children = rs.pkg->vectorNode(node).children;
      const double p0 = children[0].isZero()
                            ? 0.0
                            : std::norm(children[0].weight) *
                                  nodeNorm(memo, children[0].node);
      const double p1 = children[1].isZero()
                            ? 0.0
                            : std::norm(children[1].weight) *
                                  nodeNorm(memo, children[1].node);
      const int bit = (p1 > 0.0 && (p0 == 0.0 || uniform() * (p0 + p1) >= p0))
                          ? 1
                          : 0;
      phys |= static_cast<std::uint64_t>(bit) << lvl;
      node = children[bit].node;
    }
    const auto logical = result.layout.toLogicalIndex(phys);
    std::string bits(static_cast<std::size_t>(plan.N), '0');
    for (int q = 0; q < plan.N; ++q) {
      if (((logical >> q) & 1U) != 0) {
        bits[static_cast<std::size_t>(plan.N - 1 - q)] = '1';
      }
    }
    ++hist[bits];
  }
  return hist;
}

} // namespace qdist
