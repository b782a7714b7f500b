#pragma once

#include "qdist/circuit.hpp"
#include "qdist/dd.hpp"
#include "qdist/layout.hpp"
#include "qdist/partition.hpp"
#include "qdist/swap.hpp"
#include "qdist/transport.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace qdist {

enum class CommSchedule { Ring, Broadcast };

struct RunConfig {
  int ranks = 1;
  CommSchedule comm = CommSchedule::Ring;
  SwapMode swap = SwapMode::None;
  std::uint64_t seed = 0;
  /// Reclaim unreachable nodes at a gate boundary once a rank's tables grow
  /// past this many nodes.
  std::size_t reclaimWatermark = std::size_t{1} << 20;
  bool skipZeroBlocks = true;
  /// Record the global squared norm after every applied operation.
  bool traceNorms = false;
  /// Debug: send every gate through the distributed path.
  bool forceGlobal = false;
  /// Append swaps after the last gate that bring the layout back to the
  /// identity, so the ranks end up holding logical slices.
  bool restoreLayout = false;
  TransportKind transport = TransportKind::InProc;
  Scheduling scheduling = Scheduling::Concurrent;
  std::chrono::milliseconds receiveTimeout{std::chrono::minutes(10)};
  dd::PackageConfig package{};
};

/// A gate at physical positions, as the ranks execute it.
struct ScheduledOp {
  Gate gate;
  GateScope scope = GateScope::Local;
  bool inserted = false; // planned swap
};

struct Schedule {
  std::vector<ScheduledOp> ops;
  QubitLayout finalLayout;
  std::size_t swapsInserted = 0;
};

/// Walks the circuit through the live layout, inserting swaps in front of
/// every global gate when a swap mode is set.
[[nodiscard]] Schedule scheduleCircuit(const Circuit& circuit,
                                       const PartitionPlan& plan,
                                       SwapMode mode, bool forceGlobal = false,
                                       bool restoreLayout = false);

/// One rank's share of the simulation. Owns nothing; the package and
/// endpoint belong to the caller.
class RankSimulator {
public:
  RankSimulator(Endpoint& endpoint, dd::Package& pkg, const PartitionPlan& plan,
                const RunConfig& config);

  [[nodiscard]] const dd::VectorEdge& state() const noexcept { return state_; }
  void setState(const dd::VectorEdge& v) { state_ = v; }

  void applyLocal(const Gate& physicalGate);
  void applyGlobal(const Gate& physicalGate, CommSchedule comm);
  void apply(const ScheduledOp& op);

  /// Source ranks whose blocks were multiplied during the last global
  /// apply, in accumulation order.
  [[nodiscard]] const std::vector<int>& consumedBlocks() const noexcept {
    return consumed_;
  }

  /// Gate boundary bookkeeping: peak node count and reclamation.
  void endGate();

private:
  dd::VectorEdge receiveBlockInput(const Bytes& bytes);

  Endpoint& ep_;
  dd::Package& pkg_;
  PartitionPlan plan_;
  const RunConfig& config_;
  dd::VectorEdge state_;
  std::vector<int> consumed_;
};

struct RankState {
  std::unique_ptr<dd::Package> pkg;
  dd::VectorEdge part;
};

struct RunResult {
  PartitionPlan plan;
  QubitLayout layout{0};
  std::vector<RankState> ranks;
  std::vector<CommMetrics> metrics;
  std::size_t globalApplies = 0;
  std::size_t localApplies = 0;
  std::size_t swapsInserted = 0;
  /// Global squared norm after each operation, when traced.
  std::vector<double> normTrace;

  [[nodiscard]] std::uint64_t totalMessages() const;
  [[nodiscard]] std::uint64_t maxSendsPerRound() const;
  [[nodiscard]] std::uint64_t peakNodes() const;
};

RunResult runCircuit(const Circuit& circuit, const RunConfig& config);

/// Amplitude at a logical basis index, routed through the layout.
[[nodiscard]] Complex queryAmplitude(const RunResult& result,
                                     std::uint64_t logicalIndex);
/// Bitstring form, most significant qubit first.
[[nodiscard]] Complex queryAmplitude(const RunResult& result,
                                     std::string_view logicalBits);

/// Full logical-order statevector. Limited to the dense oracle's width.
[[nodiscard]] std::vector<Complex> mergedAmplitudes(const RunResult& result);

/// |<oracle|state>|^2.
[[nodiscard]] double fidelity(const RunResult& result,
                              std::span<const Complex> oracle);

/// Histogram of logical bitstrings (most significant qubit first).
using Histogram = std::map<std::string, std::uint64_t>;
[[nodiscard]] Histogram sample(const RunResult& result, std::uint64_t shots,
                               std::uint64_t seed);

} // namespace qdist
