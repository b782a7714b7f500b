#pragma once

#include "qdist/wire.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace qdist {

struct CommMetrics {
  std::uint64_t messagesSent = 0;
  std::uint64_t bytesSent = 0;
  std::uint64_t rounds = 0;
  /// Most messages this rank sent within one schedule round.
  std::uint64_t maxSendsPerRound = 0;
  std::uint64_t globalApplies = 0;
  std::uint64_t localApplies = 0;
  std::uint64_t peakNodes = 0;
  std::uint64_t swapsInserted = 0;

  bool operator==(const CommMetrics&) const = default;
};

enum class TransportKind { InProc, Socket };
enum class Scheduling {
  Concurrent,
  /// One rank runs at a time; control passes at blocking receives in rank
  /// order. In-process transport only.
  Sequential,
};

class Hub;

/// One rank's view of the cluster. Messages between an ordered pair of ranks
/// arrive in send order.
class Endpoint {
public:
  Endpoint(Hub& hub, int rank);

  [[nodiscard]] int rank() const noexcept { return rank_; }
  [[nodiscard]] int size() const noexcept;
  [[nodiscard]] CommMetrics& metrics() noexcept { return metrics_; }
  [[nodiscard]] const CommMetrics& metrics() const noexcept { return metrics_; }

  /// Point-to-point primitives; counted in messagesSent/bytesSent.
  void send(int to, const Bytes& payload);
  Bytes receive(int from);

  /// Closes the current schedule round, recording how many messages this
  /// rank sent in it.
  void endRound();

private:
  Hub& hub_;
  int rank_;
  CommMetrics metrics_;
  std::uint64_t sentThisRound_ = 0;
};

/// Sends to (r+1) mod P and returns what (r-1) mod P sent. Collective.
Bytes ringShift(Endpoint& ep, const Bytes& payload);

/// Flat fan-out from `root`, which alone supplies a payload. Collective.
Bytes broadcastFrom(Endpoint& ep, int root, const std::optional<Bytes>& payload);

struct ClusterOptions {
  int ranks = 1;
  TransportKind transport = TransportKind::InProc;
  Scheduling scheduling = Scheduling::Concurrent;
  std::chrono::milliseconds receiveTimeout{std::chrono::minutes(10)};
};

/// Runs `body` once per rank, one thread each, and returns the per-rank
/// metrics. If any rank throws, blocked receivers are woken with a
/// TransportError and the first exception is rethrown after all ranks stop.
std::vector<CommMetrics> runCluster(const ClusterOptions& options,
                                    const std::function<void(Endpoint&)>& body);

} // namespace qdist
