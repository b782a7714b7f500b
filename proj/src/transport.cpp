#include "qdist/transport.hpp"

#include "qdist/errors.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include <sys/socket.h>
#include <unistd.h>

namespace qdist {

class Hub {
public:
  explicit Hub(const ClusterOptions& options)
      : options_(options), p_(options.ranks),
        boxes_(static_cast<std::size_t>(p_ * p_)),
        finished_(static_cast<std::size_t>(p_), false),
        waitingOn_(static_cast<std::size_t>(p_), -1) {}

  Hub(const Hub&) = delete;
  Hub& operator=(const Hub&) = delete;

  virtual ~Hub() = default;

  [[nodiscard]] int size() const noexcept { return p_; }
  [[nodiscard]] bool sequential() const noexcept {
    return options_.scheduling == Scheduling::Sequential;
  }

  virtual void send(int from, int to, const Bytes& payload) {
    deliver(from, to, Bytes(payload));
  }

  void deliver(int from, int to, Bytes payload) {
    {
      std::lock_guard lock(mu_);
      box(from, to).push_back(std::move(payload));
    }
    cv_.notify_all();
  }

  Bytes receive(int from, int to) {
    std::unique_lock lock(mu_);
    auto& q = box(from, to);
    if (sequential()) {
      if (q.empty()) {
        waitingOn_[static_cast<std::size_t>(to)] = from;
        passBaton(to);
        cv_.wait(lock, [&] { return aborted_ || current_ == to; });
        waitingOn_[static_cast<std::size_t>(to)] = -1;
      }
    } else {
      const bool ready = cv_.wait_for(lock, options_.receiveTimeout,
                                      [&] { return aborted_ || !q.empty(); });
      if (!ready) {
        abortLocked();
        throw TransportError("rank " + std::to_string(to) +
                             ": timed out waiting for rank " +
                             std::to_string(from));
      }
    }
    if (aborted_) {
      throw TransportError("rank " + std::to_string(to) +
                           ": cluster aborted while receiving");
    }
    Bytes out = std::move(q.front());
    q.pop_front();
    return out;
  }

  /// Sequential mode: block until this rank holds the baton.
  bool waitForTurn(int rank) {
    if (!sequential()) {
      return !aborted();
    }
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return aborted_ || current_ == rank; });
    return !aborted_;
  }

  void finish(int rank) {
    std::lock_guard lock(mu_);
    finished_[static_cast<std::size_t>(rank)] = true;
    if (sequential() && current_ == rank) {
      passBaton(rank);
    }
  }

  void fail(std::exception_ptr e) {
    {
      std::lock_guard lock(mu_);
      if (!error_) {
        error_ = std::move(e);
      }
      abortLocked();
    }
    cv_.notify_all();
  }

  [[nodiscard]] bool aborted() {
    std::lock_guard lock(mu_);
    return aborted_;
  }

  [[nodiscard]] std::exception_ptr error() {
    std::lock_guard lock(mu_);
    return error_;
  }

protected:
  void abortLocked() {
    aborted_ = true;
    cv_.notify_all();
  }

private:
  std::deque<Bytes>& box(int from, int to) {
    return boxes_[static_cast<std::size_t>(from * p_ + to)];
  }

  // Hands control to the next rank after `from` that can make progress.
  // Caller holds mu_.
  void passBaton(int from) {
    for (int step = 1; step <= p_; ++step) {
      const int r = (from + step) % p_;
      const auto ur = static_cast<std::size_t>(r);
      if (finished_[ur]) {
        continue;
      }
      const int w = waitingOn_[ur];
      if (w < 0 || !box(w, r).empty()) {
        current_ = r;
        cv_.notify_all();
        return;
      }
    }
    if (std::find(finished_.begin(), finished_.end(), false) !=
        finished_.end()) {
      if (!error_) {
        error_ = std::make_exception_ptr(
            TransportError("deadlock: every rank is waiting on a receive"));
      }
      abortLocked();
    }
  }

  ClusterOptions options_;
  int p_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::deque<Bytes>> boxes_;
  std::vector<bool> finished_;
  std::vector<int> waitingOn_;
  int current_ = 0;
  bool aborted_ = false;
  std::exception_ptr error_;
};

namespace {

bool writeAll(int fd, const std::uint8_t* data, std::size_t n) {
  while (n > 0) {
    const auto k = ::send(fd, data, n, MSG_NOSIGNAL);
    if (k < 0) {
      if (errno == EINTR) {
        continue;
      }
      return false;
    }
    data += k;
    n -= static_cast<std::size_t>(k);
  }
  return true;
}

// false on clean EOF before the first byte
bool readAll(int fd, std::uint8_t* data, std::size_t n, bool& eofAtStart) {
  eofAtStart = false;
  std::size_t got = 0;
  while (got < n) {
    const auto k = ::read(fd, data + got, n - got);
    if (k < 0) {
      if (errno == EINTR) {
        continue;
      }
      return false;
    }
    if (k == 0) {
      eofAtStart = got == 0;
      return false;
    }
    got += static_cast<std::size_t>(k);
  }
  return true;
}

/// One socketpair per unordered rank pair; frames carry a u32 little-endian
/// length prefix. Reader threads drain every socket into the mailboxes so
/// senders never block on an unread peer.
class SocketHub final : public Hub {
public:
  explicit SocketHub(const ClusterOptions& options)
      : Hub(options), fds_(static_cast<std::size_t>(size() * size()), -1) {
    for (int a = 0; a < size(); ++a) {
      for (int b = a + 1; b < size(); ++b) {
        int sv[2];
        if (::socketpair(AF_UNIX, SOCK_STREAM, 0, sv) != 0) {
          closeAll();
          throw TransportError("socketpair failed: " +
                               std::string(std::strerror(errno)));
        }
        fd(a, b) = sv[0];
        fd(b, a) = sv[1];
      }
    }
    for (int to = 0; to < size(); ++to) {
      for (int from = 0; from < size(); ++from) {
        if (from != to) {
          readers_.emplace_back([this, from, to] { drain(from, to); });
        }
      }
    }
  }

  ~SocketHub() override {
    for (int a = 0; a < size(); ++a) {
      for (int b = 0; b < size(); ++b) {
        if (a != b) {
          ::shutdown(fd(a, b), SHUT_WR);
        }
      }
    }
    for (auto& t : readers_) {
      t.join();
    }
    closeAll();
  }

  SocketHub(const SocketHub&) = delete;
  SocketHub& operator=(const SocketHub&) = delete;

  void send(int from, int to, const Bytes& payload) override {
    if (payload.size() > 0xFFFFFFFFu) {
      throw CapacityError("message larger than the frame limit");
    }
    std::array<std::uint8_t, 4> len{};
    const auto n = static_cast<std::uint32_t>(payload.size());
    for (int i = 0; i < 4; ++i) {
      len[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(n >> (8 * i));
    }
    const int f = fd(from, to);
    if (!writeAll(f, len.data(), len.size()) ||
        !writeAll(f, payload.data(), payload.size())) {
      throw TransportError("rank " + std::to_string(from) + ": send to rank " +
                           std::to_string(to) + " failed");
    }
  }

private:
  int& fd(int self, int peer) {
    return fds_[static_cast<std::size_t>(self * size() + peer)];
  }

  // reads frames that `from` wrote on its end, from the `to` end
  void drain(int from, int to) {
    const int f = fd(to, from);
    for (;;) {
      std::array<std::uint8_t, 4> len{};
      bool eof = false;
      if (!readAll(f, len.data(), len.size(), eof)) {
        if (!eof) {
          fail(std::make_exception_ptr(TransportError(
              "rank " + std::to_string(to) + ": connection to rank " +
              std::to_string(from) + " broken")));
        }
        return;
      }
      const std::uint32_t n = len[0] | (len[1] << 8) | (len[2] << 16) |
                              (std::uint32_t{len[3]} << 24);
      Bytes payload(n);
      if (n > 0 && !readAll(f, payload.data(), n, eof)) {
        fail(std::make_exception_ptr(TransportError(
            "rank " + std::to_string(to) + ": truncated frame from rank " +
            std::to_string(from))));
        return;
      }
      deliver(from, to, std::move(payload));
    }
  }

  void closeAll() {
    for (auto& f : fds_) {
      if (f >= 0) {
        ::close(f);
        f = -1;
      }
    }
  }

  std::vector<int> fds_;
  std::vector<std::thread> readers_;
};

} // namespace

Endpoint::Endpoint(Hub& hub, int rank) : hub_(hub), rank_(rank) {}

int Endpoint::size() const noexcept { return hub_.size(); }

void Endpoint::send(int to, const Bytes& payload) {
  if (to < 0 || to >= size() || to == rank_) {
    throw ArgumentError("invalid destination rank " + std::to_string(to));
  }
  hub_.send(rank_, to, payload);
  ++metrics_.messagesSent;
  metrics_.bytesSent += payload.size();
  ++sentThisRound_;
}

Bytes Endpoint::receive(int from) {
  if (from < 0 || from >= size() || from == rank_) {
    throw ArgumentError("invalid source rank " + std::to_string(from));
  }
  return hub_.receive(from, rank_);
}

void Endpoint::endRound() {
  ++metrics_.rounds;
  metrics_.maxSendsPerRound = std::max(metrics_.maxSendsPerRound, sentThisRound_);
  sentThisRound_ = 0;
}

Bytes ringShift(Endpoint& ep, const Bytes& payload) {
  const int p = ep.size();
  if (p == 1) {
    return payload;
  }
  const int r = ep.rank();
  ep.send((r + 1) % p, payload);
  auto in = ep.receive((r + p - 1) % p);
  ep.endRound();
  return in;
}

Bytes broadcastFrom(Endpoint& ep, int root, const std::optional<Bytes>& payload) {
  const int p = ep.size();
  if (root < 0 || root >= p) {
    throw ArgumentError("invalid broadcast root " + std::to_string(root));
  }
  const bool isRoot = ep.rank() == root;
  if (isRoot != payload.has_value()) {
    throw ArgumentError("exactly the broadcast root must supply a payload");
  }
  if (p == 1) {
    return *payload;
  }
  Bytes out;
  if (isRoot) {
    for (int k = 1; k < p; ++k) {
      ep.send((root + k) % p, *payload);
    }
    out = *payload;
  } else {
    out = ep.receive(root);
  }
  ep.endRound();
  return out;
}

std::vector<CommMetrics> runCluster(const ClusterOptions& options,
                                    const std::function<void(Endpoint&)>& body) {
  if (options.ranks < 1) {
    throw ArgumentError("cluster needs at least one rank");
  }
  if (options.transport == TransportKind::Socket &&
      options.scheduling == Scheduling::Sequential) {
    throw ArgumentError("sequential scheduling requires the in-process transport");
  }
  std::unique_ptr<Hub> hub;
  if (options.transport == TransportKind::Socket) {
    hub = std::make_unique<SocketHub>(options);
  } else {
    hub = std::make_unique<Hub>(options);
  }

  std::vector<Endpoint> endpoints;
  endpoints.reserve(static_cast<std::size_t>(options.ranks));
  for (int r = 0; r < options.ranks; ++r) {
    endpoints.emplace_back(*hub, r);
  }
  {
    std::vector<std::jthread> workers;
    workers.reserve(endpoints.size());
    for (auto& ep : endpoints) {
      workers.emplace_back([&hub, &ep, &body] {
        try {
          if (hub->waitForTurn(ep.rank())) {
            body(ep);
          }
        } catch (...) {
          hub->fail(std::current_exception());
        }
        hub->finish(ep.rank());
      });
    }
  }
  if (auto e = hub->error()) {
    std::rethrow_exception(e);
  }
  std::vector<CommMetrics> metrics;
  metrics.reserve(endpoints.size());
  for (const auto& ep : endpoints) {
    metrics.push_back(ep.metrics());
  }
  return metrics;
}

} // namespace qdist
