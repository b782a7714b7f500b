#include "qdist/engine.hpp"
#include "qdist/errors.hpp"
#include "qdist/gate_dd.hpp"
#include "qdist/generators.hpp"
#include "qdist/oracle.hpp"

#include "support.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace qdist;
using qdist::testing::maxAbsDiff;

namespace {

RunConfig config(int ranks, CommSchedule comm = CommSchedule::Ring,
                 SwapMode swap = SwapMode::None) {
  RunConfig c;
  c.ranks = ranks;
  c.comm = comm;
  c.swap = swap;
  c.receiveTimeout = std::chrono::seconds(60);
  return c;
}

Circuit topQubitPattern(int n, int gates) {
  Circuit c(n);
  const std::vector<GateKind> kinds{GateKind::H, GateKind::T, GateKind::H,
                                    GateKind::S};
  for (int i = 0; i < gates; ++i) {
    c.append(makeGate(kinds[static_cast<std::size_t>(i) % kinds.size()], {n - 1}));
  }
  return c;
}

} // namespace

TEST_CASE("empty circuit leaves |0...0> on rank 0") {
  for (const int p : {1, 2, 4}) {
    const auto r = runCircuit(Circuit(3), config(p));
    CHECK(r.totalMessages() == 0);
    CHECK(queryAmplitude(r, "000") == Complex{1.0});
    CHECK(queryAmplitude(r, "100") == Complex{});
    for (std::size_t k = 1; k < r.ranks.size(); ++k) {
      CHECK(r.ranks[k].part.isZero());
    }
  }
}

TEST_CASE("local gate on four ranks touches only rank 0") {
  Circuit c(3);
  c.append(makeGate(GateKind::H, {0}));
  const auto r = runCircuit(c, config(4));
  CHECK(r.totalMessages() == 0);
  CHECK(r.localApplies == 1);
  CHECK(r.globalApplies == 0);
  const double s = 1.0 / std::numbers::sqrt2;
  CHECK(std::abs(queryAmplitude(r, "000") - s) < 1e-15);
  CHECK(std::abs(queryAmplitude(r, "001") - s) < 1e-15);
  for (std::size_t k = 1; k < 4; ++k) {
    CHECK(r.ranks[k].part.isZero());
  }
}

TEST_CASE("H on the top qubit through both schedules") {
  Circuit c(3);
  c.append(makeGate(GateKind::H, {2}));
  for (const auto comm : {CommSchedule::Ring, CommSchedule::Broadcast}) {
    const auto r = runCircuit(c, config(2, comm));
    CHECK(r.globalApplies == 1);
    CHECK(r.totalMessages() == 2);
    const double s = 1.0 / std::numbers::sqrt2;
    CHECK(std::abs(queryAmplitude(r, "000") - s) < 1e-15);
    CHECK(std::abs(queryAmplitude(r, "100") - s) < 1e-15);
    CHECK(maxAbsDiff(mergedAmplitudes(r), denseOracle(c)) < 1e-15);
  }
}

TEST_CASE("identity forced through the distributed path leaves the state") {
  std::mt19937_64 rng(81);
  auto c = qdist::testing::randomCircuit(rng, 4, 12);
  const auto before = mergedAmplitudes(runCircuit(c, config(1)));
  c.append(makeGate(GateKind::RZ, {3}, {}, {0.0}));
  c.append(makeGate(GateKind::RZ, {0}, {}, {0.0}));
  for (const auto comm : {CommSchedule::Ring, CommSchedule::Broadcast}) {
    auto cfg = config(4, comm);
    cfg.forceGlobal = true;
    const auto r = runCircuit(c, cfg);
    CHECK(r.localApplies == 0);
    CHECK(maxAbsDiff(mergedAmplitudes(r), before) < 1e-12);
  }
}

TEST_CASE("ring schedule consumes blocks in arrival order") {
  // swap of the two global positions couples every rank pair's blocks
  // only through a permutation, so disable skipping to see every round
  const auto plan = PartitionPlan::make(4, 4);
  auto cfg = config(4);
  cfg.skipZeroBlocks = false;
  std::vector<std::vector<int>> consumed(4);
  std::vector<dd::Package> pkgs(4);
  runCluster({4}, [&](Endpoint& ep) {
    const auto r = static_cast<std::size_t>(ep.rank());
    RankSimulator sim(ep, pkgs[r], plan, cfg);
    sim.applyGlobal(makeGate(GateKind::Swap, {2, 3}), CommSchedule::Ring);
    consumed[r] = sim.consumedBlocks();
  });
  for (int r = 0; r < 4; ++r) {
    CHECK(consumed[static_cast<std::size_t>(r)] ==
          std::vector<int>{r, (r + 3) % 4, (r + 2) % 4, (r + 1) % 4});
  }

  // with skipping only the one nonzero block is multiplied
  cfg.skipZeroBlocks = true;
  std::vector<dd::Package> pkgs2(4);
  runCluster({4}, [&](Endpoint& ep) {
    const auto r = static_cast<std::size_t>(ep.rank());
    RankSimulator sim(ep, pkgs2[r], plan, cfg);
    sim.applyGlobal(makeGate(GateKind::Swap, {2, 3}), CommSchedule::Broadcast);
    consumed[r] = sim.consumedBlocks();
  });
  // rank r receives from the rank with its two top bits exchanged
  for (int r = 0; r < 4; ++r) {
    const int src = ((r & 1) << 1) | (r >> 1);
    CHECK(consumed[static_cast<std::size_t>(r)] == std::vector<int>{src});
  }
}

TEST_CASE("message accounting for one global gate") {
  Circuit c(4);
  c.append(makeGate(GateKind::H, {3}));
  const auto ring = runCircuit(c, config(4, CommSchedule::Ring));
  const auto bcast = runCircuit(c, config(4, CommSchedule::Broadcast));
  CHECK(ring.totalMessages() == 12);
  CHECK(bcast.totalMessages() == 12);
  CHECK(ring.maxSendsPerRound() == 1);
  CHECK(bcast.maxSendsPerRound() == 3);
  for (const auto& m : ring.metrics) {
    CHECK(m.messagesSent == 3);
    CHECK(m.rounds == 3);
  }
  for (const auto& m : bcast.metrics) {
    CHECK(m.messagesSent == 3);
    CHECK(m.rounds == 4);
  }
}

TEST_CASE("message totals scale with global gates when swaps are off") {
  std::mt19937_64 rng(82);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = qdist::testing::randomCircuit(rng, 5, 20);
    for (const int p : {2, 4}) {
      for (const auto comm : {CommSchedule::Ring, CommSchedule::Broadcast}) {
        const auto r = runCircuit(c, config(p, comm));
        const auto plan = PartitionPlan::make(5, p);
        std::size_t globals = 0;
        for (const auto& g : c.gates()) {
          globals += classifyPhysical(g, plan) == GateScope::Global ? 1 : 0;
        }
        CHECK(r.globalApplies == globals);
        CHECK(r.totalMessages() ==
              globals * static_cast<std::size_t>(p) * static_cast<std::size_t>(p - 1));
      }
    }
  }
}

TEST_CASE("four gates on the top qubit: swaps replace the global applies") {
  const auto c = topQubitPattern(4, 4);
  const auto reference = denseOracle(c);
  auto none = config(2, CommSchedule::Ring, SwapMode::None);
  none.restoreLayout = true;
  const auto r0 = runCircuit(c, none);
  CHECK(r0.globalApplies == 4);
  CHECK(r0.swapsInserted == 0);
  for (const auto mode : {SwapMode::V1, SwapMode::V2}) {
    auto cfg = config(2, CommSchedule::Ring, mode);
    cfg.restoreLayout = true;
    const auto r = runCircuit(c, cfg);
    CHECK(r.globalApplies == 2);
    CHECK(r.localApplies == 4);
    CHECK(r.swapsInserted == 2);
    CHECK(r.layout.isIdentity());
    CHECK(maxAbsDiff(mergedAmplitudes(r), reference) < 1e-10);

    // without the restoring swap only the first one is needed
    cfg.restoreLayout = false;
    const auto once = runCircuit(c, cfg);
    CHECK(once.globalApplies == 1);
    CHECK(maxAbsDiff(mergedAmplitudes(once), reference) < 1e-10);
  }
}

TEST_CASE("property: every configuration agrees with the dense oracle") {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = qdist::testing::uniformInt(rng, 3, 6);
    const auto c = qdist::testing::randomCircuit(rng, n, 25);
    const auto oracle = denseOracle(c);
    for (const int p : {1, 2, 4, 8}) {
      if (p > (1 << n)) {
        continue;
      }
      for (const auto comm : {CommSchedule::Ring, CommSchedule::Broadcast}) {
        for (const auto swap : {SwapMode::None, SwapMode::V1, SwapMode::V2}) {
          auto cfg = config(p, comm, swap);
          cfg.traceNorms = true;
          const auto r = runCircuit(c, cfg);
          CHECK(maxAbsDiff(mergedAmplitudes(r), oracle) < 1e-10);
          for (const double norm : r.normTrace) {
            CHECK(std::abs(norm - 1.0) < 1e-9);
          }
          // spot-check the query path as well
          const std::uint64_t i = rng() % oracle.size();
          CHECK(std::abs(queryAmplitude(r, i) - oracle[i]) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("zero-block skipping does not change amplitudes") {
  std::mt19937_64 rng(84);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = qdist::testing::randomCircuit(rng, 5, 25);
    for (const auto comm : {CommSchedule::Ring, CommSchedule::Broadcast}) {
      auto cfg = config(4, comm, SwapMode::V2);
      const auto a = runCircuit(c, cfg);
      cfg.skipZeroBlocks = false;
      const auto b = runCircuit(c, cfg);
      CHECK(maxAbsDiff(mergedAmplitudes(a), mergedAmplitudes(b)) < 1e-12);
    }
  }
}

TEST_CASE("runs are deterministic across scheduling and transport") {
  std::mt19937_64 rng(85);
  const auto c = qdist::testing::randomCircuit(rng, 6, 30);
  auto cfg = config(4, CommSchedule::Ring, SwapMode::V1);
  const auto a = runCircuit(c, cfg);
  const auto a2 = runCircuit(c, cfg);
  cfg.scheduling = Scheduling::Sequential;
  const auto b = runCircuit(c, cfg);
  cfg.scheduling = Scheduling::Concurrent;
  cfg.transport = TransportKind::Socket;
  const auto s = runCircuit(c, cfg);
  CHECK(a.metrics == a2.metrics);
  CHECK(a.metrics == b.metrics);
  CHECK(a.metrics == s.metrics);
  const auto ma = mergedAmplitudes(a);
  CHECK(ma == mergedAmplitudes(a2));
  CHECK(ma == mergedAmplitudes(b));
  CHECK(ma == mergedAmplitudes(s));
}

TEST_CASE("reclamation at a low watermark keeps results intact") {
  const auto c = genQcbm(6, 3, 7);
  auto cfg = config(2, CommSchedule::Ring, SwapMode::V1);
  const auto a = runCircuit(c, cfg);
  cfg.reclaimWatermark = 16;
  const auto b = runCircuit(c, cfg);
  CHECK(maxAbsDiff(mergedAmplitudes(a), mergedAmplitudes(b)) < 1e-12);
  for (const auto& rs : b.ranks) {
    CHECK(rs.pkg->nodeCount() < rs.pkg->size(rs.part) + 400);
  }
}

TEST_CASE("width and rank errors") {
  CHECK_THROWS_AS((void)runCircuit(Circuit(2), config(8)), ArgumentError);
  CHECK_THROWS_AS((void)runCircuit(Circuit(2), config(3)), ArgumentError);
  const auto plan = PartitionPlan::make(3, 2);
  CHECK_THROWS_AS((void)scheduleCircuit(Circuit(4), plan, SwapMode::None),
                  ArgumentError);
}

TEST_CASE("queries through a permuted layout") {
  std::mt19937_64 rng(86);
  const auto c = qdist::testing::randomCircuit(rng, 5, 30);
  const auto ref = runCircuit(c, config(1));
  const auto swapped = runCircuit(c, config(4, CommSchedule::Ring, SwapMode::V2));
  for (std::uint64_t i = 0; i < 32; ++i) {
    CHECK(std::abs(queryAmplitude(ref, i) - queryAmplitude(swapped, i)) < 1e-10);
  }
  CHECK_THROWS_AS((void)queryAmplitude(ref, "0101"), ArgumentError);
  CHECK_THROWS_AS((void)queryAmplitude(ref, std::uint64_t{32}), ArgumentError);
}

TEST_CASE("sample") {
  SUBCASE("basis state") {
    Circuit c(3);
    c.append(makeGate(GateKind::X, {0}));
    c.append(makeGate(GateKind::X, {2}));
    const auto r = runCircuit(c, config(2, CommSchedule::Ring, SwapMode::V1));
    const auto h = sample(r, 500, 1);
    REQUIRE(h.size() == 1);
    CHECK(h.at("101") == 500);
  }
  SUBCASE("uniform two-qubit superposition") {
    Circuit c(2);
    c.append(makeGate(GateKind::H, {0}));
    c.append(makeGate(GateKind::H, {1}));
    const auto r = runCircuit(c, config(2));
    const std::uint64_t shots = 100000;
    const auto h = sample(r, shots, 9);
    REQUIRE(h.size() == 4);
    for (const auto& [bits, count] : h) {
      CHECK(std::abs(static_cast<double>(count) / shots - 0.25) < 0.01);
    }
    CHECK(sample(r, shots, 9) == h);
    CHECK_FALSE(sample(r, shots, 10) == h);
  }
  SUBCASE("logical bit order survives swaps") {
    Circuit c(4);
    c.append(makeGate(GateKind::X, {3}));
    c.append(makeGate(GateKind::H, {3}));
    c.append(makeGate(GateKind::X, {1}, {3}));
    // (|0000> - |1010>)/sqrt2
    for (const auto swap : {SwapMode::None, SwapMode::V1, SwapMode::V2}) {
      const auto r = runCircuit(c, config(4, CommSchedule::Ring, swap));
      const auto h = sample(r, 2000, 3);
      CHECK(h.size() == 2);
      CHECK(h.count("0000") == 1);
      CHECK(h.count("1010") == 1);
    }
  }
  SUBCASE("unnormalized state is rejected") {
    auto r = runCircuit(Circuit(2), config(1));
    r.ranks[0].part.weight *= 2.0;
    CHECK_THROWS_AS((void)sample(r, 1, 0), NumericDomainError);
  }
}

TEST_CASE("fidelity") {
  Circuit c(3);
  c.append(makeGate(GateKind::H, {1}));
  const auto r = runCircuit(c, config(2));
  CHECK(fidelity(r, denseOracle(c)) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<Complex> orth(8, 0.0);
  orth[4] = 1.0;
  CHECK(fidelity(r, orth) == doctest::Approx(0.0));
  CHECK_THROWS_AS((void)fidelity(r, std::vector<Complex>(4)), ArgumentError);
}
