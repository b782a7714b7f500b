#include "qdist/cli.hpp"

#include "qdist/errors.hpp"
#include "qdist/generators.hpp"
#include "qdist/oracle.hpp"
#include "qdist/qasm.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace qdist::cli {

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t parseUnsigned(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(text, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw ArgumentError("'" + key + "' needs a non-negative integer, got '" +
                        text + "'");
  }
  return v;
}

std::map<std::string, std::string> parseFields(const std::string& body) {
  std::map<std::string, std::string> fields;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ArgumentError("expected key=value, got '" + item + "'");
    }
    if (!fields.emplace(item.substr(0, eq), item.substr(eq + 1)).second) {
      throw ArgumentError("duplicate key '" + item.substr(0, eq) + "'");
    }
  }
  return fields;
}

std::string toString(CommSchedule c) {
  return c == CommSchedule::Ring ? "ring" : "bcast";
}

std::string toString(SwapMode m) {
  switch (m) {
  case SwapMode::V1:
    return "v1";
  case SwapMode::V2:
    return "v2";
  case SwapMode::None:
    break;
  }
  return "none";
}

std::string toString(TransportKind t) {
  return t == TransportKind::Socket ? "socket" : "inproc";
}

nlohmann::json metricsJson(const CommMetrics& m) {
  return {{"messages_sent", m.messagesSent},
          {"bytes_sent", m.bytesSent},
          {"rounds", m.rounds},
          {"max_sends_per_round", m.maxSendsPerRound},
          {"global_applies", m.globalApplies},
          {"local_applies", m.localApplies},
          {"peak_nodes", m.peakNodes},
          {"swaps_inserted", m.swapsInserted}};
}

} // namespace

CircuitSource generateCircuit(const std::string& spec, std::uint64_t seed) {
  const auto colon = spec.find(':');
  const auto kind = spec.substr(0, colon);
  const auto fields = parseFields(
      colon == std::string::npos ? std::string() : spec.substr(colon + 1));
  const auto take = [&](const std::string& key) -> std::optional<std::uint64_t> {
    const auto it = fields.find(key);
    if (it == fields.end()) {
      return std::nullopt;
    }
    return parseUnsigned(key, it->second);
  };
  const auto allowOnly = [&](std::initializer_list<std::string> keys) {
    for (const auto& [k, v] : fields) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
        throw ArgumentError("unknown key '" + k + "' for " + kind);
      }
    }
  };

  CircuitSource src;
  if (kind == "shor") {
    allowOnly({"n", "a"});
    const auto n = take("n");
    if (!n) {
      throw ArgumentError("shor needs n=<number to factor>");
    }
    const auto a = take("a").value_or(0);
    const auto base = a == 0 ? defaultShorBase(*n) : a;
    src.circuit = genShor(*n, base);
    src.shorModulus = *n;
    src.shorBase = base;
    src.description =
        "shor:n=" + std::to_string(*n) + ",a=" + std::to_string(base);
  } else if (kind == "qcbm") {
    allowOnly({"q", "layers"});
    const auto q = take("q");
    const auto layers = take("layers");
    if (!q || !layers) {
      throw ArgumentError("qcbm needs q=<qubits>,layers=<count>");
    }
    if (*q > 64 || *layers > 100000) {
      throw ArgumentError("qcbm size out of range");
    }
    src.circuit =
        genQcbm(static_cast<int>(*q), static_cast<int>(*layers), seed);
    src.description = "qcbm:q=" + std::to_string(*q) +
                      ",layers=" + std::to_string(*layers) +
                      ",seed=" + std::to_string(seed);
  } else {
    throw ArgumentError("unknown circuit kind '" + kind +
                        "' (expected shor or qcbm)");
  }
  return src;
}

nlohmann::json makeReport(const ReportInput& in) {
  const auto& result = *in.result;
  const auto& config = *in.config;
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = in.command;
  j["config"] = {{"circuit", in.source->description},
                 {"qubits", in.source->circuit.nQubits()},
                 {"gates", in.source->circuit.size()},
                 {"ranks", config.ranks},
                 {"global_qubits", result.plan.M},
                 {"comm", toString(config.comm)},
                 {"swap", toString(config.swap)},
                 {"transport", toString(config.transport)},
                 {"restore_layout", config.restoreLayout},
                 {"seed", config.seed}};
  if (in.shots) {
    j["config"]["shots"] = *in.shots;
  }
  j["timing_seconds"] = {{"generate", in.timings.generate},
                         {"simulate", in.timings.simulate},
                         {"oracle", in.timings.oracle},
                         {"sample", in.timings.sample}};

  std::uint64_t bytes = 0;
  std::uint64_t rounds = 0;
  nlohmann::json ranks = nlohmann::json::array();
  for (std::size_t r = 0; r < result.metrics.size(); ++r) {
    auto m = metricsJson(result.metrics[r]);
    m["rank"] = r;
    const auto& rs = result.ranks[r];
    m["final_nodes"] = rs.pkg->size(rs.part);
    ranks.push_back(std::move(m));
    bytes += result.metrics[r].bytesSent;
    rounds = std::max(rounds, result.metrics[r].rounds);
  }
  j["ranks"] = std::move(ranks);
  j["totals"] = {{"messages_sent", result.totalMessages()},
                 {"bytes_sent", bytes},
                 {"rounds", rounds},
                 {"max_sends_per_round", result.maxSendsPerRound()},
                 {"global_applies", result.globalApplies},
                 {"local_applies", result.localApplies},
                 {"swaps_inserted", result.swapsInserted},
                 {"peak_nodes", result.peakNodes()}};
  j["final_layout"] = result.layout.physicalOrder();
  if (in.fidelity) {
    j["fidelity"] = *in.fidelity;
  }
  if (in.histogram != nullptr) {
    j["histogram"] = *in.histogram;
  }
  if (in.factors) {
    const auto& f = *in.factors;
    nlohmann::json post = {{"attempts", f.attempts},
                           {"period", f.period},
                           {"measured", f.measured}};
    if (f.factors) {
      post["factors"] = {f.factors->first, f.factors->second};
      post["status"] = "ok";
    } else {
      post["status"] = "retry";
    }
    j["shor"] = std::move(post);
  }
  return j;
}

namespace {

struct Options {
  std::vector<int> ranks{1};
  std::vector<std::string> comm{"ring"};
  std::vector<std::string> swap{"none"};
  std::string qasmFile;
  std::string circuitSpec;
  std::uint64_t seed = 0;
  std::uint64_t shots = 0;
  std::string reportFile;
  std::string transport = "inproc";
  std::string outFile;
  bool sequential = false;
  bool restoreLayout = false;
};

class UsageError : public Error {
public:
  using Error::Error;
};

CommSchedule commFrom(const std::string& s) {
  return s == "bcast" ? CommSchedule::Broadcast : CommSchedule::Ring;
}

SwapMode swapFrom(const std::string& s) {
  if (s == "v1") {
    return SwapMode::V1;
  }
  return s == "v2" ? SwapMode::V2 : SwapMode::None;
}

void addSourceFlags(CLI::App* cmd, Options& o) {
  auto* qasm = cmd->add_option("--qasm", o.qasmFile, "OpenQASM 2.0 input file");
  auto* circ = cmd->add_option(
      "--circuit", o.circuitSpec,
      "generated circuit: shor:n=15[,a=7] or qcbm:q=12,layers=8");
  qasm->excludes(circ);
  circ->excludes(qasm);
  cmd->add_option("--seed", o.seed, "seed for generators and sampling");
}

void addRunFlags(CLI::App* cmd, Options& o, bool sweep) {
  addSourceFlags(cmd, o);
  const CLI::IsMember commSet({"ring", "bcast"});
  const CLI::IsMember swapSet({"none", "v1", "v2"});
  if (sweep) {
    o.ranks = {1, 2, 4};
    o.comm = {"ring", "bcast"};
    o.swap = {"none", "v1", "v2"};
    cmd->add_option("--ranks", o.ranks, "rank counts to sweep")->delimiter(',');
    cmd->add_option("--comm", o.comm, "schedules to sweep")
        ->delimiter(',')
        ->check(commSet);
    cmd->add_option("--swap", o.swap, "swap modes to sweep")
        ->delimiter(',')
        ->check(swapSet);
  } else {
    cmd->add_option("--ranks", o.ranks, "rank count (power of two)")
        ->expected(1);
    cmd->add_option("--comm", o.comm, "ring or bcast")->expected(1)->check(commSet);
    cmd->add_option("--swap", o.swap, "none, v1 or v2")->expected(1)->check(swapSet);
  }
  cmd->add_option("--shots", o.shots, "samples to draw from the final state");
  cmd->add_option("--report", o.reportFile, "write the JSON report here");
  cmd->add_option("--transport", o.transport, "inproc or socket")
      ->check(CLI::IsMember({"inproc", "socket"}));
  cmd->add_flag("--sequential", o.sequential,
                "run ranks one at a time (in-process transport only)");
  cmd->add_flag("--restore-layout", o.restoreLayout,
                "swap qubits back to their original positions at the end");
}

CircuitSource loadSource(const Options& o) {
  if (o.qasmFile.empty() && o.circuitSpec.empty()) {
    throw UsageError("one of --qasm or --circuit is required");
  }
  if (!o.circuitSpec.empty()) {
    try {
      return generateCircuit(o.circuitSpec, o.seed);
    } catch (const ArgumentError& e) {
      throw UsageError(std::string("--circuit: ") + e.what());
    }
  }
  CircuitSource src;
  src.circuit = qasm::parseFile(o.qasmFile);
  src.description = "qasm:" + o.qasmFile;
  return src;
}

void validateRanks(const std::vector<int>& ranks) {
  for (const int p : ranks) {
    if (p < 1 || (p & (p - 1)) != 0) {
      throw UsageError("--ranks must be a power of two, got " +
                       std::to_string(p));
    }
  }
}

void writeReport(const std::string& path, const nlohmann::json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw ArgumentError("cannot write report '" + path + "'");
  }
  f << j.dump(2) << '\n';
  if (!f) {
    throw ArgumentError("failed writing report '" + path + "'");
  }
}

RunConfig configFor(const Options& o, int ranks, const std::string& comm,
                    const std::string& swap) {
  RunConfig c;
  c.ranks = ranks;
  c.comm = commFrom(comm);
  c.swap = swapFrom(swap);
  c.seed = o.seed;
  c.transport =
      o.transport == "socket" ? TransportKind::Socket : TransportKind::InProc;
  c.scheduling = o.sequential ? Scheduling::Sequential : Scheduling::Concurrent;
  c.restoreLayout = o.restoreLayout;
  return c;
}

nlohmann::json execute(const std::string& command, const CircuitSource& src,
                       double generateTime, const RunConfig& config,
                       std::uint64_t shots, std::ostream& out,
                       bool& verified) {
  if (config.ranks > 1 &&
      (src.circuit.nQubits() > 62 ||
       config.ranks > (std::int64_t{1} << src.circuit.nQubits()))) {
    throw UsageError("--ranks exceeds 2^qubits");
  }
  ReportInput in;
  in.command = command;
  in.source = &src;
  in.config = &config;
  in.timings.generate = generateTime;

  auto t = Clock::now();
  const auto result = runCircuit(src.circuit, config);
  in.timings.simulate = secondsSince(t);
  in.result = &result;

  verified = true;
  if (command == "verify") {
    t = Clock::now();
    const auto oracle = denseOracle(src.circuit);
    in.fidelity = fidelity(result, oracle);
    in.timings.oracle = secondsSince(t);
    verified = *in.fidelity >= 1.0 - 1e-9;
  }

  Histogram hist;
  if (shots > 0) {
    t = Clock::now();
    hist = sample(result, shots, config.seed);
    in.timings.sample = secondsSince(t);
    in.shots = shots;
    in.histogram = &hist;
    if (src.shorModulus) {
      in.factors = shorPostprocess(hist, *src.shorModulus, *src.shorBase);
    }
  }

  out << src.description << " | qubits=" << src.circuit.nQubits()
      << " gates=" << src.circuit.size() << " ranks=" << config.ranks
      << " comm=" << toString(config.comm) << " swap=" << toString(config.swap)
      << " | messages=" << result.totalMessages()
      << " global=" << result.globalApplies << " local=" << result.localApplies
      << " swaps=" << result.swapsInserted << " peak_nodes=" << result.peakNodes();
  if (in.fidelity) {
    out << " fidelity=" << *in.fidelity;
  }
  if (in.factors) {
    if (in.factors->factors) {
      out << " factors=" << in.factors->factors->first << "x"
          << in.factors->factors->second;
    } else {
      out << " factors=retry";
    }
  }
  out << '\n';
  return makeReport(in);
}

} // namespace

int runCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Distributed decision-diagram quantum circuit simulator"};
  app.name("qdsim");
  app.require_subcommand(1);
  Options runOpts;
  Options verifyOpts;
  Options benchOpts;
  Options genOpts;
  auto* run = app.add_subcommand("run", "simulate a circuit");
  addRunFlags(run, runOpts, false);
  auto* verify =
      app.add_subcommand("verify", "simulate and check against the dense oracle");
  addRunFlags(verify, verifyOpts, false);
  auto* bench = app.add_subcommand(
      "bench", "sweep rank count, schedule and swap mode; one report per run");
  addRunFlags(bench, benchOpts, true);
  auto* gen = app.add_subcommand("gen", "write a generated circuit as QASM");
  addSourceFlags(gen, genOpts);
  gen->add_option("-o,--output", genOpts.outFile, "output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      if (!genOpts.qasmFile.empty()) {
        throw UsageError("gen takes --circuit, not --qasm");
      }
      const auto src = loadSource(genOpts);
      if (genOpts.outFile.empty()) {
        qasm::print(src.circuit, out);
      } else {
        std::ofstream f(genOpts.outFile, std::ios::binary);
        if (!f) {
          throw ArgumentError("cannot write '" + genOpts.outFile + "'");
        }
        qasm::print(src.circuit, f);
      }
      return kExitOk;
    }

    auto* sub = run->parsed() ? run : verify->parsed() ? verify : bench;
    const auto& o = run->parsed() ? runOpts : verify->parsed() ? verifyOpts : benchOpts;
    validateRanks(o.ranks);
    if (o.sequential && o.transport == "socket") {
      throw UsageError("--sequential requires --transport inproc");
    }
    const auto t = Clock::now();
    const auto src = loadSource(o);
    const double generateTime = secondsSince(t);

    if (sub == bench) {
      nlohmann::json runs = nlohmann::json::array();
      for (const int p : o.ranks) {
        for (const auto& c : o.comm) {
          for (const auto& s : o.swap) {
            bool ok = true;
            runs.push_back(execute("bench", src, generateTime,
                                   configFor(o, p, c, s), o.shots, out, ok));
          }
        }
      }
      const nlohmann::json j = {{"schema_version", kReportSchemaVersion},
                                {"command", "bench"},
                                {"runs", std::move(runs)}};
      if (!o.reportFile.empty()) {
        writeReport(o.reportFile, j);
      }
      return kExitOk;
    }

    bool ok = true;
    const auto j = execute(sub->get_name(), src, generateTime,
                           configFor(o, o.ranks.front(), o.comm.front(),
                                     o.swap.front()),
                           o.shots, out, ok);
    if (!o.reportFile.empty()) {
      writeReport(o.reportFile, j);
    }
    if (!ok) {
      err << "error: fidelity " << j.at("fidelity").get<double>()
          << " below 1 - 1e-9\n";
      return kExitRunError;
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRunError;
  }
}

} // namespace qdist::cli
