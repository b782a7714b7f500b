#pragma once

#include "qdist/circuit.hpp"
#include "qdist/engine.hpp"
#include "qdist/postprocess.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qdist::cli {

inline constexpr int kReportSchemaVersion = 1;

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRunError = 1;
inline constexpr int kExitUsage = 2;

/// A generated or loaded circuit plus what the report needs to know about
/// its origin.
struct CircuitSource {
  std::string description;
  Circuit circuit{0};
  /// Set for Shor circuits.
  std::optional<std::uint64_t> shorModulus;
  std::optional<std::uint64_t> shorBase;
};

/// "shor:n=15[,a=7]" or "qcbm:q=12,layers=8". Throws ArgumentError.
[[nodiscard]] CircuitSource generateCircuit(const std::string& spec,
                                            std::uint64_t seed);

struct Timings {
  double generate = 0.0;
  double simulate = 0.0;
  double oracle = 0.0;
  double sample = 0.0;
};

struct ReportInput {
  std::string command;
  const CircuitSource* source = nullptr;
  const RunConfig* config = nullptr;
  const RunResult* result = nullptr;
  Timings timings;
  std::optional<double> fidelity;
  std::optional<std::uint64_t> shots;
  const Histogram* histogram = nullptr;
  std::optional<FactorResult> factors;
};

/// RunReport as JSON. Wall-time fields live under "timing_seconds" only.
[[nodiscard]] nlohmann::json makeReport(const ReportInput& input);

/// Full command line without the program name.
int runCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

} // namespace qdist::cli
