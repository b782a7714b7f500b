#include "qdist/circuit.hpp"

#include "qdist/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

namespace qdist {

namespace {

struct KindInfo {
  GateKind kind;
  std::string_view name;
  std::size_t params;
  std::size_t targets;
};

constexpr std::array<KindInfo, 13> kKinds{{
    {GateKind::H, "h", 0, 1},
    {GateKind::X, "x", 0, 1},
    {GateKind::Y, "y", 0, 1},
    {GateKind::Z, "z", 0, 1},
    {GateKind::S, "s", 0, 1},
    {GateKind::Sdg, "sdg", 0, 1},
    {GateKind::T, "t", 0, 1},
    {GateKind::Tdg, "tdg", 0, 1},
    {GateKind::RX, "rx", 1, 1},
    {GateKind::RY, "ry", 1, 1},
    {GateKind::RZ, "rz", 1, 1},
    {GateKind::Phase, "u1", 1, 1},
    {GateKind::Swap, "swap", 0, 2},
}};

const KindInfo& info(GateKind kind) noexcept {
  return kKinds[static_cast<std::size_t>(kind)];
}

} // namespace

std::string_view gateName(GateKind kind) noexcept { return info(kind).name; }

std::optional<GateKind> gateKindFromName(std::string_view name) {
  if (name == "p") {
    return GateKind::Phase;
  }
  for (const auto& k : kKinds) {
    if (k.name == name) {
      return k.kind;
    }
  }
  return std::nullopt;
}

std::size_t paramCount(GateKind kind) noexcept { return info(kind).params; }

std::size_t targetCount(GateKind kind) noexcept { return info(kind).targets; }

std::vector<Qubit> Gate::qubits() const {
  std::vector<Qubit> all = targets;
  all.insert(all.end(), controls.begin(), controls.end());
  return all;
}

Gate Gate::inverse() const {
  Gate g = *this;
  switch (kind) {
  case GateKind::S:
    g.kind = GateKind::Sdg;
    break;
  case GateKind::Sdg:
    g.kind = GateKind::S;
    break;
  case GateKind::T:
    g.kind = GateKind::Tdg;
    break;
  case GateKind::Tdg:
    g.kind = GateKind::T;
    break;
  case GateKind::RX:
  case GateKind::RY:
  case GateKind::RZ:
  case GateKind::Phase:
    g.params[0] = -params[0];
    break;
  default:
    break;
  }
  return g;
}

dd::Matrix2 Gate::matrix() const {
  using std::numbers::sqrt2;
  const Complex i{0.0, 1.0};
  switch (kind) {
  case GateKind::H:
    return {1.0 / sqrt2, 1.0 / sqrt2, 1.0 / sqrt2, -1.0 / sqrt2};
  case GateKind::X:
    return {0.0, 1.0, 1.0, 0.0};
  case GateKind::Y:
    return {0.0, -i, i, 0.0};
  case GateKind::Z:
    return {1.0, 0.0, 0.0, -1.0};
  case GateKind::S:
    return {1.0, 0.0, 0.0, i};
  case GateKind::Sdg:
    return {1.0, 0.0, 0.0, -i};
  case GateKind::T:
    return {1.0, 0.0, 0.0, Complex{1.0 / sqrt2, 1.0 / sqrt2}};
  case GateKind::Tdg:
    return {1.0, 0.0, 0.0, Complex{1.0 / sqrt2, -1.0 / sqrt2}};
  case GateKind::RX: {
    const double c = std::cos(params[0] / 2);
    const double s = std::sin(params[0] / 2);
    return {c, Complex{0.0, -s}, Complex{0.0, -s}, c};
  }
  case GateKind::RY: {
    const double c = std::cos(params[0] / 2);
    const double s = std::sin(params[0] / 2);
    return {c, -s, s, c};
  }
  case GateKind::RZ: {
    const double h = params[0] / 2;
    return {std::polar(1.0, -h), 0.0, 0.0, std::polar(1.0, h)};
  }
  case GateKind::Phase:
    return {1.0, 0.0, 0.0, std::polar(1.0, params[0])};
  case GateKind::Swap:
    break;
  }
  throw ArgumentError("swap has no single-qubit matrix");
}

Gate makeGate(GateKind kind, std::vector<Qubit> targets,
              std::vector<Qubit> controls, std::vector<double> params) {
  return Gate{kind, std::move(params), std::move(targets), std::move(controls)};
}

void validateGate(const Gate& gate, int nQubits) {
  const auto name = std::string(gateName(gate.kind));
  if (gate.params.size() != paramCount(gate.kind)) {
    throw ArgumentError(name + ": expected " +
                        std::to_string(paramCount(gate.kind)) +
                        " parameter(s)");
  }
  if (gate.targets.size() != targetCount(gate.kind)) {
    throw ArgumentError(name + ": expected " +
                        std::to_string(targetCount(gate.kind)) + " target(s)");
  }
  for (const double p : gate.params) {
    if (!std::isfinite(p)) {
      throw ArgumentError(name + ": non-finite parameter");
    }
  }
  auto all = gate.qubits();
  for (const auto q : all) {
    if (q < 0 || q >= nQubits) {
      throw ArgumentError(name + ": qubit " + std::to_string(q) +
                          " out of range for width " + std::to_string(nQubits));
    }
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw ArgumentError(name + ": targets and controls must be distinct");
  }
}

Circuit::Circuit(int nQubits) : nQubits_(nQubits) {
  if (nQubits < 0) {
    throw ArgumentError("circuit width must be non-negative");
  }
}

void Circuit::append(Gate gate) {
  validateGate(gate, nQubits_);
  gates_.push_back(std::move(gate));
}

void Circuit::append(const Circuit& other) {
  if (other.nQubits() > nQubits_) {
    throw ArgumentError("appended circuit is wider than the target");
  }
  gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
}

void Circuit::appendInverse(const Circuit& other) {
  if (other.nQubits() > nQubits_) {
    throw ArgumentError("appended circuit is wider than the target");
  }
  for (auto it = other.gates_.rbegin(); it != other.gates_.rend(); ++it) {
    gates_.push_back(it->inverse());
  }
}

} // namespace qdist
