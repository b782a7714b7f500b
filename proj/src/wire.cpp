#include "qdist/wire.hpp"

#include "qdist/errors.hpp"

#include <bit>
#include <cstring>
#include <limits>
#include <string>
#include <unordered_map>

namespace qdist {

using dd::kTerminal;
using dd::NodeId;
using dd::VectorEdge;

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'D', 'D', 'Q', 'W'};
constexpr std::size_t kHeaderSize = 12;
constexpr std::size_t kEdgeSize = 4 + 8 + 8;

class Writer {
public:
  explicit Writer(Bytes& out) : out_(out) {}
  void u8(std::uint8_t v) { put(v, 1); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }

private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) {
      out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  Bytes& out_;
};

class Reader {
public:
  Reader(std::span<const std::uint8_t> in, std::size_t start)
      : in_(in), pos_(start) {}
  [[nodiscard]] std::size_t offset() const noexcept { return pos_; }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  double f64() { return std::bit_cast<double>(get(8)); }

private:
  std::uint64_t get(int n) {
    if (in_.size() - pos_ < static_cast<std::size_t>(n)) {
      throw DecodeError(pos_, "truncated stream");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= std::uint64_t{in_[pos_ + static_cast<std::size_t>(i)]} << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_;
};

void writeEdge(Writer& w, const VectorEdge& e,
               const std::unordered_map<NodeId, std::uint32_t>& ordinal) {
  w.u32(e.isTerminal() ? kTerminal : ordinal.at(e.node));
  w.f64(e.weight.real());
  w.f64(e.weight.imag());
}

} // namespace

Bytes serializeDD(const dd::Package& pkg, const VectorEdge& v, int nQubits) {
  if (nQubits < 0 || nQubits > std::numeric_limits<std::uint16_t>::max()) {
    throw CapacityError("qubit count does not fit the wire header");
  }
  if (!v.isZero() && pkg.level(v) != nQubits - 1) {
    throw StructuralError("serializeDD: state level does not match qubit count");
  }

  // post-order, child 0 first
  std::vector<NodeId> order;
  std::unordered_map<NodeId, std::uint32_t> ordinal;
  if (!v.isTerminal()) {
    std::vector<std::pair<NodeId, int>> stack{{v.node, 0}};
    ordinal.emplace(v.node, 0); // placeholder marks "visited"
    while (!stack.empty()) {
      auto& [id, next] = stack.back();
      if (next < 2) {
        const auto& child = pkg.vectorNode(id).children[next++];
        if (!child.isTerminal() && ordinal.emplace(child.node, 0).second) {
          stack.emplace_back(child.node, 0);
        }
        continue;
      }
      ordinal[id] = static_cast<std::uint32_t>(order.size());
      order.push_back(id);
      stack.pop_back();
    }
  }
  if (order.size() >= kTerminal) {
    throw CapacityError("too many nodes for the wire format");
  }

  Bytes out;
  out.reserve(kHeaderSize + order.size() * (2 + 2 * kEdgeSize) + kEdgeSize);
  Writer w(out);
  for (const auto b : kMagic) {
    w.u8(b);
  }
  w.u16(kWireVersion);
  w.u16(static_cast<std::uint16_t>(nQubits));
  w.u32(static_cast<std::uint32_t>(order.size()));
  for (const auto id : order) {
    const auto& node = pkg.vectorNode(id);
    w.u16(static_cast<std::uint16_t>(node.level));
    for (const auto& child : node.children) {
      writeEdge(w, child, ordinal);
    }
  }
  writeEdge(w, v, ordinal);
  return out;
}

int wireQubitCount(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) {
    throw DecodeError(bytes.size(), "truncated header");
  }
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw DecodeError(0, "bad magic");
  }
  return bytes[6] | (bytes[7] << 8);
}

VectorEdge deserializeDD(dd::Package& pkg, std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() ||
      !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw DecodeError(0, "bad magic");
  }
  Reader r(bytes, kMagic.size());
  const auto versionAt = r.offset();
  const auto version = r.u16();
  if (version != kWireVersion) {
    throw DecodeError(versionAt,
                      "unsupported version " + std::to_string(version));
  }
  const auto qubits = r.u16();
  const auto countAt = r.offset();
  const auto count = r.u32();
  // bound the count by what the stream can hold before allocating
  const std::size_t remaining = bytes.size() - kHeaderSize;
  if (count > remaining / (2 + 2 * kEdgeSize)) {
    throw DecodeError(countAt, "node count " + std::to_string(count) +
                                   " exceeds stream length");
  }

  std::vector<VectorEdge> built;
  built.reserve(count);
  const auto readEdge = [&](std::size_t limit) {
    const auto start = r.offset();
    const auto target = r.u32();
    const double re = r.f64();
    const double im = r.f64();
    if (target != kTerminal && target >= limit) {
      throw DecodeError(start, "reference to node " + std::to_string(target) +
                                   " not yet defined");
    }
    Complex w;
    try {
      w = pkg.complexTable().intern(re, im);
    } catch (const NumericDomainError&) {
      throw DecodeError(start + 4, "non-finite weight");
    }
    if (target == kTerminal) {
      return w == kZero ? VectorEdge::zero() : VectorEdge{kTerminal, w};
    }
    auto e = pkg.scale(built[target], w);
    if (!e.isZero()) {
      e.weight = pkg.complexTable().intern(e.weight);
    }
    return e;
  };

  for (std::uint32_t i = 0; i < count; ++i) {
    const auto nodeAt = r.offset();
    const auto level = r.u16();
    std::array<VectorEdge, 2> children{readEdge(i), readEdge(i)};
    try {
      built.push_back(pkg.makeVectorNode(level, children));
    } catch (const StructuralError& e) {
      throw DecodeError(nodeAt, std::string("inconsistent node: ") + e.what());
    }
  }
  const auto rootAt = r.offset();
  const auto root = readEdge(count);
  if (r.offset() != bytes.size()) {
    throw DecodeError(r.offset(), "trailing bytes");
  }
  if (!root.isZero() && pkg.level(root) != static_cast<int>(qubits) - 1) {
    throw DecodeError(rootAt, "root level does not match qubit count " +
                           std::to_string(qubits));
  }
  return root;
}

} // namespace qdist
