#pragma once

#include "qdist/numerics.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qdist::dd {

using NodeId = std::uint32_t;

/// Handle of the terminal node, shared by vector and matrix diagrams.
inline constexpr NodeId kTerminal = 0xFFFFFFFFU;

/// Row-major 2x2 matrix (u00, u01, u10, u11).
using Matrix2 = std::array<Complex, 4>;

template <std::size_t Arity> struct Edge {
  NodeId node = kTerminal;
  Complex weight = kZero;

  [[nodiscard]] static constexpr Edge zero() noexcept { return {}; }
  [[nodiscard]] static constexpr Edge one() noexcept {
    return {kTerminal, kOne};
  }
  [[nodiscard]] bool isZero() const noexcept {
    return node == kTerminal && weight == kZero;
  }
  [[nodiscard]] bool isTerminal() const noexcept { return node == kTerminal; }

  /// Exact handle and weight equality.
  friend bool operator==(const Edge&, const Edge&) = default;
};

using VectorEdge = Edge<2>;
using MatrixEdge = Edge<4>;

struct VectorNode {
  int level = -1;
  std::array<VectorEdge, 2> children{};
};

/// Children indexed by 2 * row_bit + col_bit.
struct MatrixNode {
  int level = -1;
  std::array<MatrixEdge, 4> children{};
  bool identity = false;
};

struct PackageConfig {
  double tolerance = kDefaultTolerance;
  /// Slots per compute table (rounded up to a power of two).
  std::size_t cacheSlots = std::size_t{1} << 16;
};

/// A rank-local QMDD store: complex value table, unique tables for vector and
/// matrix nodes, and the compute caches for add, multiply and kron.
///
/// Levels: qubit 0 is the least significant index bit and the bottom level;
/// the root of an n-qubit diagram sits at level n-1. Diagrams never skip
/// levels, so every non-zero child of a level-l node targets a level l-1 node
/// (or the terminal when l = 0).
///
/// Normalization divides all child weights by the child weight of largest
/// magnitude (ties broken toward the lowest index) and moves the divisor onto
/// the incoming edge.
///
/// Not thread-safe; each rank owns its own package.
class Package {
public:
  explicit Package(PackageConfig config = {});

  Package(const Package&) = delete;
  Package& operator=(const Package&) = delete;
  Package(Package&&) = delete;
  Package& operator=(Package&&) = delete;

  [[nodiscard]] ComplexTable& complexTable() noexcept { return complex_; }
  [[nodiscard]] double tolerance() const noexcept { return config_.tolerance; }

  VectorEdge makeVectorNode(int level,
                            const std::array<VectorEdge, 2>& children);
  MatrixEdge makeMatrixNode(int level,
                            const std::array<MatrixEdge, 4>& children);

  [[nodiscard]] const VectorNode& vectorNode(NodeId id) const;
  [[nodiscard]] const MatrixNode& matrixNode(NodeId id) const;

  /// -1 for terminal edges (including the zero edge).
  [[nodiscard]] int level(const VectorEdge& e) const;
  [[nodiscard]] int level(const MatrixEdge& e) const;

  VectorEdge add(const VectorEdge& a, const VectorEdge& b);
  MatrixEdge add(const MatrixEdge& a, const MatrixEdge& b);
  VectorEdge multiply(const MatrixEdge& m, const VectorEdge& v);
  /// Kronecker product with `hi` on the more significant qubits.
  MatrixEdge kron(const MatrixEdge& hi, const MatrixEdge& lo);

  [[nodiscard]] VectorEdge scale(const VectorEdge& e, const Complex& w) const;
  [[nodiscard]] MatrixEdge scale(const MatrixEdge& e, const Complex& w) const;

  MatrixEdge identity(int nQubits);
  VectorEdge basisState(int nQubits, std::uint64_t index);
  /// Kronecker product of per-level 2x2 factors; `factors[q]` acts on qubit q.
  MatrixEdge productOperator(std::span<const Matrix2> factors);

  /// `bits` is most significant first; its length must equal the qubit count.
  [[nodiscard]] Complex amplitude(const VectorEdge& v,
                                  std::string_view bits) const;
  [[nodiscard]] Complex amplitude(const VectorEdge& v, int nQubits,
                                  std::uint64_t index) const;
  [[nodiscard]] double squaredNorm(const VectorEdge& v) const;

  /// Per-node squared norms of everything reachable from `v`, unit incoming
  /// weight. Used by sampling.
  [[nodiscard]] std::unordered_map<NodeId, double>
  nodeNorms(const VectorEdge& v) const;

  /// Mark-and-sweep: frees every node not reachable from the given roots and
  /// clears the compute caches. Returns the number of freed nodes.
  std::size_t reclaim(std::span<const VectorEdge> vectorRoots,
                      std::span<const MatrixEdge> matrixRoots = {});

  void clearComputeCaches();

  [[nodiscard]] std::size_t vectorNodeCount() const noexcept {
    return vectorUnique_.size();
  }
  [[nodiscard]] std::size_t matrixNodeCount() const noexcept {
    return matrixUnique_.size();
  }
  [[nodiscard]] std::size_t nodeCount() const noexcept {
    return vectorNodeCount() + matrixNodeCount();
  }
  /// Distinct non-terminal nodes reachable from `v`.
  [[nodiscard]] std::size_t size(const VectorEdge& v) const;
  [[nodiscard]] std::size_t size(const MatrixEdge& m) const;

  [[nodiscard]] std::vector<Complex> toDense(const VectorEdge& v,
                                             int nQubits) const;
  /// Row-major 2^n x 2^n expansion.
  [[nodiscard]] std::vector<Complex> toDense(const MatrixEdge& m,
                                             int nQubits) const;
  VectorEdge fromDense(std::span<const Complex> amplitudes);
  MatrixEdge matrixFromDense(std::span<const Complex> rowMajor, int nQubits);

private:
  struct VectorKey {
    int level;
    std::array<VectorEdge, 2> children;
    bool operator==(const VectorKey&) const = default;
  };
  struct MatrixKey {
    int level;
    std::array<MatrixEdge, 4> children;
    bool operator==(const MatrixKey&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const VectorKey& k) const noexcept;
    std::size_t operator()(const MatrixKey& k) const noexcept;
  };

  /// Fixed-size memo table; a colliding insert overwrites the slot.
  template <typename Key, typename Value> class ComputeTable {
  public:
    explicit ComputeTable(std::size_t slots);
    const Value* lookup(const Key& key, std::size_t hash) const;
    void insert(const Key& key, std::size_t hash, const Value& value);
    void clear();

  private:
    struct Slot {
      Key key{};
      Value value{};
      bool used = false;
    };
    std::vector<Slot> slots_;
    std::size_t mask_;
  };

  struct AddKey {
    NodeId a;
    NodeId b;
    Complex ratio;
    bool operator==(const AddKey&) const = default;
  };
  struct PairKey {
    NodeId a;
    NodeId b;
    bool operator==(const PairKey&) const = default;
  };

  template <std::size_t Arity>
  Edge<Arity> normalizeAndStore(int level,
                                std::array<Edge<Arity>, Arity> children);
  template <std::size_t Arity>
  void checkChildren(int level, const std::array<Edge<Arity>, Arity>& children,
                     const char* what) const;
  template <std::size_t Arity>
  Edge<Arity> addImpl(const Edge<Arity>& a, const Edge<Arity>& b);
  VectorEdge multiplyNodes(NodeId m, NodeId v);
  MatrixEdge kronNodes(NodeId hi, NodeId lo, int loQubits);

  Complex canon(const Complex& c) { return complex_.intern(c); }

  PackageConfig config_;
  ComplexTable complex_;

  std::vector<VectorNode> vectorNodes_;
  std::vector<MatrixNode> matrixNodes_;
  std::vector<bool> vectorAlive_;
  std::vector<bool> matrixAlive_;
  std::vector<NodeId> vectorFree_;
  std::vector<NodeId> matrixFree_;
  std::unordered_map<VectorKey, NodeId, KeyHash> vectorUnique_;
  std::unordered_map<MatrixKey, NodeId, KeyHash> matrixUnique_;

  ComputeTable<AddKey, VectorEdge> vectorAddCache_;
  ComputeTable<AddKey, MatrixEdge> matrixAddCache_;
  ComputeTable<PairKey, VectorEdge> multiplyCache_;
  ComputeTable<PairKey, MatrixEdge> kronCache_;
  std::vector<MatrixEdge> identities_;
};

} // namespace qdist::dd
