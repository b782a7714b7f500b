#include "qdist/dd.hpp"

#include "qdist/errors.hpp"

#include <bit>
#include <cmath>
#include <string>
#include <utility>

namespace qdist::dd {

namespace {

constexpr std::uint64_t kMix = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) noexcept {
  v *= kMix;
  v ^= v >> 32;
  return (h ^ v) * 0xBF58476D1CE4E5B9ULL + (h >> 29);
}

std::uint64_t mixComplex(std::uint64_t h, const Complex& c) noexcept {
  h = mix(h, std::bit_cast<std::uint64_t>(c.real()));
  return mix(h, std::bit_cast<std::uint64_t>(c.imag()));
}

Complex mulWeights(const Complex& a, const Complex& b) noexcept {
  if (a == kZero || b == kZero) {
    return kZero;
  }
  if (a == kOne) {
    return b;
  }
  if (b == kOne) {
    return a;
  }
  return a * b;
}

bool nearZero(const Complex& c, double tolerance) noexcept {
  return std::abs(c.real()) < tolerance && std::abs(c.imag()) < tolerance;
}

std::size_t roundUpPow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) {
    p <<= 1U;
  }
  return p;
}

int log2Exact(std::size_t n, const char* what) {
  if (n == 0 || !std::has_single_bit(n)) {
    throw ArgumentError(std::string(what) + ": length must be a power of two");
  }
  return std::countr_zero(n);
}

} // namespace

std::size_t Package::KeyHash::operator()(const VectorKey& k) const noexcept {
  auto h = mix(0, static_cast<std::uint64_t>(k.level));
  for (const auto& c : k.children) {
    h = mix(h, c.node);
    h = mixComplex(h, c.weight);
  }
  return static_cast<std::size_t>(h);
}

std::size_t Package::KeyHash::operator()(const MatrixKey& k) const noexcept {
  auto h = mix(1, static_cast<std::uint64_t>(k.level));
  for (const auto& c : k.children) {
    h = mix(h, c.node);
    h = mixComplex(h, c.weight);
  }
  return static_cast<std::size_t>(h);
}

template <typename Key, typename Value>
Package::ComputeTable<Key, Value>::ComputeTable(std::size_t slots)
    : slots_(roundUpPow2(slots == 0 ? 1 : slots)), mask_(slots_.size() - 1) {}

template <typename Key, typename Value>
const Value*
Package::ComputeTable<Key, Value>::lookup(const Key& key,
                                          std::size_t hash) const {
  const auto& slot = slots_[hash & mask_];
  if (slot.used && slot.key == key) {
    return &slot.value;
  }
  return nullptr;
}

template <typename Key, typename Value>
void Package::ComputeTable<Key, Value>::insert(const Key& key,
                                               std::size_t hash,
                                               const Value& value) {
  auto& slot = slots_[hash & mask_];
  slot.key = key;
  slot.value = value;
  slot.used = true;
}

template <typename Key, typename Value>
void Package::ComputeTable<Key, Value>::clear() {
  for (auto& slot : slots_) {
    slot.used = false;
  }
}

Package::Package(PackageConfig config)
    : config_(config), complex_(config.tolerance),
      vectorAddCache_(config.cacheSlots), matrixAddCache_(config.cacheSlots),
      multiplyCache_(config.cacheSlots), kronCache_(config.cacheSlots) {}

const VectorNode& Package::vectorNode(NodeId id) const {
  if (id >= vectorNodes_.size() || !vectorAlive_[id]) {
    throw StructuralError("dangling vector node handle " + std::to_string(id));
  }
  return vectorNodes_[id];
}

const MatrixNode& Package::matrixNode(NodeId id) const {
  if (id >= matrixNodes_.size() || !matrixAlive_[id]) {
    throw StructuralError("dangling matrix node handle " + std::to_string(id));
  }
  return matrixNodes_[id];
}

int Package::level(const VectorEdge& e) const {
  return e.isTerminal() ? -1 : vectorNodes_[e.node].level;
}

int Package::level(const MatrixEdge& e) const {
  return e.isTerminal() ? -1 : matrixNodes_[e.node].level;
}

template <std::size_t Arity>
void Package::checkChildren(int level,
                            const std::array<Edge<Arity>, Arity>& children,
                            const char* what) const {
  if (level < 0) {
    throw StructuralError(std::string(what) + ": negative level");
  }
  for (const auto& c : children) {
    if (c.weight == kZero) {
      continue;
    }
    const int childLevel = this->level(c);
    if (childLevel != level - 1) {
      throw StructuralError(std::string(what) + ": child at level " +
                            std::to_string(childLevel) +
                            " under a node at level " + std::to_string(level));
    }
  }
}

template <std::size_t Arity>
Edge<Arity> Package::normalizeAndStore(int level,
                                       std::array<Edge<Arity>, Arity> children) {
  const double tol = config_.tolerance;
  std::size_t best = Arity;
  for (std::size_t i = 0; i < Arity; ++i) {
    auto& c = children[i];
    if (nearZero(c.weight, tol)) {
      c = Edge<Arity>::zero();
      continue;
    }
    if (best == Arity ||
        std::abs(c.weight) > std::abs(children[best].weight) + tol) {
      best = i;
    }
  }
  if (best == Arity) {
    return Edge<Arity>::zero();
  }

  const Complex divisor = children[best].weight;
  for (std::size_t i = 0; i < Arity; ++i) {
    auto& c = children[i];
    if (c.weight == kZero) {
      continue;
    }
    if (i == best) {
      c.weight = kOne;
      continue;
    }
    const Complex w = canon(c.weight / divisor);
    c = (w == kZero) ? Edge<Arity>::zero() : Edge<Arity>{c.node, w};
  }

  NodeId id = 0;
  if constexpr (Arity == 2) {
    const VectorKey key{level, children};
    if (const auto it = vectorUnique_.find(key); it != vectorUnique_.end()) {
      id = it->second;
    } else {
      VectorNode node{level, children};
      if (!vectorFree_.empty()) {
        id = vectorFree_.back();
        vectorFree_.pop_back();
        vectorNodes_[id] = node;
        vectorAlive_[id] = true;
      } else {
        id = static_cast<NodeId>(vectorNodes_.size());
        if (id == kTerminal) {
          throw CapacityError("vector node store exhausted");
        }
        vectorNodes_.push_back(node);
        vectorAlive_.push_back(true);
      }
      vectorUnique_.emplace(key, id);
    }
  } else {
    const MatrixKey key{level, children};
    if (const auto it = matrixUnique_.find(key); it != matrixUnique_.end()) {
      id = it->second;
    } else {
      MatrixNode node{level, children, false};
      const auto& c = children;
      node.identity = c[1].isZero() && c[2].isZero() && c[0].weight == kOne &&
                      c[3].weight == kOne && c[0].node == c[3].node &&
                      (c[0].isTerminal()
                           ? level == 0
                           : matrixNodes_[c[0].node].identity);
      if (!matrixFree_.empty()) {
        id = matrixFree_.back();
        matrixFree_.pop_back();
        matrixNodes_[id] = node;
        matrixAlive_[id] = true;
      } else {
        id = static_cast<NodeId>(matrixNodes_.size());
        if (id == kTerminal) {
          throw CapacityError("matrix node store exhausted");
        }
        matrixNodes_.push_back(node);
        matrixAlive_.push_back(true);
      }
      matrixUnique_.emplace(key, id);
    }
  }
  return {id, canon(divisor)};
}

VectorEdge Package::makeVectorNode(int level,
                                   const std::array<VectorEdge, 2>& children) {
  checkChildren<2>(level, children, "makeVectorNode");
  return normalizeAndStore<2>(level, children);
}

MatrixEdge Package::makeMatrixNode(int level,
                                   const std::array<MatrixEdge, 4>& children) {
  checkChildren<4>(level, children, "makeMatrixNode");
  return normalizeAndStore<4>(level, children);
}

VectorEdge Package::scale(const VectorEdge& e, const Complex& w) const {
  const Complex p = mulWeights(e.weight, w);
  if (nearZero(p, config_.tolerance)) {
    return VectorEdge::zero();
  }
  return {e.node, p};
}

MatrixEdge Package::scale(const MatrixEdge& e, const Complex& w) const {
  const Complex p = mulWeights(e.weight, w);
  if (nearZero(p, config_.tolerance)) {
    return MatrixEdge::zero();
  }
  return {e.node, p};
}

template <std::size_t Arity>
Edge<Arity> Package::addImpl(const Edge<Arity>& x, const Edge<Arity>& y) {
  if (x.isZero()) {
    return y;
  }
  if (y.isZero()) {
    return x;
  }
  if (x.node == y.node) {
    const Complex w = x.weight + y.weight;
    if (nearZero(w, config_.tolerance)) {
      return Edge<Arity>::zero();
    }
    return {x.node, w};
  }
  const int lx = level(x);
  const int ly = level(y);
  if (lx != ly) {
    throw StructuralError("add: operand levels differ (" + std::to_string(lx) +
                          " vs " + std::to_string(ly) + ")");
  }

  // add is commutative; order operands to share cache entries
  const auto& a = (x.node < y.node) ? x : y;
  const auto& b = (x.node < y.node) ? y : x;
  const Complex ratio = canon(b.weight / a.weight);
  const AddKey key{a.node, b.node, ratio};
  const auto hash = static_cast<std::size_t>(
      mixComplex(mix(mix(Arity, a.node), b.node), ratio));

  auto& cache = [this]() -> auto& {
    if constexpr (Arity == 2) {
      return vectorAddCache_;
    } else {
      return matrixAddCache_;
    }
  }();
  if (const auto* hit = cache.lookup(key, hash)) {
    return scale(*hit, a.weight);
  }

  std::array<Edge<Arity>, Arity> children{};
  if constexpr (Arity == 2) {
    // copies: recursion may grow the node store
    const auto ca = vectorNodes_[a.node].children;
    const auto cb = vectorNodes_[b.node].children;
    for (std::size_t i = 0; i < Arity; ++i) {
      children[i] = addImpl<Arity>(ca[i], scale(cb[i], ratio));
    }
  } else {
    const auto ca = matrixNodes_[a.node].children;
    const auto cb = matrixNodes_[b.node].children;
    for (std::size_t i = 0; i < Arity; ++i) {
      children[i] = addImpl<Arity>(ca[i], scale(cb[i], ratio));
    }
  }
  const auto result = normalizeAndStore<Arity>(lx, children);
  cache.insert(key, hash, result);
  return scale(result, a.weight);
}

VectorEdge Package::add(const VectorEdge& a, const VectorEdge& b) {
  return addImpl<2>(a, b);
}

MatrixEdge Package::add(const MatrixEdge& a, const MatrixEdge& b) {
  return addImpl<4>(a, b);
}

VectorEdge Package::multiply(const MatrixEdge& m, const VectorEdge& v) {
  if (m.isZero() || v.isZero()) {
    return VectorEdge::zero();
  }
  const int lm = level(m);
  const int lv = level(v);
  if (lm != lv) {
    throw StructuralError("multiply: matrix covers " + std::to_string(lm + 1) +
                          " qubits, vector covers " + std::to_string(lv + 1));
  }
  const auto r = multiplyNodes(m.node, v.node);
  return scale(r, mulWeights(m.weight, v.weight));
}

VectorEdge Package::multiplyNodes(NodeId m, NodeId v) {
  if (m == kTerminal) {
    return VectorEdge::one();
  }
  if (matrixNodes_[m].identity) {
    return {v, kOne};
  }
  const PairKey key{m, v};
  const auto hash = static_cast<std::size_t>(mix(mix(7, m), v));
  if (const auto* hit = multiplyCache_.lookup(key, hash)) {
    return *hit;
  }

  const int lvl = matrixNodes_[m].level;
  const auto mc = matrixNodes_[m].children;
  const auto vc = vectorNodes_[v].children;
  std::array<VectorEdge, 2> rows{};
  for (std::size_t row = 0; row < 2; ++row) {
    const auto left = multiply(mc[2 * row], vc[0]);
    const auto right = multiply(mc[2 * row + 1], vc[1]);
    rows[row] = add(left, right);
  }
  const auto result = normalizeAndStore<2>(lvl, rows);
  multiplyCache_.insert(key, hash, result);
  return result;
}

MatrixEdge Package::kron(const MatrixEdge& hi, const MatrixEdge& lo) {
  if (hi.isZero() || lo.isZero()) {
    return MatrixEdge::zero();
  }
  const int loQubits = level(lo) + 1;
  const auto r = kronNodes(hi.node, lo.node, loQubits);
  return scale(r, mulWeights(hi.weight, lo.weight));
}

MatrixEdge Package::kronNodes(NodeId hi, NodeId lo, int loQubits) {
  if (hi == kTerminal) {
    return {lo, kOne};
  }
  const PairKey key{hi, lo};
  const auto hash = static_cast<std::size_t>(mix(mix(11, hi), lo));
  if (const auto* hit = kronCache_.lookup(key, hash)) {
    return *hit;
  }
  const int lvl = matrixNodes_[hi].level + loQubits;
  const auto hc = matrixNodes_[hi].children;
  std::array<MatrixEdge, 4> children{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (hc[i].isZero()) {
      continue;
    }
    children[i] = scale(kronNodes(hc[i].node, lo, loQubits), hc[i].weight);
  }
  const auto result = normalizeAndStore<4>(lvl, children);
  kronCache_.insert(key, hash, result);
  return result;
}

MatrixEdge Package::identity(int nQubits) {
  if (nQubits < 0) {
    throw ArgumentError("identity: negative qubit count");
  }
  if (identities_.empty()) {
    identities_.push_back(MatrixEdge::one());
  }
  while (static_cast<int>(identities_.size()) <= nQubits) {
    const auto below = identities_.back();
    const int lvl = static_cast<int>(identities_.size()) - 1;
    identities_.push_back(makeMatrixNode(
        lvl, {below, MatrixEdge::zero(), MatrixEdge::zero(), below}));
  }
  return identities_[static_cast<std::size_t>(nQubits)];
}

VectorEdge Package::basisState(int nQubits, std::uint64_t index) {
  if (nQubits < 0 || nQubits > 63) {
    throw ArgumentError("basisState: unsupported qubit count");
  }
  if (nQubits < 64 && (index >> nQubits) != 0) {
    throw ArgumentError("basisState: index out of range");
  }
  auto e = VectorEdge::one();
  for (int q = 0; q < nQubits; ++q) {
    if (((index >> q) & 1U) != 0) {
      e = makeVectorNode(q, {VectorEdge::zero(), e});
    } else {
      e = makeVectorNode(q, {e, VectorEdge::zero()});
    }
  }
  return e;
}

MatrixEdge Package::productOperator(std::span<const Matrix2> factors) {
  auto e = MatrixEdge::one();
  for (std::size_t q = 0; q < factors.size(); ++q) {
    if (e.isZero()) {
      return e;
    }
    std::array<MatrixEdge, 4> children{};
    for (std::size_t i = 0; i < 4; ++i) {
      children[i] = scale(e, factors[q][i]);
    }
    e = makeMatrixNode(static_cast<int>(q), children);
  }
  return e;
}

Complex Package::amplitude(const VectorEdge& v, std::string_view bits) const {
  for (const char ch : bits) {
    if (ch != '0' && ch != '1') {
      throw ArgumentError("amplitude: index must be a bitstring");
    }
  }
  const int n = static_cast<int>(bits.size());
  if (!v.isZero() && level(v) != n - 1) {
    throw ArgumentError("amplitude: index has " + std::to_string(n) +
                        " bits, state covers " + std::to_string(level(v) + 1) +
                        " qubits");
  }
  Complex w = v.weight;
  NodeId node = v.node;
  for (const char ch : bits) {
    if (w == kZero) {
      return kZero;
    }
    const auto& c = vectorNodes_[node].children[ch == '1' ? 1U : 0U];
    w = mulWeights(w, c.weight);
    node = c.node;
  }
  return w;
}

Complex Package::amplitude(const VectorEdge& v, int nQubits,
                           std::uint64_t index) const {
  std::string bits(static_cast<std::size_t>(nQubits), '0');
  for (int q = 0; q < nQubits; ++q) {
    if (((index >> q) & 1U) != 0) {
      bits[static_cast<std::size_t>(nQubits - 1 - q)] = '1';
    }
  }
  return amplitude(v, bits);
}

std::unordered_map<NodeId, double>
Package::nodeNorms(const VectorEdge& v) const {
  std::unordered_map<NodeId, double> memo;
  std::function<double(NodeId)> visit = [&](NodeId id) -> double {
    if (id == kTerminal) {
      return 1.0;
    }
    if (const auto it = memo.find(id); it != memo.end()) {
      return it->second;
    }
    double sum = 0.0;
    for (const auto& c : vectorNodes_[id].children) {
      if (!c.isZero()) {
        sum += std::norm(c.weight) * visit(c.node);
      }
    }
    memo.emplace(id, sum);
    return sum;
  };
  if (!v.isZero()) {
    visit(v.node);
  }
  return memo;
}

double Package::squaredNorm(const VectorEdge& v) const {
  if (v.isZero()) {
    return 0.0;
  }
  if (v.isTerminal()) {
    return std::norm(v.weight);
  }
  const auto norms = nodeNorms(v);
  return std::norm(v.weight) * norms.at(v.node);
}

std::size_t Package::reclaim(std::span<const VectorEdge> vectorRoots,
                             std::span<const MatrixEdge> matrixRoots) {
  std::vector<bool> vecMark(vectorNodes_.size(), false);
  std::vector<bool> matMark(matrixNodes_.size(), false);

  std::vector<NodeId> stack;
  for (const auto& r : vectorRoots) {
    if (!r.isTerminal()) {
      stack.push_back(r.node);
    }
  }
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    if (vecMark[id]) {
      continue;
    }
    vecMark[id] = true;
    for (const auto& c : vectorNodes_[id].children) {
      if (!c.isTerminal()) {
        stack.push_back(c.node);
      }
    }
  }
  for (const auto& r : matrixRoots) {
    if (!r.isTerminal()) {
      stack.push_back(r.node);
    }
  }
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    if (matMark[id]) {
      continue;
    }
    matMark[id] = true;
    for (const auto& c : matrixNodes_[id].children) {
      if (!c.isTerminal()) {
        stack.push_back(c.node);
      }
    }
  }

  std::size_t freed = 0;
  for (NodeId id = 0; id < vectorNodes_.size(); ++id) {
    if (vectorAlive_[id] && !vecMark[id]) {
      const auto& n = vectorNodes_[id];
      vectorUnique_.erase(VectorKey{n.level, n.children});
      vectorAlive_[id] = false;
      vectorFree_.push_back(id);
      ++freed;
    }
  }
  for (NodeId id = 0; id < matrixNodes_.size(); ++id) {
    if (matrixAlive_[id] && !matMark[id]) {
      const auto& n = matrixNodes_[id];
      matrixUnique_.erase(MatrixKey{n.level, n.children});
      matrixAlive_[id] = false;
      matrixFree_.push_back(id);
      ++freed;
    }
  }
  clearComputeCaches();
  return freed;
}

void Package::clearComputeCaches() {
  vectorAddCache_.clear();
  matrixAddCache_.clear();
  multiplyCache_.clear();
  kronCache_.clear();
  identities_.clear();
}

std::size_t Package::size(const VectorEdge& v) const {
  std::vector<NodeId> stack;
  std::vector<bool> seen(vectorNodes_.size(), false);
  std::size_t count = 0;
  if (!v.isTerminal()) {
    stack.push_back(v.node);
  }
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    if (seen[id]) {
      continue;
    }
    seen[id] = true;
    ++count;
    for (const auto& c : vectorNodes_[id].children) {
      if (!c.isTerminal()) {
        stack.push_back(c.node);
      }
    }
  }
  return count;
}

std::size_t Package::size(const MatrixEdge& m) const {
  std::vector<NodeId> stack;
  std::vector<bool> seen(matrixNodes_.size(), false);
  std::size_t count = 0;
  if (!m.isTerminal()) {
    stack.push_back(m.node);
  }
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    if (seen[id]) {
      continue;
    }
    seen[id] = true;
    ++count;
    for (const auto& c : matrixNodes_[id].children) {
      if (!c.isTerminal()) {
        stack.push_back(c.node);
      }
    }
  }
  return count;
}

std::vector<Complex> Package::toDense(const VectorEdge& v, int nQubits) const {
  if (nQubits < 0 || nQubits > 30) {
    throw CapacityError("toDense: unsupported qubit count");
  }
  if (!v.isZero() && level(v) != nQubits - 1) {
    throw StructuralError("toDense: state does not cover " +
                          std::to_string(nQubits) + " qubits");
  }
  std::vector<Complex> out(std::size_t{1} << nQubits, kZero);
  std::function<void(const VectorEdge&, Complex, std::size_t, int)> fill =
      [&](const VectorEdge& e, Complex w, std::size_t offset, int lvl) {
        w = mulWeights(w, e.weight);
        if (w == kZero) {
          return;
        }
        if (lvl < 0) {
          out[offset] = w;
          return;
        }
        const auto& n = vectorNodes_[e.node];
        fill(n.children[0], w, offset, lvl - 1);
        fill(n.children[1], w, offset + (std::size_t{1} << lvl), lvl - 1);
      };
  fill(v, kOne, 0, nQubits - 1);
  return out;
}

std::vector<Complex> Package::toDense(const MatrixEdge& m, int nQubits) const {
  if (nQubits < 0 || nQubits > 14) {
    throw CapacityError("toDense: unsupported matrix qubit count");
  }
  if (!m.isZero() && level(m) != nQubits - 1) {
    throw StructuralError("toDense: operator does not cover " +
                          std::to_string(nQubits) + " qubits");
  }
  const std::size_t dim = std::size_t{1} << nQubits;
  std::vector<Complex> out(dim * dim, kZero);
  std::function<void(const MatrixEdge&, Complex, std::size_t, std::size_t,
                     int)>
      fill = [&](const MatrixEdge& e, Complex w, std::size_t row,
                 std::size_t col, int lvl) {
        w = mulWeights(w, e.weight);
        if (w == kZero) {
          return;
        }
        if (lvl < 0) {
          out[row * dim + col] = w;
          return;
        }
        const auto& n = matrixNodes_[e.node];
        const std::size_t half = std::size_t{1} << lvl;
        for (std::size_t i = 0; i < 4; ++i) {
          fill(n.children[i], w, row + (i >> 1U) * half, col + (i & 1U) * half,
               lvl - 1);
        }
      };
  fill(m, kOne, 0, 0, nQubits - 1);
  return out;
}

VectorEdge Package::fromDense(std::span<const Complex> amplitudes) {
  const int n = log2Exact(amplitudes.size(), "fromDense");
  std::function<VectorEdge(std::size_t, int)> build =
      [&](std::size_t offset, int lvl) -> VectorEdge {
    if (lvl < 0) {
      const auto w = canon(amplitudes[offset]);
      return w == kZero ? VectorEdge::zero() : VectorEdge{kTerminal, w};
    }
    const std::size_t half = std::size_t{1} << lvl;
    const auto lo = build(offset, lvl - 1);
    const auto hi = build(offset + half, lvl - 1);
    return makeVectorNode(lvl, {lo, hi});
  };
  return build(0, n - 1);
}

MatrixEdge Package::matrixFromDense(std::span<const Complex> rowMajor,
                                    int nQubits) {
  const std::size_t dim = std::size_t{1} << nQubits;
  if (rowMajor.size() != dim * dim) {
    throw ArgumentError("matrixFromDense: size does not match qubit count");
  }
  std::function<MatrixEdge(std::size_t, std::size_t, int)> build =
      [&](std::size_t row, std::size_t col, int lvl) -> MatrixEdge {
    if (lvl < 0) {
      const auto w = canon(rowMajor[row * dim + col]);
      return w == kZero ? MatrixEdge::zero() : MatrixEdge{kTerminal, w};
    }
    const std::size_t half = std::size_t{1} << lvl;
    std::array<MatrixEdge, 4> children{};
    for (std::size_t i = 0; i < 4; ++i) {
      children[i] =
          build(row + (i >> 1U) * half, col + (i & 1U) * half, lvl - 1);
    }
    return makeMatrixNode(lvl, children);
  };
  return build(0, 0, nQubits - 1);
}

} // namespace qdist::dd
