#include "qdist/generators.hpp"

#include "qdist/errors.hpp"

#include <bit>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

namespace qdist {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Builds the Fourier-space arithmetic used by the order-finding circuit.
class ShorBuilder {
public:
  ShorBuilder(std::uint64_t modulus, const ShorRegisters& regs)
      : modulus_(modulus), regs_(regs), circuit_(regs.nQubits) {}

  Circuit build(std::uint64_t base) {
    const int t = regs_.countBits;
    for (int i = 0; i < t; ++i) {
      circuit_.append(makeGate(GateKind::H, {regs_.countBegin + i}));
    }
    circuit_.append(makeGate(GateKind::X, {regs_.workBegin}));

    // counting qubit i controls U^(2^(t-1-i)) so that the swap-free inverse
    // QFT leaves y on the counting register in natural bit order
    std::vector<std::uint64_t> powers(static_cast<std::size_t>(t));
    std::uint64_t p = base % modulus_;
    for (int k = 0; k < t; ++k) {
      powers[static_cast<std::size_t>(k)] = p;
      p = mulMod(p, p);
    }
    for (int i = 0; i < t; ++i) {
      controlledMultiply(circuit_, powers[static_cast<std::size_t>(t - 1 - i)],
                         regs_.countBegin + i);
    }
    qft(circuit_, regs_.countBegin, t, true);
    return std::move(circuit_);
  }

private:
  [[nodiscard]] std::uint64_t mulMod(std::uint64_t a, std::uint64_t b) const {
    return (a * b) % modulus_;
  }

  [[nodiscard]] int adderBits() const { return regs_.bits + 1; }
  [[nodiscard]] int adderMsb() const {
    return regs_.adderBegin + regs_.bits;
  }

  // Swap-free QFT on qubits [begin, begin+width): afterwards qubit j carries
  // the phase exp(2 pi i b / 2^(j+1)) on |1>.
  static void qft(Circuit& c, int begin, int width, bool inverse) {
    Circuit fwd(c.nQubits());
    for (int j = width - 1; j >= 0; --j) {
      fwd.append(makeGate(GateKind::H, {begin + j}));
      for (int k = j - 1; k >= 0; --k) {
        const double angle =
            kTwoPi / static_cast<double>(std::uint64_t{1} << (j - k + 1));
        fwd.append(
            makeGate(GateKind::Phase, {begin + j}, {begin + k}, {angle}));
      }
    }
    if (inverse) {
      c.appendInverse(fwd);
    } else {
      c.append(fwd);
    }
  }

  // Adds `value` (mod 2^(n+1)) to the Fourier-space accumulator.
  void phiAdd(Circuit& c, std::int64_t value,
              const std::vector<Qubit>& controls) const {
    const int m = adderBits();
    const auto span = std::int64_t{1} << m;
    const std::int64_t v = ((value % span) + span) % span;
    for (int j = 0; j < m; ++j) {
      const auto period = std::int64_t{1} << (j + 1);
      const auto r = v % period;
      if (r == 0) {
        continue;
      }
      const double angle =
          kTwoPi * static_cast<double>(r) / static_cast<double>(period);
      c.append(
          makeGate(GateKind::Phase, {regs_.adderBegin + j}, controls, {angle}));
    }
  }

  // Doubly controlled (b + a) mod N on the Fourier-space accumulator, b < N.
  void modAdd(Circuit& c, std::uint64_t a, Qubit c1, Qubit c2) const {
    const auto sa = static_cast<std::int64_t>(a);
    const auto sn = static_cast<std::int64_t>(modulus_);
    const int b0 = regs_.adderBegin;
    const int m = adderBits();
    phiAdd(c, sa, {c1, c2});
    phiAdd(c, -sn, {});
    qft(c, b0, m, true);
    c.append(makeGate(GateKind::X, {regs_.flag}, {adderMsb()}));
    qft(c, b0, m, false);
    phiAdd(c, sn, {regs_.flag});
    phiAdd(c, -sa, {c1, c2});
    qft(c, b0, m, true);
    c.append(makeGate(GateKind::X, {adderMsb()}));
    c.append(makeGate(GateKind::X, {regs_.flag}, {adderMsb()}));
    c.append(makeGate(GateKind::X, {adderMsb()}));
    qft(c, b0, m, false);
    phiAdd(c, sa, {c1, c2});
  }

  // |x>|b> -> |x>|(b + a x) mod N> when `control` is set.
  [[nodiscard]] Circuit multiplyAdd(std::uint64_t a, Qubit control) const {
    Circuit c(regs_.nQubits);
    qft(c, regs_.adderBegin, adderBits(), false);
    std::uint64_t term = a % modulus_;
    for (int i = 0; i < regs_.bits; ++i) {
      modAdd(c, term, control, regs_.workBegin + i);
      term = mulMod(term, 2);
    }
    qft(c, regs_.adderBegin, adderBits(), true);
    return c;
  }

  // |x> -> |a x mod N> when `control` is set; the accumulator returns to 0.
  void controlledMultiply(Circuit& c, std::uint64_t a, Qubit control) const {
    c.append(multiplyAdd(a, control));
    for (int i = 0; i < regs_.bits; ++i) {
      c.append(makeGate(GateKind::Swap,
                        {regs_.workBegin + i, regs_.adderBegin + i},
                        {control}));
    }
    c.appendInverse(multiplyAdd(modInverse(a, modulus_), control));
  }

  std::uint64_t modulus_;
  ShorRegisters regs_;
  Circuit circuit_;
};

} // namespace

int bitLength(std::uint64_t v) noexcept {
  return static_cast<int>(std::bit_width(v));
}

std::uint64_t modPow(std::uint64_t base, std::uint64_t exp,
                     std::uint64_t modulus) {
  if (modulus == 0 || modulus > (std::uint64_t{1} << 32)) {
    throw ArgumentError("modPow: modulus must lie in [1, 2^32]");
  }
  std::uint64_t result = 1 % modulus;
  std::uint64_t b = base % modulus;
  while (exp > 0) {
    if ((exp & 1U) != 0) {
      result = (result * b) % modulus;
    }
    b = (b * b) % modulus;
    exp >>= 1U;
  }
  return result;
}

std::uint64_t modInverse(std::uint64_t a, std::uint64_t modulus) {
  std::int64_t t = 0;
  std::int64_t newT = 1;
  auto r = static_cast<std::int64_t>(modulus);
  auto newR = static_cast<std::int64_t>(a % modulus);
  while (newR != 0) {
    const auto q = r / newR;
    t = std::exchange(newT, t - q * newT);
    r = std::exchange(newR, r - q * newR);
  }
  if (r != 1) {
    throw ArgumentError(std::to_string(a) + " has no inverse modulo " +
                        std::to_string(modulus));
  }
  if (t < 0) {
    t += static_cast<std::int64_t>(modulus);
  }
  return static_cast<std::uint64_t>(t);
}

bool isPrime(std::uint64_t v) {
  if (v < 2) {
    return false;
  }
  for (std::uint64_t d = 2; d * d <= v; ++d) {
    if (v % d == 0) {
      return false;
    }
  }
  return true;
}

bool isPrimePower(std::uint64_t v) {
  if (v < 2) {
    return false;
  }
  std::uint64_t p = 2;
  while (p * p <= v && v % p != 0) {
    ++p;
  }
  if (v % p != 0) {
    return true; // v itself is prime
  }
  while (v % p == 0) {
    v /= p;
  }
  return v == 1;
}

ShorRegisters ShorRegisters::forModulus(std::uint64_t modulus) {
  ShorRegisters r;
  r.bits = bitLength(modulus);
  r.workBegin = 0;
  r.adderBegin = r.bits;
  r.flag = 2 * r.bits + 1;
  r.countBegin = 2 * r.bits + 2;
  r.countBits = 2 * r.bits;
  r.nQubits = 4 * r.bits + 2;
  return r;
}

void checkShorInputs(std::uint64_t modulus, std::uint64_t base) {
  const auto n = std::to_string(modulus);
  if (modulus < 15) {
    throw ArgumentError("modulus " + n + " is too small to factor");
  }
  if (modulus >= (std::uint64_t{1} << 15)) {
    throw ArgumentError("modulus " + n + " exceeds the supported width");
  }
  if (modulus % 2 == 0) {
    throw ArgumentError("modulus " + n + " is even");
  }
  if (isPrime(modulus)) {
    throw ArgumentError("modulus " + n + " is prime");
  }
  if (isPrimePower(modulus)) {
    throw ArgumentError("modulus " + n + " is a prime power");
  }
  if (base < 2 || base >= modulus) {
    throw ArgumentError("base must lie in [2, modulus)");
  }
  if (std::gcd(base, modulus) != 1) {
    throw ArgumentError("base " + std::to_string(base) +
                        " shares a factor with " + n);
  }
}

std::uint64_t defaultShorBase(std::uint64_t modulus) {
  for (std::uint64_t a = 2; a < modulus; ++a) {
    if (std::gcd(a, modulus) == 1) {
      return a;
    }
  }
  throw ArgumentError("no coprime base below " + std::to_string(modulus));
}

Circuit genShor(std::uint64_t modulus, std::uint64_t base) {
  checkShorInputs(modulus, base);
  const auto regs = ShorRegisters::forModulus(modulus);
  return ShorBuilder(modulus, regs).build(base);
}

Circuit genQcbm(int nQubits, int layers, std::uint64_t seed) {
  if (nQubits < 2) {
    throw ArgumentError("qcbm needs at least 2 qubits");
  }
  if (layers < 1) {
    throw ArgumentError("qcbm needs at least 1 layer");
  }
  std::mt19937_64 rng(seed);
  // 53 random bits; std::uniform_real_distribution is not portable
  const auto angle = [&rng]() {
    return static_cast<double>(rng() >> 11U) * 0x1.0p-53 * kTwoPi;
  };
  Circuit c(nQubits);
  for (int layer = 0; layer < layers; ++layer) {
    for (const auto kind : {GateKind::RZ, GateKind::RX, GateKind::RZ}) {
      for (int q = 0; q < nQubits; ++q) {
        c.append(makeGate(kind, {q}, {}, {angle()}));
      }
    }
    for (int q = 0; q < nQubits; ++q) {
      c.append(makeGate(GateKind::X, {(q + 1) % nQubits}, {q}));
    }
  }
  return c;
}

} // namespace qdist
