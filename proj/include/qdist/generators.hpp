#pragma once

#include "qdist/circuit.hpp"

#include <cstdint>

namespace qdist {

/// Register map of the order-finding circuit built by genShor. For an n-bit
/// modulus the circuit uses 4n+2 qubits:
///   work   [0, n)          x register, initialised to |1>
///   adder  [n, 2n+1)       n+1 qubit Fourier-space accumulator
///   flag   2n+1            overflow ancilla of the modular adder
///   count  [2n+2, 4n+2)    2n counting qubits; after the run the counting
///                          register holds y with bit i on qubit 2n+2+i
struct ShorRegisters {
  int bits = 0;
  int workBegin = 0;
  int adderBegin = 0;
  int flag = 0;
  int countBegin = 0;
  int countBits = 0;
  int nQubits = 0;

  static ShorRegisters forModulus(std::uint64_t modulus);
};

[[nodiscard]] int bitLength(std::uint64_t v) noexcept;
[[nodiscard]] std::uint64_t modPow(std::uint64_t base, std::uint64_t exp,
                                   std::uint64_t modulus);
[[nodiscard]] std::uint64_t modInverse(std::uint64_t a, std::uint64_t modulus);
[[nodiscard]] bool isPrime(std::uint64_t v);
[[nodiscard]] bool isPrimePower(std::uint64_t v);

/// Throws ArgumentError with the reason when `modulus` is not an odd
/// composite non-prime-power or `base` is not a unit modulo it.
void checkShorInputs(std::uint64_t modulus, std::uint64_t base);

/// Smallest a >= 2 with gcd(a, modulus) = 1.
[[nodiscard]] std::uint64_t defaultShorBase(std::uint64_t modulus);

/// Order finding for `base` modulo `modulus` with 2n counting qubits and a
/// Fourier-space controlled modular multiplier (Beauregard style adder with
/// a full counting register).
[[nodiscard]] Circuit genShor(std::uint64_t modulus, std::uint64_t base);

/// Layered RZ-RX-RZ rotations followed by a CX ring, angles uniform in
/// [0, 2pi) from a seeded generator.
[[nodiscard]] Circuit genQcbm(int nQubits, int layers, std::uint64_t seed);

} // namespace qdist
