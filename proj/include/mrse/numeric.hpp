// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>

#include "mrse/errors.hpp"

namespace mrse {

using Mpz = mpz_class;

/// Number of bits in |x|; bit_length(0) == 0.
std::size_t bit_length(const Mpz& x);

/// Canonical residue of a modulo m, always in [0, m).
Mpz mod(const Mpz& a, const Mpz& m);

/// b^e mod m for signed e. Negative exponents go through the modular
/// inverse of the base; non-invertible bases raise MathError.
Mpz mod_pow(const Mpz& base, const Mpz& exp, const Mpz& m);

/// a^-1 mod m, or MathError when gcd(a, m) != 1.
Mpz mod_inverse(const Mpz& a, const Mpz& m);

/// 2^bits.
Mpz pow2(unsigned long bits);

bool is_probable_prime(const Mpz& n, int reps = 40);

/// Smallest s with s^2 >= 2^(2*bits - 1). Drawing a factor from
/// [s, 2^bits) makes a product of two such factors exactly 2*bits long.
Mpz sqrt2_floor_bound(unsigned long bits);

/// Deterministic-seedable random source for all sampling in the library.
/// Unseeded instances pull entropy from the OS. Not thread-safe; use one
/// instance per logical thread.
class Rng {
 public:
  explicit Rng(std::optional<uint64_t> seed = std::nullopt);
  ~Rng();
  Rng(const Rng&) = delete;
  Rng& operator=(const Rng&) = delete;
  Rng(Rng&& other) noexcept;
  Rng& operator=(Rng&& other) noexcept;

  /// Uniform in [0, 2^k).
  Mpz bits(unsigned long k);
  /// Uniform in [0, n).
  Mpz below(const Mpz& n);
  /// Uniform in [lo, hi], inclusive.
  Mpz range(const Mpz& lo, const Mpz& hi);
  /// Uniform over Z*_n.
  Mpz unit(const Mpz& n);
  /// Random prime with exactly `nbits` bits. When `low` is given the
  /// prime is drawn from [low, 2^nbits) instead of [2^(nbits-1), 2^nbits).
  Mpz prime(unsigned long nbits, const Mpz* low = nullptr);

  uint64_t u64();
  bool coin();

 private:
  gmp_randstate_t state_;
  bool live_ = true;
};

}  // namespace mrse
