// SPDX-License-Identifier: Apache-2.0
#include "mrse/numeric.hpp"

#include <random>

namespace mrse {

std::size_t bit_length(const Mpz& x) {
  if (x == 0) return 0;
  return mpz_sizeinbase(x.get_mpz_t(), 2);
}

Mpz mod(const Mpz& a, const Mpz& m) {
  Mpz r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

Mpz mod_pow(const Mpz& base, const Mpz& exp, const Mpz& m) {
  Mpz r;
  if (exp < 0) {
    Mpz inv = mod_inverse(base, m);
    Mpz e = -exp;
    mpz_powm(r.get_mpz_t(), inv.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  } else {
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
  }
  return r;
}

Mpz mod_inverse(const Mpz& a, const Mpz& m) {
  Mpz r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) {
    throw MathError("element not invertible modulo the given modulus");
  }
  return r;
}

Mpz pow2(unsigned long bits) {
  Mpz r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, bits);
  return r;
}

bool is_probable_prime(const Mpz& n, int reps) {
  return mpz_probab_prime_p(n.get_mpz_t(), reps) != 0;
}

Mpz sqrt2_floor_bound(unsigned long bits) {
  Mpz target = pow2(2 * bits - 1);
  Mpz s;
  mpz_sqrt(s.get_mpz_t(), target.get_mpz_t());
  if (s * s < target) s += 1;
  return s;
}

Rng::Rng(std::optional<uint64_t> seed) {
  gmp_randinit_default(state_);
  uint64_t s;
  if (seed) {
    s = *seed;
  } else {
    std::random_device rd;
    s = (static_cast<uint64_t>(rd()) << 32) ^ rd();
  }
  Mpz ms;
  mpz_import(ms.get_mpz_t(), 1, 1, sizeof(s), 0, 0, &s);
  gmp_randseed(state_, ms.get_mpz_t());
}

Rng::~Rng() {
  if (live_) gmp_randclear(state_);
}

Rng::Rng(Rng&& other) noexcept {
  state_[0] = other.state_[0];
  live_ = other.live_;
  other.live_ = false;
}

Rng& Rng::operator=(Rng&& other) noexcept {
  if (this != &other) {
    if (live_) gmp_randclear(state_);
    state_[0] = other.state_[0];
    live_ = other.live_;
    other.live_ = false;
  }
  return *this;
}

Mpz Rng::bits(unsigned long k) {
  Mpz r;
  mpz_urandomb(r.get_mpz_t(), state_, k);
  return r;
}

Mpz Rng::below(const Mpz& n) {
  Mpz r;
  mpz_urandomm(r.get_mpz_t(), state_, n.get_mpz_t());
  return r;
}

Mpz Rng::range(const Mpz& lo, const Mpz& hi) {
  Mpz width = hi - lo + 1;
  return lo + below(width);
}

Mpz Rng::unit(const Mpz& n) {
  while (true) {
    Mpz c = below(n);
    if (c == 0) continue;
    Mpz g;
    mpz_gcd(g.get_mpz_t(), c.get_mpz_t(), n.get_mpz_t());
    if (g == 1) return c;
  }
}

Mpz Rng::prime(unsigned long nbits, const Mpz* low) {
  Mpz lo = low ? *low : pow2(nbits - 1);
  Mpz hi = pow2(nbits) - 1;
  // Density of primes near 2^nbits is ~ 1/(nbits * ln 2); this bound
  // makes a dry run astronomically unlikely.
  const unsigned long max_tries = 200 * nbits + 1000;
  for (unsigned long i = 0; i < max_tries; ++i) {
    Mpz cand = range(lo, hi);
    mpz_setbit(cand.get_mpz_t(), 0);
    if (cand > hi) continue;
    if (is_probable_prime(cand)) return cand;
  }
  throw ParamError("prime search exceeded attempt bound");
}

uint64_t Rng::u64() {
  Mpz r = bits(64);
  uint64_t out = 0;
  mpz_export(&out, nullptr, 1, sizeof(out), 0, 0, r.get_mpz_t());
  return out;
}

bool Rng::coin() { return bits(1) == 1; }

}  // namespace mrse
