// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mrse/numeric.hpp"

namespace mrse {

/// Arithmetic domain a share lives in. The protocols move shares between
/// plain integers, Z_N and Z_theta; mixing contexts silently is the main
/// correctness hazard, so every operation checks for an exact match.
enum class ShareDomain : uint8_t {
  integers = 0,   // exact integer arithmetic, secret in (-bound, bound)
  mod_n = 1,      // residues mod N
  mod_theta = 2,  // residues mod theta (compressed shares)
};

struct ShareContext {
  ShareDomain domain = ShareDomain::integers;
  // Secret bound for integers, the modulus otherwise.
  Mpz modulus;

  static ShareContext integers(const Mpz& bound) {
    return {ShareDomain::integers, bound};
  }
  static ShareContext mod_n(const Mpz& n) { return {ShareDomain::mod_n, n}; }
  static ShareContext mod_theta(const Mpz& theta) {
    return {ShareDomain::mod_theta, theta};
  }

  friend bool operator==(const ShareContext& a, const ShareContext& b) {
    return a.domain == b.domain && a.modulus == b.modulus;
  }
  friend bool operator!=(const ShareContext& a, const ShareContext& b) {
    return !(a == b);
  }
};

/// One subtractive share: the pair convention is s1 - s0 = secret in the
/// context's arithmetic.
struct Share {
  Mpz value;
  int role = 0;  // 0 or 1
  ShareContext ctx;
};

struct SharePair {
  Share s0;
  Share s1;
};

/// Splits x in (-bound, bound) into integer shares: the role-1 share is
/// uniform over [-bound*2^kappa + 1, bound*2^kappa - 1] and
/// s0 = s1 - x, so reconstruction is exact over the integers.
SharePair share_signed(const Mpz& x, const Mpz& bound, unsigned long kappa,
                       Rng& rng);

/// Deterministic core with an injected role-1 share value.
SharePair share_signed_from(const Mpz& x, const Mpz& bound,
                            const Mpz& s1_value);

/// s1 - s0 in the pair's arithmetic: exact over integers, reduced into
/// [0, modulus) otherwise. ContextError on mismatched contexts or roles.
Mpz reconstruct(const SharePair& pair);

/// Per-role local arithmetic; reconstruct distributes over these.
Share share_add(const Share& a, const Share& b);
Share share_sub(const Share& a, const Share& b);
Share share_scalar_mul(const Share& a, const Mpz& k);

/// Converts a divisive share g in Z*_{N^2} to a subtractive share:
/// with h = g mod N and h' = floor(g / N), returns h' * h^-1 mod N.
/// For any g0 and x, ddlog(g0 * (1+N)^x mod N^2) - ddlog(g0) = x (mod N)
/// with no failure probability. MathError when g mod N is not
/// invertible (malformed divisive share).
Mpz ddlog(const Mpz& g, const Mpz& N);

/// theta = 2^(4*kappa + 1 + kappa), the default compression modulus.
Mpz default_theta(unsigned long kappa);

/// Reduces a mod-N share into Z_theta (requires theta < N). Valid for
/// later recovery whenever the shared secret satisfies
/// 0 <= 2*alpha*x*y < theta.
Share reduce_share_mod_theta(const Share& s, const Mpz& theta);

/// Reduces an integer-context share into Z_N; differences are preserved
/// mod N exactly.
Share reduce_share_mod_n(const Share& s, const Mpz& N);

}  // namespace mrse
