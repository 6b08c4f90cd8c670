// SPDX-License-Identifier: Apache-2.0
#include "mrse/sharing.hpp"

namespace mrse {

namespace {

void require_matching(const Share& a, const Share& b) {
  if (a.ctx != b.ctx) throw ContextError("share context mismatch");
  if (a.role != b.role) throw ContextError("share role mismatch");
}

Mpz reduce_value(const Mpz& v, const ShareContext& ctx) {
  if (ctx.domain == ShareDomain::integers) return v;
  return mod(v, ctx.modulus);
}

}  // namespace

SharePair share_signed_from(const Mpz& x, const Mpz& bound,
                            const Mpz& s1_value) {
  if (x <= -bound || x >= bound) {
    throw RangeError("secret out of bound (-m, m)");
  }
  ShareContext ctx = ShareContext::integers(bound);
  Share s1{s1_value, 1, ctx};
  Share s0{s1_value - x, 0, ctx};
  return SharePair{s0, s1};
}

SharePair share_signed(const Mpz& x, const Mpz& bound, unsigned long kappa,
                       Rng& rng) {
  // Uniform over [-m*2^kappa + 1, m*2^kappa - 1] by rejection from the
  // enclosing power-of-two range.
  Mpz limit = bound * pow2(kappa);  // exclusive magnitude bound
  unsigned long width = bit_length(limit) + 1;
  Mpz s1;
  while (true) {
    Mpz raw = rng.bits(width);
    bool negative = mpz_tstbit(raw.get_mpz_t(), 0) == 1;
    Mpz mag;
    mpz_tdiv_q_2exp(mag.get_mpz_t(), raw.get_mpz_t(), 1);
    if (mag >= limit) continue;
    if (negative && mag == 0) continue;  // avoid double-counting zero
    s1 = negative ? Mpz(-mag) : mag;
    break;
  }
  return share_signed_from(x, bound, s1);
}

Mpz reconstruct(const SharePair& pair) {
  if (pair.s0.ctx != pair.s1.ctx) {
    throw ContextError("share context mismatch");
  }
  if (pair.s0.role != 0 || pair.s1.role != 1) {
    throw ContextError("share pair roles must be (0, 1)");
  }
  return reduce_value(pair.s1.value - pair.s0.value, pair.s0.ctx);
}

Share share_add(const Share& a, const Share& b) {
  require_matching(a, b);
  return Share{reduce_value(a.value + b.value, a.ctx), a.role, a.ctx};
}

Share share_sub(const Share& a, const Share& b) {
  require_matching(a, b);
  return Share{reduce_value(a.value - b.value, a.ctx), a.role, a.ctx};
}

Share share_scalar_mul(const Share& a, const Mpz& k) {
  return Share{reduce_value(a.value * k, a.ctx), a.role, a.ctx};
}

Mpz ddlog(const Mpz& g, const Mpz& N) {
  Mpz h = mod(g, N);
  Mpz h_high;
  mpz_fdiv_q(h_high.get_mpz_t(), g.get_mpz_t(), N.get_mpz_t());
  Mpz h_inv;
  if (mpz_invert(h_inv.get_mpz_t(), h.get_mpz_t(), N.get_mpz_t()) == 0) {
    throw MathError("ddlog: g mod N not invertible (invalid divisive share)");
  }
  return mod(h_high * h_inv, N);
}

Mpz default_theta(unsigned long kappa) { return pow2(4 * kappa + 1 + kappa); }

Share reduce_share_mod_theta(const Share& s, const Mpz& theta) {
  if (s.ctx.domain == ShareDomain::mod_n && theta >= s.ctx.modulus) {
    throw RangeError("theta must be smaller than N");
  }
  return Share{mod(s.value, theta), s.role, ShareContext::mod_theta(theta)};
}

Share reduce_share_mod_n(const Share& s, const Mpz& N) {
  return Share{mod(s.value, N), s.role, ShareContext::mod_n(N)};
}

}  // namespace mrse
