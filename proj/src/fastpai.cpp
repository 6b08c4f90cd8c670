// SPDX-License-Identifier: Apache-2.0
#include "mrse/fastpai.hpp"

namespace mrse {

SecurityParams make_security_params(unsigned long kappa,
                                    unsigned long data_bits,
                                    unsigned long sigma) {
  SecurityParams sp;
  sp.kappa = kappa;
  switch (kappa) {
    case 80:
      sp.n_bits = 1024;
      break;
    case 112:
      sp.n_bits = 2048;
      break;
    case 128:
      sp.n_bits = 3072;
      break;
    case 192:
      sp.n_bits = 7680;
      break;
    case 256:
      sp.n_bits = 15360;
      break;
    default:
      throw ParamError("unsupported security level kappa=" +
                       std::to_string(kappa));
  }
  sp.l_sk_bits = 4 * kappa;
  sp.sigma = sigma;
  sp.data_bits = data_bits;
  validate_security_params(sp);
  return sp;
}

void validate_security_params(const SecurityParams& sp) {
  if (sp.toy) return;
  if (sp.l_sk_bits != 4 * sp.kappa) {
    throw ParamError("private key length must be 4*kappa");
  }
  if (sp.l_sk_bits % 2 != 0 || sp.n_bits % 2 != 0) {
    throw ParamError("key and modulus lengths must be even");
  }
  // Headroom needed so that 2*alpha*r1*(x-y+1) + r2 stays inside (0, N)
  // during comparisons.
  if (sp.data_bits + sp.sigma + sp.l_sk_bits + 2 >= sp.n_bits - 2) {
    throw ParamError(
        "data_bits + sigma + l_sk_bits + 2 must stay below n_bits - 2");
  }
}

void validate_param_set(const ParamSet& ps, const SecurityParams& sp) {
  if (!is_probable_prime(ps.P) || !is_probable_prime(ps.Q)) {
    throw ParamError("P and Q must be prime");
  }
  if (!is_probable_prime(ps.p) || !is_probable_prime(ps.q)) {
    throw ParamError("p and q must be prime");
  }
  if (ps.p == 2 || ps.q == 2) throw ParamError("p and q must be odd");
  if (ps.p == ps.q) throw ParamError("p and q must be distinct");
  if (ps.N != ps.P * ps.Q) throw ParamError("N != P*Q");
  if (!mpz_divisible_p(Mpz(ps.P - 1).get_mpz_t(), ps.p.get_mpz_t())) {
    throw ParamError("p does not divide P-1");
  }
  if (!mpz_divisible_p(Mpz(ps.Q - 1).get_mpz_t(), ps.q.get_mpz_t())) {
    throw ParamError("q does not divide Q-1");
  }
  if (mod(ps.P, 4) != 3 || mod(ps.Q, 4) != 3) {
    throw ParamError("P and Q must be congruent to 3 mod 4");
  }
  if (gcd(ps.P - 1, ps.Q - 1) != 2) {
    throw ParamError("gcd(P-1, Q-1) must equal 2");
  }
  Mpz four_pq = 4 * ps.p * ps.q;
  Mpz phi = (ps.P - 1) * (ps.Q - 1);
  if (!mpz_divisible_p(phi.get_mpz_t(), four_pq.get_mpz_t())) {
    throw ParamError("4pq does not divide (P-1)(Q-1)");
  }
  Mpz beta = phi / four_pq;
  if (gcd(ps.p * ps.q, beta) != 1) {
    throw ParamError("gcd(pq, (P-1)(Q-1)/(4pq)) must equal 1");
  }
  // Not stated as a constraint in the usual presentation, but required
  // for (2*alpha)^-1 mod N to exist: pq must be coprime to N.
  if (mpz_divisible_p(ps.N.get_mpz_t(), ps.p.get_mpz_t()) ||
      mpz_divisible_p(ps.N.get_mpz_t(), ps.q.get_mpz_t())) {
    throw ParamError("p and q must not divide N");
  }
  if (!sp.toy) {
    if (bit_length(ps.N) != sp.n_bits) {
      throw ParamError("N does not have exactly n_bits bits");
    }
    if (bit_length(ps.P) != sp.n_bits / 2 ||
        bit_length(ps.Q) != sp.n_bits / 2) {
      throw ParamError("P and Q must each have n_bits/2 bits");
    }
    if (bit_length(ps.p) != sp.l_sk_bits / 2 ||
        bit_length(ps.q) != sp.l_sk_bits / 2) {
      throw ParamError("p and q must each have l_sk_bits/2 bits");
    }
  }
}

ParamSet inject_param_set(const Mpz& P, const Mpz& Q, const Mpz& p,
                          const Mpz& q, const SecurityParams& sp) {
  ParamSet ps;
  ps.P = P;
  ps.Q = Q;
  ps.p = p;
  ps.q = q;
  ps.N = P * Q;
  validate_param_set(ps, sp);
  return ps;
}

namespace {

// Prime P = 2*p*k + 1 with k odd (forces P = 3 mod 4) and P in
// [low, 2^nbits). Throws ParamError when the range is empty or the
// attempt bound runs out.
Mpz prime_in_progression(const Mpz& p, unsigned long nbits, const Mpz& low,
                         Rng& rng) {
  Mpz hi_p = pow2(nbits) - 1;
  Mpz two_p = 2 * p;
  Mpz k_lo = (low - 1 + two_p - 1) / two_p;  // ceil((low-1) / 2p)
  Mpz k_hi = (hi_p - 1) / two_p;
  if (k_lo > k_hi) throw ParamError("no room for P = 2pk+1 at this size");
  const unsigned long max_tries = 400 * nbits + 1000;
  for (unsigned long i = 0; i < max_tries; ++i) {
    Mpz k = rng.range(k_lo, k_hi);
    mpz_setbit(k.get_mpz_t(), 0);
    if (k > k_hi) continue;
    Mpz P = two_p * k + 1;
    if (P < low) continue;
    if (is_probable_prime(P)) return P;
  }
  throw ParamError("prime-in-progression search exceeded attempt bound");
}

}  // namespace

ParamSet ngen(const SecurityParams& sp, Rng& rng) {
  validate_security_params(sp);
  if (sp.toy) {
    throw ParamError("toy parameter sets are built via inject_param_set");
  }
  unsigned long half_n = sp.n_bits / 2;
  unsigned long half_l = sp.l_sk_bits / 2;
  // Drawing each factor above sqrt(2)*2^(bits-1) pins the bit lengths of
  // N and alpha exactly.
  Mpz small_low = sqrt2_floor_bound(half_l);
  Mpz big_low = sqrt2_floor_bound(half_n);

  const int max_outer = 64;
  for (int attempt = 0; attempt < max_outer; ++attempt) {
    Mpz p = rng.prime(half_l, &small_low);
    Mpz q = rng.prime(half_l, &small_low);
    if (p == q) continue;
    Mpz P = prime_in_progression(p, half_n, big_low, rng);
    Mpz Q = prime_in_progression(q, half_n, big_low, rng);
    ParamSet ps;
    ps.P = P;
    ps.Q = Q;
    ps.p = p;
    ps.q = q;
    ps.N = P * Q;
    try {
      validate_param_set(ps, sp);
    } catch (const ParamError&) {
      continue;  // gcd condition failed; resample
    }
    return ps;
  }
  throw ParamError("ngen exceeded attempt bound");
}

KeyPair keygen_with_y(const ParamSet& ps, const SecurityParams& sp,
                      const Mpz& y) {
  Mpz alpha = ps.p * ps.q;
  Mpz beta = (ps.P - 1) * (ps.Q - 1) / (4 * alpha);
  Mpz h = mod(-mod_pow(y, 2 * beta, ps.N), ps.N);

  KeyPair kp;
  kp.pset = ps;
  kp.pk.N = ps.N;
  kp.pk.h = h;
  kp.pk.N_sq = ps.N * ps.N;
  kp.pk.params = sp;
  kp.sk.alpha = alpha;
  kp.sk.two_alpha = 2 * alpha;
  kp.sk.two_alpha_inv = mod_inverse(kp.sk.two_alpha, ps.N);
  kp.sk.N = ps.N;
  kp.sk.params = sp;
  return kp;
}

KeyPair keygen(const ParamSet& ps, const SecurityParams& sp, Rng& rng) {
  return keygen_with_y(ps, sp, rng.unit(ps.N));
}

KeyPair keygen(const SecurityParams& sp, Rng& rng) {
  return keygen(ngen(sp, rng), sp, rng);
}

Ciphertext encrypt_with_nonce(const PublicKey& pk, const Mpz& m,
                              const Mpz& r) {
  if (m < 0 || m >= pk.N) {
    throw RangeError("plaintext out of range [0, N)");
  }
  Mpz hr = pk.h_table ? pk.h_table->pow(r) : mod_pow(pk.h, r, pk.N);
  Mpz c = mod((1 + m * pk.N) * mod_pow(hr, pk.N, pk.N_sq), pk.N_sq);
  return Ciphertext{c, pk.N};
}

Ciphertext encrypt(const PublicKey& pk, const Mpz& m, Rng& rng) {
  return encrypt_with_nonce(pk, m, rng.bits(pk.params.l_sk_bits));
}

Mpz decrypt(const PrivateKey& sk, const Ciphertext& c) {
  if (c.n != sk.N) throw ContextError("ciphertext modulus mismatch");
  Mpz n_sq = sk.N * sk.N;
  if (c.value <= 0 || c.value >= n_sq) {
    throw RangeError("ciphertext out of range (0, N^2)");
  }
  Mpz u = mod_pow(c.value, sk.two_alpha, n_sq);
  Mpz um1 = u - 1;
  if (!mpz_divisible_p(um1.get_mpz_t(), sk.N.get_mpz_t())) {
    throw MathError("L-step non-integral: corrupted or foreign ciphertext");
  }
  Mpz l = mod(um1 / sk.N, sk.N);
  return mod(l * sk.two_alpha_inv, sk.N);
}

namespace {

void require_same_modulus(const Ciphertext& a, const Ciphertext& b) {
  if (a.n != b.n) throw ContextError("ciphertext modulus mismatch");
}

}  // namespace

Ciphertext add_ct(const Ciphertext& a, const Ciphertext& b) {
  require_same_modulus(a, b);
  return Ciphertext{mod(a.value * b.value, a.n_sq()), a.n};
}

Ciphertext sub_ct(const Ciphertext& a, const Ciphertext& b) {
  require_same_modulus(a, b);
  Mpz n_sq = a.n_sq();
  return Ciphertext{mod(a.value * mod_inverse(b.value, n_sq), n_sq), a.n};
}

Ciphertext scalar_mul_ct(const Ciphertext& c, const Mpz& k) {
  return Ciphertext{mod_pow(c.value, k, c.n_sq()), c.n};
}

Mpz encode_signed(const Mpz& x, const Mpz& N) {
  if (x >= 0) {
    if (x >= N) throw RangeError("plaintext magnitude too large for N");
    return x;
  }
  Mpz e = N + x;
  if (e <= 0) throw RangeError("plaintext magnitude too large for N");
  return e;
}

Mpz decode_signed(const Mpz& m, const Mpz& N) {
  return decode_signed(m, N, N / 2);
}

Mpz decode_signed(const Mpz& m, const Mpz& N, const Mpz& bound) {
  if (m < 0 || m >= N) throw RangeError("residue out of range [0, N)");
  if (m <= bound) return m;
  if (m >= N - bound) return m - N;
  throw RangeError("residue outside signed bands: magnitude overflow");
}

FixedBaseTable::FixedBaseTable(const Mpz& base, const Mpz& modulus,
                               unsigned long max_exp_bits,
                               unsigned long window_bits)
    : modulus_(modulus),
      window_bits_(window_bits),
      num_windows_((max_exp_bits + window_bits - 1) / window_bits),
      max_exp_bits_(max_exp_bits) {
  if (window_bits == 0 || window_bits > 16) {
    throw RangeError("window size out of range");
  }
  unsigned long radix = 1ul << window_bits;
  table_.resize(num_windows_);
  Mpz window_base = mod(base, modulus);
  for (unsigned long i = 0; i < num_windows_; ++i) {
    auto& row = table_[i];
    row.reserve(radix);
    row.emplace_back(1);
    for (unsigned long d = 1; d < radix; ++d) {
      row.push_back(mod(row.back() * window_base, modulus));
    }
    // base for the next digit position: base^(2^(b*(i+1)))
    window_base = mod(row.back() * window_base, modulus);
  }
}

Mpz FixedBaseTable::pow(const Mpz& r) const {
  if (r < 0 || bit_length(r) > max_exp_bits_) {
    throw RangeError("exponent exceeds table coverage");
  }
  Mpz acc = 1;
  Mpz rest = r;
  unsigned long mask = (1ul << window_bits_) - 1;
  for (unsigned long i = 0; i < num_windows_ && rest != 0; ++i) {
    unsigned long digit = mpz_get_ui(rest.get_mpz_t()) & mask;
    if (digit != 0) acc = mod(acc * table_[i][digit], modulus_);
    mpz_tdiv_q_2exp(rest.get_mpz_t(), rest.get_mpz_t(), window_bits_);
  }
  return acc;
}

Mpz fixed_base_pow(const FixedBaseTable& table, const Mpz& r) {
  return table.pow(r);
}

}  // namespace mrse
