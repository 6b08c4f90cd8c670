// SPDX-License-Identifier: Apache-2.0
#include "mrse/protocols.hpp"

namespace mrse {

Mpz init_share_bound(const SecurityParams& sp) {
  return pow2(sp.l_sk_bits + 1);
}

Mpz upload_share_bound(const SecurityParams& sp) {
  return pow2(sp.data_bits) * pow2(sp.l_sk_bits + 1);
}

std::pair<AssistedTuple, AssistedTuple> do_init(const KeyPair& keys,
                                                Rng& rng) {
  const SecurityParams& sp = keys.pk.params;
  SharePair two_alpha = share_signed(keys.sk.two_alpha, init_share_bound(sp),
                                     sp.kappa, rng);
  Ciphertext ct_inv = encrypt(keys.pk, keys.sk.two_alpha_inv, rng);
  Ciphertext ct_zero = encrypt(keys.pk, 0, rng);
  Ciphertext ct_one = encrypt(keys.pk, 1, rng);
  return {AssistedTuple{two_alpha.s0, ct_inv, ct_zero, ct_one},
          AssistedTuple{two_alpha.s1, ct_inv, ct_zero, ct_one}};
}

std::pair<UploadRecord, UploadRecord> do_upload(const KeyPair& keys,
                                                const Mpz& x, Rng& rng) {
  const SecurityParams& sp = keys.pk.params;
  Mpz magnitude_bound = pow2(sp.data_bits);
  if (x > magnitude_bound || x < -magnitude_bound) {
    throw RangeError("upload value exceeds the data bound 2^l");
  }
  Ciphertext ct = encrypt(keys.pk, encode_signed(x, keys.pk.N), rng);
  SharePair shares = share_signed(keys.sk.two_alpha * x,
                                  upload_share_bound(sp), sp.kappa, rng);
  return {UploadRecord{ct, shares.s0}, UploadRecord{ct, shares.s1}};
}

Share smul_local(int role, const Ciphertext& ct_x, const Share& share_2ay) {
  if (share_2ay.role != role) {
    throw ContextError("share does not belong to this role");
  }
  Mpz g = mod_pow(ct_x.value, share_2ay.value, ct_x.n_sq());
  return Share{ddlog(g, ct_x.n), role, ShareContext::mod_n(ct_x.n)};
}

Mpz do_recover_product(const SharePair& z, const PrivateKey& sk) {
  return do_recover_product(z, sk, pow2(2 * sk.params.data_bits));
}

Mpz do_recover_product(const SharePair& z, const PrivateKey& sk,
                       const Mpz& max_magnitude) {
  if (z.s0.ctx.domain != ShareDomain::mod_n) {
    throw ContextError("product recovery expects mod-N shares");
  }
  Mpz m = mod(reconstruct(z) * sk.two_alpha_inv, sk.N);
  try {
    return decode_signed(m, sk.N, max_magnitude);
  } catch (const RangeError&) {
    throw RecoveryError(
        "recovered product magnitude exceeds bound: protocol misuse");
  }
}

Mpz do_recover_product_theta(const SharePair& z, const PrivateKey& sk,
                             const Mpz& theta, const Mpz& max_product) {
  if (theta >= sk.N) throw RangeError("theta must be smaller than N");
  if (z.s0.ctx.domain != ShareDomain::mod_theta ||
      z.s0.ctx.modulus != theta) {
    throw ContextError("theta recovery expects shares reduced mod theta");
  }
  Mpz z_prime = reconstruct(z);
  // Pre-compression the difference was 2*alpha*xy or 2*alpha*xy - N, so
  // adding back N mod theta repairs the wrapped case.
  Mpz candidates[2] = {z_prime, mod(z_prime + mod(sk.N, theta), theta)};
  std::optional<Mpz> recovered;
  for (const Mpz& cand : candidates) {
    if (!mpz_divisible_p(cand.get_mpz_t(), sk.two_alpha.get_mpz_t())) {
      continue;
    }
    Mpz q = cand / sk.two_alpha;
    if (q < 0 || q > max_product) continue;
    if (recovered && *recovered != q) {
      throw RecoveryError("theta recovery ambiguous: both candidates valid");
    }
    recovered = q;
  }
  if (!recovered) {
    throw RecoveryError("theta recovery failed: unrecoverable wrap");
  }
  return *recovered;
}

ScmpRound1Out scmp_s0_round1(const PublicKey& pk, const Ciphertext& ct_x,
                             const Ciphertext& ct_y,
                             const AssistedTuple& assisted_0, Rng& rng,
                             uint64_t session_id, const ScmpOptions& opts) {
  if (ct_x.n != ct_y.n || ct_x.n != pk.N) {
    throw ContextError("ciphertext modulus mismatch");
  }
  const Mpz& N = pk.N;
  Mpz half = N / 2;

  ScmpSession session;
  session.id = session_id;
  session.coin = opts.force_coin ? (*opts.force_coin & 1u)
                                 : (rng.coin() ? 1u : 0u);
  session.r1 = opts.force_r1 ? *opts.force_r1
                             : rng.range(1, pow2(pk.params.sigma) - 1);
  if (session.r1 <= 0) throw RangeError("r1 must be positive");
  // r2 in (N/2 - r1, N/2]: always non-empty since r1 >= 1.
  session.r2 = opts.force_r2 ? *opts.force_r2
                             : rng.range(half - session.r1 + 1, half);
  if (session.r2 > half || session.r1 + session.r2 <= half) {
    throw RangeError("r2 outside (N/2 - r1, N/2]");
  }

  Ciphertext base = session.coin == 0
                        ? add_ct(sub_ct(ct_x, ct_y), assisted_0.ct_one)
                        : sub_ct(ct_y, ct_x);
  Ciphertext d_ct = scalar_mul_ct(base, session.r1);
  Mpz z0 = ddlog(mod_pow(d_ct.value, assisted_0.two_alpha_share.value,
                         d_ct.n_sq()),
                 N);
  Mpz z0_masked = mod(z0 - session.r2, N);
  return ScmpRound1Out{d_ct, z0_masked, session};
}

ScmpRound2Out scmp_s1_round(const Ciphertext& d_ct, const Mpz& z0_masked,
                            const AssistedTuple& assisted_1,
                            const PublicKey* fresh_pk, Rng* fresh_rng) {
  const Mpz& N = d_ct.n;
  Mpz z1 = ddlog(mod_pow(d_ct.value, assisted_1.two_alpha_share.value,
                         d_ct.n_sq()),
                 N);
  Mpz d = mod(z1 - z0_masked, N);
  Ciphertext mu0 = (2 * d > N) ? assisted_1.ct_zero : assisted_1.ct_one;
  if (fresh_pk && fresh_rng) {
    mu0 = add_ct(mu0, encrypt(*fresh_pk, 0, *fresh_rng));
  }
  return ScmpRound2Out{mu0, d};
}

ComparisonResult scmp_s0_finalize(ScmpSession& session,
                                  const Ciphertext& ct_mu0,
                                  const AssistedTuple& assisted,
                                  const PublicKey* fresh_pk,
                                  Rng* fresh_rng) {
  if (session.finalized) {
    throw ProtocolError("comparison session replayed after finalize");
  }
  Ciphertext mu = session.coin == 0 ? ct_mu0
                                    : sub_ct(assisted.ct_one, ct_mu0);
  mu = fresh_pk && fresh_rng ? add_ct(mu, encrypt(*fresh_pk, 0, *fresh_rng))
                             : add_ct(mu, assisted.ct_zero);
  session.finalized = true;
  session.r1 = 0;
  session.r2 = 0;
  return ComparisonResult{mu};
}

Ciphertext s2c_make_ct(const Share& share_2axy, const AssistedTuple& assisted,
                       const PublicKey& pk, Rng& rng) {
  if (share_2axy.ctx.domain != ShareDomain::mod_n) {
    throw ContextError("s2c expects a mod-N multiplication share");
  }
  Mpz g = mod_pow(assisted.ct_two_alpha_inv.value, share_2axy.value,
                  pk.N_sq);
  Mpz t = ddlog(g, pk.N);
  return encrypt(pk, t, rng);
}

Ciphertext s2c_combine(const Ciphertext& ct_from_role0,
                       const Ciphertext& ct_from_role1) {
  return sub_ct(ct_from_role1, ct_from_role0);
}

Share c2s_local(int role, const Ciphertext& ct_mu,
                const AssistedTuple& assisted) {
  if (assisted.two_alpha_share.role != role) {
    throw ContextError("assisted tuple does not belong to this role");
  }
  Mpz g = mod_pow(ct_mu.value, assisted.two_alpha_share.value, ct_mu.n_sq());
  return Share{ddlog(g, ct_mu.n), role, ShareContext::mod_n(ct_mu.n)};
}

Mpz eval_poly_demo(const KeyPair& keys, const AssistedTuple& t0,
                   const AssistedTuple& t1, const Mpz& x, PolyPath path,
                   Rng& rng) {
  const SecurityParams& sp = keys.pk.params;
  auto uploads = do_upload(keys, x, rng);
  // |x + x^2 + ... + x^5| <= 5 * 2^l when |x^5| <= 2^l.
  Mpz sum_bound = pow2(sp.data_bits + 3);

  if (path == PolyPath::s2c) {
    Share acc0 = reduce_share_mod_n(uploads.first.share_2ax, keys.pk.N);
    Share acc1 = reduce_share_mod_n(uploads.second.share_2ax, keys.pk.N);
    Ciphertext cur_ct = uploads.first.ct;  // [x^(k-1)]
    for (int k = 2; k <= 5; ++k) {
      Share z0 = smul_local(0, cur_ct, uploads.first.share_2ax);
      Share z1 = smul_local(1, cur_ct, uploads.second.share_2ax);
      acc0 = share_add(acc0, z0);
      acc1 = share_add(acc1, z1);
      if (k < 5) {
        Ciphertext out0 = s2c_make_ct(z0, t0, keys.pk, rng);
        Ciphertext out1 = s2c_make_ct(z1, t1, keys.pk, rng);
        cur_ct = s2c_combine(out0, out1);  // [x^k]
      }
    }
    Mpz v = do_recover_product(SharePair{acc0, acc1}, keys.sk, sum_bound);
    return v + 1;
  }

  Mpz theta = default_theta(sp.kappa);
  Share acc0 = reduce_share_mod_theta(uploads.first.share_2ax, theta);
  Share acc1 = reduce_share_mod_theta(uploads.second.share_2ax, theta);
  Share cur0 = uploads.first.share_2ax;  // <2a x^(k-1)>, exponent form
  Share cur1 = uploads.second.share_2ax;
  for (int k = 2; k <= 5; ++k) {
    Share z0 = smul_local(0, uploads.first.ct, cur0);
    Share z1 = smul_local(1, uploads.second.ct, cur1);
    Share red0 = reduce_share_mod_theta(z0, theta);
    Share red1 = reduce_share_mod_theta(z1, theta);
    acc0 = share_add(acc0, red0);
    acc1 = share_add(acc1, red1);
    cur0 = red0;
    cur1 = red1;
  }
  Mpz v = do_recover_product_theta(SharePair{acc0, acc1}, keys.sk, theta,
                                   sum_bound);
  return v + 1;
}

}  // namespace mrse
