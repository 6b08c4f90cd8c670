// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <vector>

#include "mrse/numeric.hpp"

namespace mrse {

/// Sizing knobs for one deployment of the cryptosystem. `l_sk_bits` is
/// tied to `kappa` (4*kappa) outside toy mode, and the plaintext,
/// blinding and key lengths must leave headroom below the modulus for
/// the comparison protocol's range argument.
struct SecurityParams {
  unsigned long kappa = 128;      // security parameter
  unsigned long n_bits = 3072;    // modulus length |N|
  unsigned long l_sk_bits = 512;  // private key length, 4*kappa
  unsigned long sigma = 128;      // comparison blinding length
  unsigned long data_bits = 32;   // plaintext magnitude bound l: |x| <= 2^l
  bool toy = false;               // skip size checks (structural ones stay)
};

/// Standard parameters for a given security level. Throws ParamError for
/// unsupported kappa. data_bits/sigma are overridable by the caller.
SecurityParams make_security_params(unsigned long kappa,
                                    unsigned long data_bits = 32,
                                    unsigned long sigma = 128);

/// Validates the sizing invariants. Toy parameter sets only need the
/// fields to be self-consistent enough for the protocols to run.
void validate_security_params(const SecurityParams& sp);

/// The modulus tuple: N = P*Q with p | P-1, q | Q-1,
/// P = Q = 3 (mod 4), gcd(P-1, Q-1) = 2, gcd(pq, (P-1)(Q-1)/(4pq)) = 1,
/// and gcd(pq, N) = 1 so that (2*alpha)^-1 mod N exists.
struct ParamSet {
  Mpz N;
  Mpz P, Q;
  Mpz p, q;
};

/// Structural validation of a ParamSet (divisibility, gcd conditions,
/// primality, coprimality with N). Size checks apply only when
/// sp.toy is false. Throws ParamError on any violation.
void validate_param_set(const ParamSet& ps, const SecurityParams& sp);

/// Builds a ParamSet from injected factors after validating it.
/// This is the toy-mode entry point (e.g. P=11, Q=59, p=5, q=29).
ParamSet inject_param_set(const Mpz& P, const Mpz& Q, const Mpz& p,
                          const Mpz& q, const SecurityParams& sp);

/// Samples a fresh ParamSet: p, q random l_sk/2-bit primes, then
/// P = 2*p*k + 1 (k odd) searched until prime, symmetric for Q, with the
/// gcd conditions rechecked and resampled on failure.
ParamSet ngen(const SecurityParams& sp, Rng& rng);

class FixedBaseTable;

struct PublicKey {
  Mpz N;
  Mpz h;     // h = -y^(2*beta) mod N
  Mpz N_sq;  // cached N^2
  SecurityParams params;
  // Optional acceleration for h^r mod N in encryption.
  std::shared_ptr<const FixedBaseTable> h_table;
};

struct PrivateKey {
  Mpz alpha;          // alpha = p*q
  Mpz two_alpha;      // 2*alpha
  Mpz two_alpha_inv;  // (2*alpha)^-1 mod N
  Mpz N;
  SecurityParams params;
};

struct KeyPair {
  PublicKey pk;
  PrivateKey sk;
  ParamSet pset;
};

/// KeyGen with the generator seed y drawn uniformly from Z*_N.
KeyPair keygen(const ParamSet& ps, const SecurityParams& sp, Rng& rng);

/// Deterministic KeyGen core with an injected y (test and replay use).
KeyPair keygen_with_y(const ParamSet& ps, const SecurityParams& sp,
                      const Mpz& y);

/// Convenience: ngen + keygen.
KeyPair keygen(const SecurityParams& sp, Rng& rng);

/// An element of Z*_{N^2} tagged with the modulus it belongs to.
struct Ciphertext {
  Mpz value;
  Mpz n;  // base modulus N

  Mpz n_sq() const { return n * n; }
};

/// c = (1+N)^m * (h^r mod N)^N mod N^2 with r uniform over l_sk bits.
/// Requires 0 <= m < N. The (1+N)^m factor is computed as 1 + m*N.
Ciphertext encrypt(const PublicKey& pk, const Mpz& m, Rng& rng);

/// Encryption with an injected nonce r (deterministic core).
Ciphertext encrypt_with_nonce(const PublicKey& pk, const Mpz& m,
                              const Mpz& r);

/// m = L(c^(2*alpha) mod N^2) * (2*alpha)^-1 mod N, L(x) = (x-1)/N.
/// Raises MathError when the L-step is non-integral (corrupted or
/// foreign ciphertext).
Mpz decrypt(const PrivateKey& sk, const Ciphertext& c);

/// Homomorphic operations. Ciphertexts must share a modulus.
Ciphertext add_ct(const Ciphertext& a, const Ciphertext& b);
Ciphertext sub_ct(const Ciphertext& a, const Ciphertext& b);
/// c^k mod N^2; negative k goes through the inverse of c.
Ciphertext scalar_mul_ct(const Ciphertext& c, const Mpz& k);

/// Signed integers embed into Z_N as x >= 0 -> x and x < 0 -> N - |x|;
/// [0, N/2] holds naturals and (N/2, N) holds negatives.
Mpz encode_signed(const Mpz& x, const Mpz& N);

/// Inverse of encode_signed for residues within `bound` of either band
/// edge. A residue in neither band signals overflow (RangeError).
/// Defaults to the widest split, bound = floor(N/2), which never fails.
Mpz decode_signed(const Mpz& m, const Mpz& N);
Mpz decode_signed(const Mpz& m, const Mpz& N, const Mpz& bound);

/// Radix-2^b table for powers of a fixed base: one row of multiples per
/// b-bit digit position, so an exponentiation costs one modular
/// multiplication per digit, ceil(max_exp_bits / b) in total.
class FixedBaseTable {
 public:
  FixedBaseTable(const Mpz& base, const Mpz& modulus,
                 unsigned long max_exp_bits, unsigned long window_bits = 5);

  /// base^r mod modulus; RangeError if r exceeds table coverage.
  Mpz pow(const Mpz& r) const;

  unsigned long num_windows() const { return num_windows_; }
  unsigned long window_bits() const { return window_bits_; }
  const Mpz& modulus() const { return modulus_; }

 private:
  Mpz modulus_;
  unsigned long window_bits_;
  unsigned long num_windows_;
  unsigned long max_exp_bits_;
  // table_[i][d] = base^(d * 2^(b*i)) for d in [0, 2^b)
  std::vector<std::vector<Mpz>> table_;
};

/// Free-function form; equals mod_pow(base-of-table, r, N) on all inputs.
Mpz fixed_base_pow(const FixedBaseTable& table, const Mpz& r);

}  // namespace mrse
