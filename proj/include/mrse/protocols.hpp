// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "mrse/fastpai.hpp"
#include "mrse/sharing.hpp"

namespace mrse {

/// Per-server bootstrap material distributed by the data owner:
/// an integer share of 2*alpha plus encryptions of (2*alpha)^-1, 0 and 1.
struct AssistedTuple {
  Share two_alpha_share;
  Ciphertext ct_two_alpha_inv;
  Ciphertext ct_zero;
  Ciphertext ct_one;
};

/// What one server stores for an uploaded value x: the common ciphertext
/// and this server's integer share of 2*alpha*x.
struct UploadRecord {
  Ciphertext ct;
  Share share_2ax;
};

/// Bound used when sharing 2*alpha (|2*alpha| < 2^(l_sk+1)).
Mpz init_share_bound(const SecurityParams& sp);
/// Bound used when sharing 2*alpha*x (|x| <= 2^l).
Mpz upload_share_bound(const SecurityParams& sp);

/// Data-owner initialization: splits 2*alpha and encrypts the assisted
/// constants, producing the tuples for server 0 and server 1. The three
/// ciphertexts are shared verbatim between both tuples.
std::pair<AssistedTuple, AssistedTuple> do_init(const KeyPair& keys,
                                                Rng& rng);

/// Data-owner upload of x in [-2^l, 2^l]: both servers get the same
/// encryption of x (signed-encoded) and complementary integer shares of
/// 2*alpha*x.
std::pair<UploadRecord, UploadRecord> do_upload(const KeyPair& keys,
                                                const Mpz& x, Rng& rng);

/// Non-interactive secure multiplication, one server's half: raises the
/// common ciphertext of x to this server's share of 2*alpha*y and
/// converts the divisive share with ddlog. The two outputs satisfy
/// z1 - z0 = 2*alpha*x*y (mod N). Emits no messages.
Share smul_local(int role, const Ciphertext& ct_x, const Share& share_2ay);

/// DO recovery of x*y from mod-N multiplication shares:
/// (z1 - z0) * (2*alpha)^-1 mod N, signed-decoded against max_magnitude
/// (default 2^(2l)). RecoveryError when the decoded magnitude exceeds it.
Mpz do_recover_product(const SharePair& z, const PrivateKey& sk);
Mpz do_recover_product(const SharePair& z, const PrivateKey& sk,
                       const Mpz& max_magnitude);

/// DO recovery from theta-compressed shares. Valid for products in
/// [0, max_product] with 2*alpha*max_product < theta < N. The difference
/// of the uncompressed shares is either 2*alpha*xy or 2*alpha*xy - N, so
/// both z' and z' + (N mod theta) are tested for exact divisibility by
/// 2*alpha with a quotient in range; exactly one candidate may qualify.
Mpz do_recover_product_theta(const SharePair& z, const PrivateKey& sk,
                             const Mpz& theta, const Mpz& max_product);

/// Comparison session state, held only by server 0 between rounds.
/// Coins are erased and the session becomes unusable after finalize.
struct ScmpSession {
  uint64_t id = 0;
  unsigned coin = 0;  // pi
  Mpz r1;             // blinding factor, {0,1}^sigma \ {0}
  Mpz r2;             // offset with r2 <= N/2 < r1 + r2
  bool finalized = false;
};

struct ScmpRound1Out {
  Ciphertext d_ct;  // D
  Mpz z0_masked;    // (ddlog(D^<2a>0) - r2) mod N
  ScmpSession session;
};

struct ScmpRound2Out {
  Ciphertext ct_mu0;
  Mpz d;  // S1's blinded comparison value (never sent; tests assert 0<d<N)
};

/// Decrypts to 0 iff x >= y, 1 iff x < y.
struct ComparisonResult {
  Ciphertext ct_mu;
};

/// Test hooks for forcing the comparison coins.
struct ScmpOptions {
  std::optional<unsigned> force_coin;
  std::optional<Mpz> force_r1;
  std::optional<Mpz> force_r2;
};

/// Server 0, round 1: picks r1 in {0,1}^sigma \ {0}, r2 in
/// (N/2 - r1, N/2], and the coin pi; forms
///   D = ([x]*[y]^-1*[1])^r1  (pi = 0)   or   D = ([y]*[x]^-1)^r1  (pi = 1),
/// masks its ddlog share with r2 and emits (D, z0). 3|N| bits of payload;
/// pi, r1, r2 never leave this server.
ScmpRound1Out scmp_s0_round1(const PublicKey& pk, const Ciphertext& ct_x,
                             const Ciphertext& ct_y,
                             const AssistedTuple& assisted_0, Rng& rng,
                             uint64_t session_id = 0,
                             const ScmpOptions& opts = {});

/// Server 1's round: computes d = ddlog(D^<2a>1) - z0 mod N and answers
/// with the stored [0] when d > N/2, the stored [1] otherwise. When a
/// public key and rng are supplied the answer is additionally masked
/// with a fresh encryption of zero instead of being a verbatim copy.
ScmpRound2Out scmp_s1_round(const Ciphertext& d_ct, const Mpz& z0_masked,
                            const AssistedTuple& assisted_1,
                            const PublicKey* fresh_pk = nullptr,
                            Rng* fresh_rng = nullptr);

/// Server 0, final step: undoes the coin flip (pi = 1 answers are
/// complemented through [1]*[mu0]^-1) and masks with the stored [0]
/// (or a fresh zero when fresh_pk/fresh_rng are supplied). A session can
/// be finalized once; replay raises ProtocolError.
ComparisonResult scmp_s0_finalize(ScmpSession& session,
                                  const Ciphertext& ct_mu0,
                                  const AssistedTuple& assisted,
                                  const PublicKey* fresh_pk = nullptr,
                                  Rng* fresh_rng = nullptr);

/// Share-to-ciphertext conversion, local part: this server's outbound
/// ciphertext, an encryption of ddlog([( 2a)^-1]^z).
Ciphertext s2c_make_ct(const Share& share_2axy, const AssistedTuple& assisted,
                       const PublicKey& pk, Rng& rng);

/// Both servers combine the two exchanged ciphertexts identically:
/// [xy] = [t1] * [t0]^-1.
Ciphertext s2c_combine(const Ciphertext& ct_from_role0,
                       const Ciphertext& ct_from_role1);

/// Ciphertext-to-share conversion, local part (server 0 first sends
/// [mu] to server 1): share_i = ddlog([mu]^<2a>_i), a mod-N share of
/// 2*alpha*mu.
Share c2s_local(int role, const Ciphertext& ct_mu,
                const AssistedTuple& assisted);

/// In-memory driver evaluating x^5+x^4+x^3+x^2+x+1 through four chained
/// secure multiplications, either re-encrypting between steps (S2C path)
/// or compressing shares mod theta (no server traffic at all).
enum class PolyPath { s2c, theta };

Mpz eval_poly_demo(const KeyPair& keys, const AssistedTuple& t0,
                   const AssistedTuple& t1, const Mpz& x, PolyPath path,
                   Rng& rng);

}  // namespace mrse
