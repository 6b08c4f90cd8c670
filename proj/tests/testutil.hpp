// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mrse/fastpai.hpp"
#include "mrse/protocols.hpp"

namespace mrse::test {

// Tiny parameter set (N = 649 = 11*59, alpha = 145) small enough for
// exhaustive checks and hand arithmetic.
inline SecurityParams toy_security_params() {
  SecurityParams sp;
  sp.kappa = 8;
  sp.n_bits = 10;
  sp.l_sk_bits = 12;
  sp.sigma = 4;
  sp.data_bits = 4;
  sp.toy = true;
  return sp;
}

inline const KeyPair& toy_keys() {
  static const KeyPair kp = [] {
    SecurityParams sp = toy_security_params();
    ParamSet ps = inject_param_set(11, 59, 5, 29, sp);
    return keygen_with_y(ps, sp, 2);  // h = -2^2 mod 649 = 645
  }();
  return kp;
}

// A second toy modulus (N = 913 = 11*83) for cross-key mismatch tests.
inline const KeyPair& toy_keys_b() {
  static const KeyPair kp = [] {
    SecurityParams sp = toy_security_params();
    ParamSet ps = inject_param_set(11, 83, 5, 41, sp);
    return keygen_with_y(ps, sp, 3);
  }();
  return kp;
}

// A toy set with beta = 91 > 1 (N = 5609 = 71*79, alpha = 15), where
// 2*alpha is a proper divisor of lambda(N); random units then fail the
// decryption L-step, unlike the beta = 1 sets above.
inline const KeyPair& toy_keys_c() {
  static const KeyPair kp = [] {
    SecurityParams sp = toy_security_params();
    sp.n_bits = 13;
    ParamSet ps = inject_param_set(71, 79, 5, 3, sp);
    return keygen_with_y(ps, sp, 2);
  }();
  return kp;
}

// Full-size fixture at the 128-bit level (|N| = 3072); generated once
// per binary from a fixed seed.
inline const KeyPair& full_keys() {
  static const KeyPair kp = [] {
    Rng rng(uint64_t{0x5eed001});
    return keygen(make_security_params(128), rng);
  }();
  return kp;
}

struct AssistedPair {
  AssistedTuple s0;
  AssistedTuple s1;
};

inline const AssistedPair& toy_assisted() {
  static const AssistedPair ap = [] {
    Rng rng(uint64_t{7});
    auto [a0, a1] = do_init(toy_keys(), rng);
    return AssistedPair{a0, a1};
  }();
  return ap;
}

inline const AssistedPair& full_assisted() {
  static const AssistedPair ap = [] {
    Rng rng(uint64_t{8});
    auto [a0, a1] = do_init(full_keys(), rng);
    return AssistedPair{a0, a1};
  }();
  return ap;
}

}  // namespace mrse::test
