// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "mrse/transport.hpp"

namespace mrse {

/// One benchmark result row. Correctness is verified on every iteration,
/// never sampled; a single mismatch fails the run. Reference columns
/// carry published single-thread measurements at |N|=3072 for context
/// (zero when none exists for the op); runtime is hardware-dependent and
/// informational, while the communication columns are exact.
struct BenchReport {
  std::string op;
  unsigned long n_bits = 0;
  unsigned long kappa = 0;
  unsigned long sigma = 0;
  unsigned long data_bits = 0;
  int iterations = 0;
  double mean_ms = 0;
  double median_ms = 0;
  double p95_ms = 0;
  // Per-iteration payload bits, identical across iterations by
  // construction (verified during the run).
  MeterSnapshot per_iter_bits;
  int pass_count = 0;
  // Predicted modular multiplications per server from the closed-form
  // operation counts (0 where no formula applies).
  uint64_t predicted_muls_s0 = 0;
  uint64_t predicted_muls_s1 = 0;
  double reference_ms = 0;
  double reference_comm_kb = 0;

  static std::string csv_header();
  std::string to_csv_row() const;
  std::string to_json() const;
};

/// Runs `iters` iterations of one operation over an in-process harness
/// seeded from `seed`, timing the protocol run (uploads excluded) and
/// checking the result against plaintext arithmetic every iteration.
/// Ops: smul, scmp, s2c, c2s, poly (the theta path; poly-s2c for the
/// re-encryption path).
BenchReport run_bench(const KeyPair& keys, const AssistedTuple& t0,
                      const AssistedTuple& t1, const std::string& op,
                      int iters, uint64_t seed);

}  // namespace mrse
