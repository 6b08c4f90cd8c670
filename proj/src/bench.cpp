// SPDX-License-Identifier: Apache-2.0
#include "mrse/bench.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include <json.hpp>

namespace mrse {

namespace {

struct Reference {
  double ms = 0;
  double comm_kb = 0;
};

// Published single-thread measurements at |N| = 3072 (l = 32) used as
// context columns in reports; not pass/fail gates.
Reference reference_for(const std::string& op) {
  if (op == "smul") return {6.3, 0};
  if (op == "scmp") return {13.9, 1.874};
  if (op == "poly") return {24.2, 0};
  return {0, 0};
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  double idx = q * (static_cast<double>(v.size()) - 1);
  size_t lo = static_cast<size_t>(idx);
  size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = idx - static_cast<double>(lo);
  return v[lo] * (1 - frac) + v[hi] * frac;
}

}  // namespace

std::string BenchReport::csv_header() {
  return "op,n_bits,kappa,sigma,data_bits,iterations,mean_ms,median_ms,"
         "p95_ms,bits_s0_to_s1,bits_s1_to_s0,bits_server_to_do,"
         "bits_do_to_server,pass_count,predicted_muls_s0,predicted_muls_s1,"
         "reference_ms,reference_comm_kb";
}

std::string BenchReport::to_csv_row() const {
  std::ostringstream out;
  out << op << ',' << n_bits << ',' << kappa << ',' << sigma << ','
      << data_bits << ',' << iterations << ',' << mean_ms << ',' << median_ms
      << ',' << p95_ms << ',' << per_iter_bits.s0_to_s1_bits << ','
      << per_iter_bits.s1_to_s0_bits << ',' << per_iter_bits.server_to_do_bits
      << ',' << per_iter_bits.do_to_server_bits << ',' << pass_count << ','
      << predicted_muls_s0 << ',' << predicted_muls_s1 << ',' << reference_ms
      << ',' << reference_comm_kb;
  return out.str();
}

std::string BenchReport::to_json() const {
  nlohmann::json j{
      {"op", op},
      {"params",
       {{"n_bits", n_bits},
        {"kappa", kappa},
        {"sigma", sigma},
        {"data_bits", data_bits}}},
      {"iterations", iterations},
      {"runtime_ms",
       {{"mean", mean_ms}, {"median", median_ms}, {"p95", p95_ms}}},
      {"payload_bits",
       {{"s0_to_s1", per_iter_bits.s0_to_s1_bits},
        {"s1_to_s0", per_iter_bits.s1_to_s0_bits},
        {"server_to_do", per_iter_bits.server_to_do_bits},
        {"do_to_server", per_iter_bits.do_to_server_bits}}},
      {"pass_count", pass_count},
      {"predicted_muls",
       {{"s0", predicted_muls_s0}, {"s1", predicted_muls_s1}}},
      {"reference", {{"ms", reference_ms}, {"comm_kb", reference_comm_kb}}}};
  return j.dump(2);
}

BenchReport run_bench(const KeyPair& keys, const AssistedTuple& t0,
                      const AssistedTuple& t1, const std::string& op,
                      int iters, uint64_t seed) {
  const SecurityParams& sp = keys.pk.params;
  if (iters <= 0) throw RangeError("iterations must be positive");

  BenchReport rep;
  rep.op = op;
  rep.n_bits = sp.n_bits;
  rep.kappa = sp.kappa;
  rep.sigma = sp.sigma;
  rep.data_bits = sp.data_bits;
  rep.iterations = iters;
  Reference ref = reference_for(op);
  rep.reference_ms = ref.ms;
  rep.reference_comm_kb = ref.comm_kb;

  // Closed-form modular-multiplication predictions (1.5 muls per
  // exponent bit; |2*alpha| = l_sk + 1).
  double two_alpha_bits = static_cast<double>(sp.l_sk_bits + 1);
  auto muls = [](double bits) { return static_cast<uint64_t>(1.5 * bits); };
  if (op == "smul") {
    rep.predicted_muls_s0 = rep.predicted_muls_s1 =
        muls(two_alpha_bits + sp.data_bits + sp.kappa);
  } else if (op == "scmp") {
    rep.predicted_muls_s0 = muls(sp.sigma + two_alpha_bits + sp.kappa);
    rep.predicted_muls_s1 = muls(two_alpha_bits + sp.kappa);
  } else if (op == "s2c") {
    rep.predicted_muls_s0 = rep.predicted_muls_s1 =
        muls(static_cast<double>(sp.n_bits) + 4.0 * sp.kappa);
  } else if (op == "c2s") {
    rep.predicted_muls_s0 = rep.predicted_muls_s1 =
        muls(two_alpha_bits + sp.kappa);
  }

  InProcTransport net(ServerNode(Role::server0, keys.pk, t0, seed ^ 0xA),
                      ServerNode(Role::server1, keys.pk, t1, seed ^ 0xB));
  Driver drv(keys, net, seed ^ 0xD);
  Rng data_rng(seed ^ 0xE);
  Mpz lim = pow2(sp.data_bits);

  std::vector<double> times;
  times.reserve(static_cast<size_t>(iters));
  std::optional<MeterSnapshot> per_iter;

  for (int i = 0; i < iters; ++i) {
    using clock = std::chrono::steady_clock;
    Mpz x = data_rng.range(-lim, lim);
    Mpz y = data_rng.range(-lim, lim);
    bool ok = false;
    MeterSnapshot before;
    clock::time_point t_start;

    if (op == "smul") {
      uint64_t xi = drv.upload(x), yi = drv.upload(y);
      before = drv.meter();
      t_start = clock::now();
      Mpz got = drv.run_smul(xi, yi);
      times.push_back(std::chrono::duration<double, std::milli>(
                          clock::now() - t_start)
                          .count());
      ok = got == x * y;
    } else if (op == "scmp") {
      uint64_t xi = drv.upload(x), yi = drv.upload(y);
      before = drv.meter();
      t_start = clock::now();
      Driver::ScmpRun run = drv.run_scmp(xi, yi);
      times.push_back(std::chrono::duration<double, std::milli>(
                          clock::now() - t_start)
                          .count());
      ok = run.mu == (x < y ? 1 : 0);
    } else if (op == "s2c") {
      uint64_t xi = drv.upload(x), yi = drv.upload(y);
      Mpz got = drv.run_smul(xi, yi);
      if (got != x * y) throw RecoveryError("smul stage failed in bench");
      uint64_t smul_sid = drv.last_session();
      before = drv.meter();
      t_start = clock::now();
      Driver::S2cRun run = drv.run_s2c(smul_sid);
      times.push_back(std::chrono::duration<double, std::milli>(
                          clock::now() - t_start)
                          .count());
      ok = run.value == x * y;
    } else if (op == "c2s") {
      uint64_t xi = drv.upload(x), yi = drv.upload(y);
      Driver::ScmpRun cmp = drv.run_scmp(xi, yi);
      before = drv.meter();
      t_start = clock::now();
      Mpz mu = drv.run_c2s(cmp.session);
      times.push_back(std::chrono::duration<double, std::milli>(
                          clock::now() - t_start)
                          .count());
      ok = mu == (x < y ? 1 : 0);
    } else if (op == "poly" || op == "poly-s2c") {
      Mpz px = data_rng.range(0, 3);
      uint64_t xi = drv.upload(px);
      before = drv.meter();
      t_start = clock::now();
      Mpz got = drv.run_poly(
          xi, op == "poly" ? PolyPath::theta : PolyPath::s2c);
      times.push_back(std::chrono::duration<double, std::milli>(
                          clock::now() - t_start)
                          .count());
      Mpz expect =
          px * px * px * px * px + px * px * px * px + px * px * px + px * px +
          px + 1;
      ok = got == expect;
    } else {
      throw RangeError("unknown bench op: " + op);
    }

    MeterSnapshot delta = drv.meter() - before;
    if (per_iter && !(delta == *per_iter)) {
      throw ProtocolError("per-iteration traffic is not constant");
    }
    per_iter = delta;
    if (!ok) {
      throw RecoveryError("bench iteration " + std::to_string(i) +
                          " produced a wrong result for op " + op);
    }
    rep.pass_count += 1;
  }

  rep.per_iter_bits = *per_iter;
  double sum = 0;
  for (double t : times) sum += t;
  rep.mean_ms = sum / static_cast<double>(times.size());
  rep.median_ms = percentile(times, 0.5);
  rep.p95_ms = percentile(times, 0.95);
  return rep;
}

}  // namespace mrse
