// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: key and tuple generation, data upload,
// protocol execution over in-process or TCP transports, and benchmark
// reports with byte-exact communication accounting.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>

#include "mrse/bench.hpp"
#include "mrse/keystore.hpp"

namespace {

using namespace mrse;

uint64_t seed_or_entropy(std::optional<uint64_t> seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<uint64_t>(rd()) << 32) ^ rd();
}

SecurityParams toy_params() {
  SecurityParams sp;
  sp.kappa = 8;
  sp.n_bits = 10;
  sp.l_sk_bits = 12;
  sp.sigma = 4;
  sp.data_bits = 4;
  sp.toy = true;
  return sp;
}

void attach_enc_table(PublicKey& pk) {
  if (pk.params.toy) return;
  pk.h_table = std::make_shared<FixedBaseTable>(pk.h, pk.N,
                                                pk.params.l_sk_bits);
}

int cmd_keygen(const std::string& out_dir, unsigned long kappa,
               unsigned long data_bits, unsigned long sigma, bool toy,
               std::optional<uint64_t> seed) {
  std::filesystem::create_directories(out_dir);
  StoreLayout store{out_dir};
  Rng rng(seed_or_entropy(seed));

  KeyPair kp;
  if (toy) {
    SecurityParams sp = toy_params();
    kp = keygen(inject_param_set(11, 59, 5, 29, sp), sp, rng);
  } else {
    kp = keygen(make_security_params(kappa, data_bits, sigma), rng);
  }

  auto [t0, t1] = do_init(kp, rng);
  save_public_key(store.public_key(), kp.pk);
  save_private_key(store.private_key(), kp.sk, kp.pset);
  save_assisted_tuple(store.assisted(0), t0, kp.pk);
  save_assisted_tuple(store.assisted(1), t1, kp.pk);

  std::cout << "keystore: " << out_dir << "\n"
            << "|N|: " << bit_length(kp.pk.N) << " bits\n"
            << "server files: pk.mrse assisted_s0.mrse assisted_s1.mrse\n"
            << "data-owner only: sk.mrse\n";
  return 0;
}

int cmd_upload(const std::string& store_dir, const std::vector<long>& xs,
               std::optional<uint64_t> seed) {
  StoreLayout store{store_dir};
  KeyPair kp = load_keypair(store);
  Rng rng(seed_or_entropy(seed));

  std::vector<StoredUpload> uploads;
  if (std::filesystem::exists(store.uploads())) {
    uploads = load_uploads(store.uploads(), kp.pk);
  }
  uint64_t next_id = uploads.empty() ? 1 : uploads.back().id + 1;
  for (long x : xs) {
    StoredUpload u;
    u.id = next_id++;
    u.x = x;
    auto [r0, r1] = do_upload(kp, u.x, rng);
    u.for_s0 = r0;
    u.for_s1 = r1;
    std::cout << "upload id " << u.id << ": x = " << x << "\n";
    uploads.push_back(std::move(u));
  }
  save_uploads(store.uploads(), uploads, kp.pk);
  return 0;
}

void print_delta(const char* label, const MeterSnapshot& d) {
  std::cout << label << " payload bits s0->s1: " << d.s0_to_s1_bits << "\n"
            << label << " payload bits s1->s0: " << d.s1_to_s0_bits << "\n"
            << label << " payload bits server->do: " << d.server_to_do_bits
            << "\n"
            << label << " payload bits do->server: " << d.do_to_server_bits
            << "\n";
}

int cmd_run(const std::string& store_dir, const std::string& op, long x,
            long y, uint64_t x_id, uint64_t y_id,
            const std::string& transport, const std::string& peer_s0,
            const std::string& peer_s1, std::optional<uint64_t> seed,
            bool fresh_rerandomize) {
  StoreLayout store{store_dir};
  KeyPair kp = load_keypair(store);
  attach_enc_table(kp.pk);
  uint64_t s = seed_or_entropy(seed);

  std::unique_ptr<InProcTransport> inproc;
  std::unique_ptr<TcpTransport> tcp;
  Transport* net = nullptr;
  if (transport == "inproc") {
    AssistedTuple t0 = load_assisted_tuple(store.assisted(0));
    AssistedTuple t1 = load_assisted_tuple(store.assisted(1));
    inproc = std::make_unique<InProcTransport>(
        ServerNode(Role::server0, kp.pk, t0, s ^ 0xA, fresh_rerandomize),
        ServerNode(Role::server1, kp.pk, t1, s ^ 0xB, fresh_rerandomize));
    net = inproc.get();
  } else if (transport == "tcp") {
    if (peer_s0.empty() || peer_s1.empty()) {
      throw TransportError("tcp transport needs --peer-s0 and --peer-s1");
    }
    tcp = std::make_unique<TcpTransport>(kp.pk.N, peer_s0, peer_s1);
    net = tcp.get();
  } else {
    throw RangeError("unknown transport: " + transport);
  }

  Driver drv(kp, *net, s ^ 0xD);
  bool ok = false;
  std::cout << "op: " << op << "\n";

  // A staged upload (from the `upload` subcommand) can stand in for a
  // fresh --x/--y value.
  auto resolve = [&](uint64_t want, long& plain_out) -> uint64_t {
    if (want == 0) return drv.upload(plain_out);
    for (const StoredUpload& u : load_uploads(store.uploads(), kp.pk)) {
      if (u.id == want) {
        plain_out = static_cast<long>(u.x.get_si());
        return drv.upload_records(u.for_s0, u.for_s1);
      }
    }
    throw RangeError("no staged upload with id " + std::to_string(want));
  };

  if (op == "smul") {
    uint64_t xi = resolve(x_id, x), yi = resolve(y_id, y);
    MeterSnapshot before = drv.meter();
    Mpz got = drv.run_smul(xi, yi);
    MeterSnapshot delta = drv.meter() - before;
    std::cout << "x: " << x << "\ny: " << y << "\nresult: " << got << "\n";
    ok = got == Mpz(x) * Mpz(y);
    print_delta("smul", delta);
  } else if (op == "scmp") {
    uint64_t xi = resolve(x_id, x), yi = resolve(y_id, y);
    MeterSnapshot before = drv.meter();
    Driver::ScmpRun run = drv.run_scmp(xi, yi);
    MeterSnapshot delta = drv.meter() - before;
    std::cout << "x: " << x << "\ny: " << y << "\nmu: " << run.mu << "\n";
    ok = run.mu == (x < y ? 1 : 0);
    print_delta("scmp", delta);
  } else if (op == "s2c") {
    uint64_t xi = resolve(x_id, x), yi = resolve(y_id, y);
    Mpz prod = drv.run_smul(xi, yi);
    uint64_t smul_sid = drv.last_session();
    MeterSnapshot before = drv.meter();
    Driver::S2cRun run = drv.run_s2c(smul_sid);
    MeterSnapshot delta = drv.meter() - before;
    std::cout << "x: " << x << "\ny: " << y << "\nsmul result: " << prod
              << "\nre-encrypted product decrypts to: " << run.value << "\n";
    ok = prod == Mpz(x) * Mpz(y) && run.value == prod;
    print_delta("s2c", delta);
  } else if (op == "c2s") {
    uint64_t xi = resolve(x_id, x), yi = resolve(y_id, y);
    Driver::ScmpRun cmp = drv.run_scmp(xi, yi);
    MeterSnapshot before = drv.meter();
    Mpz mu = drv.run_c2s(cmp.session);
    MeterSnapshot delta = drv.meter() - before;
    std::cout << "x: " << x << "\ny: " << y << "\nmu from scmp: " << cmp.mu
              << "\nmu recovered from shares: " << mu << "\n";
    ok = mu == cmp.mu && mu == (x < y ? 1 : 0);
    print_delta("c2s", delta);
  } else if (op == "poly" || op == "poly-s2c") {
    uint64_t xi = resolve(x_id, x);
    MeterSnapshot before = drv.meter();
    Mpz got = drv.run_poly(
        xi, op == "poly" ? PolyPath::theta : PolyPath::s2c);
    MeterSnapshot delta = drv.meter() - before;
    Mpz mx = x;
    Mpz expect = mx * mx * mx * mx * mx + mx * mx * mx * mx + mx * mx * mx +
                 mx * mx + mx + 1;
    std::cout << "x: " << x << "\nf(x): " << got << "\n";
    ok = got == expect;
    print_delta(op.c_str(), delta);
  } else {
    throw RangeError("unknown op: " + op);
  }

  if (transport == "tcp") {
    // Leave the servers running for further commands.
  }
  std::cout << "check: " << (ok ? "ok" : "MISMATCH") << "\n";
  return ok ? 0 : 1;
}

int cmd_bench(const std::string& store_dir, const std::string& op, int iters,
              const std::string& format, const std::string& out_file,
              std::optional<uint64_t> seed) {
  StoreLayout store{store_dir};
  KeyPair kp = load_keypair(store);
  attach_enc_table(kp.pk);
  AssistedTuple t0 = load_assisted_tuple(store.assisted(0));
  AssistedTuple t1 = load_assisted_tuple(store.assisted(1));

  BenchReport rep =
      run_bench(kp, t0, t1, op, iters, seed_or_entropy(seed));

  std::string text = format == "json"
                         ? rep.to_json() + "\n"
                         : BenchReport::csv_header() + "\n" +
                               rep.to_csv_row() + "\n";
  if (out_file.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_file, std::ios::trunc);
    if (!out) throw IoError("cannot write report: " + out_file);
    out << text;
    std::cout << "report: " << out_file << "\n";
  }
  return rep.pass_count == iters ? 0 : 1;
}

int cmd_serve(const std::string& store_dir, const std::string& role_str,
              const std::string& listen, const std::string& peer,
              std::optional<uint64_t> seed, bool fresh_rerandomize) {
  StoreLayout store{store_dir};
  PublicKey pk = load_public_key(store.public_key());
  attach_enc_table(pk);
  Role role;
  int role_bit;
  if (role_str == "s0") {
    role = Role::server0;
    role_bit = 0;
  } else if (role_str == "s1") {
    role = Role::server1;
    role_bit = 1;
  } else {
    throw RangeError("role must be s0 or s1");
  }
  AssistedTuple tuple = load_assisted_tuple(store.assisted(role_bit));
  auto [host, port] = parse_addr(listen);

  ServerNode node(role, pk, tuple, seed_or_entropy(seed), fresh_rerandomize);
  TcpServer server(std::move(node), host, port,
                   peer.empty() ? std::nullopt
                                : std::optional<std::string>(peer));
  std::cout << role_str << " listening on " << host << ":" << server.port()
            << std::endl;
  server.run();
  std::cout << role_str << " shut down\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Two-server homomorphic secret sharing toolkit: encrypted signed "
      "integers with non-interactive multiplication, comparison, and "
      "share/ciphertext conversions"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<uint64_t> seed;
  app.add_option("--seed", seed, "Deterministic seed for all randomness")
      ->envname("MRSE_SEED");

  // keygen
  auto* keygen_cmd =
      app.add_subcommand("keygen", "Generate keys and assisted tuples");
  std::string out_dir;
  unsigned long kappa = 128, data_bits = 32, sigma = 128;
  bool toy = false;
  keygen_cmd->add_option("--out", out_dir, "Keystore directory")->required();
  keygen_cmd->add_option("--kappa", kappa, "Security level (112, 128, ...)");
  keygen_cmd->add_option("--l", data_bits, "Plaintext magnitude bound 2^l");
  keygen_cmd->add_option("--sigma", sigma, "Comparison blinding bits");
  keygen_cmd->add_flag("--toy", toy, "Tiny fixture modulus N=649 (dev only)");

  // upload
  auto* upload_cmd =
      app.add_subcommand("upload", "Stage encrypted uploads in the keystore");
  std::string store_dir;
  std::vector<long> xs;
  upload_cmd->add_option("--store", store_dir, "Keystore directory")
      ->required();
  upload_cmd->add_option("--x", xs, "Signed value(s) to upload")->required();

  // run
  auto* run_cmd = app.add_subcommand("run", "Execute one protocol");
  std::string op = "smul", transport = "inproc", peer_s0, peer_s1;
  long x = 0, y = 0;
  uint64_t x_id = 0, y_id = 0;
  bool fresh = false;
  run_cmd->add_option("--store", store_dir, "Keystore directory")->required();
  run_cmd->add_option("--op", op, "smul|scmp|s2c|c2s|poly|poly-s2c")
      ->required();
  run_cmd->add_option("--x", x, "First operand");
  run_cmd->add_option("--y", y, "Second operand");
  run_cmd->add_option("--x-id", x_id, "Staged upload id for the first operand");
  run_cmd->add_option("--y-id", y_id,
                      "Staged upload id for the second operand");
  run_cmd->add_option("--transport", transport, "inproc|tcp");
  run_cmd->add_option("--peer-s0", peer_s0, "host:port of server 0");
  run_cmd->add_option("--peer-s1", peer_s1, "host:port of server 1");
  run_cmd->add_flag("--fresh-rerandomize", fresh,
                    "Mask comparison outputs with fresh zeros");

  // bench
  auto* bench_cmd =
      app.add_subcommand("bench", "Measure runtime and traffic for one op");
  int iters = 100;
  std::string format = "csv", out_file;
  bench_cmd->add_option("--store", store_dir, "Keystore directory")
      ->required();
  bench_cmd->add_option("--op", op, "smul|scmp|s2c|c2s|poly|poly-s2c")
      ->required();
  bench_cmd->add_option("--iters", iters, "Iterations (every one verified)");
  bench_cmd->add_option("--format", format, "csv|json");
  bench_cmd->add_option("--out", out_file, "Write the report to a file");

  // serve
  auto* serve_cmd =
      app.add_subcommand("serve", "Run one server over TCP until shutdown");
  std::string role_str, listen_addr, peer_addr;
  serve_cmd->add_option("--store", store_dir, "Keystore directory")
      ->required();
  serve_cmd->add_option("--role", role_str, "s0|s1")->required();
  serve_cmd->add_option("--listen", listen_addr, "host:port to bind")
      ->required();
  serve_cmd->add_option("--peer", peer_addr,
                        "host:port of server 1 (required for s0)");
  serve_cmd->add_flag("--fresh-rerandomize", fresh,
                      "Mask comparison outputs with fresh zeros");

  CLI11_PARSE(app, argc, argv);

  try {
    if (keygen_cmd->parsed()) {
      return cmd_keygen(out_dir, kappa, data_bits, sigma, toy, seed);
    }
    if (upload_cmd->parsed()) {
      return cmd_upload(store_dir, xs, seed);
    }
    if (run_cmd->parsed()) {
      return cmd_run(store_dir, op, x, y, x_id, y_id, transport, peer_s0,
                     peer_s1, seed, fresh);
    }
    if (bench_cmd->parsed()) {
      return cmd_bench(store_dir, op, iters, format, out_file, seed);
    }
    if (serve_cmd->parsed()) {
      return cmd_serve(store_dir, role_str, listen_addr, peer_addr, seed,
                       fresh);
    }
  } catch (const mrse::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
