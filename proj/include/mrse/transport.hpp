// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <map>
#include <mutex>
#include <optional>

#include "mrse/wire.hpp"

namespace mrse {

enum class Role : uint8_t { data_owner = 0, server0 = 1, server1 = 2 };

const char* role_name(Role r);

struct MeterSnapshot {
  uint64_t s0_to_s1_bits = 0;
  uint64_t s1_to_s0_bits = 0;
  uint64_t server_to_do_bits = 0;
  uint64_t do_to_server_bits = 0;

  uint64_t inter_server_bits() const { return s0_to_s1_bits + s1_to_s0_bits; }
  MeterSnapshot operator-(const MeterSnapshot& rhs) const;
  bool operator==(const MeterSnapshot&) const = default;
};

/// Per-link payload-bit accounting. Only protocol messages count:
/// framing bytes and Control frames (orchestration, meter queries) are
/// excluded, so the totals are directly comparable with the closed-form
/// per-protocol costs. Thread-safe.
class CommMeter {
 public:
  void record(Role from, Role to, const wire::Bytes& frame);
  void merge(const MeterSnapshot& delta);
  MeterSnapshot snapshot() const;

 private:
  mutable std::mutex mu_;
  MeterSnapshot totals_;
};

/// Which message types each directed link may carry. In particular a
/// ciphertext result may only travel from server 0 to the data owner.
/// ProtocolError on violation.
void enforce_route_contract(Role from, Role to, wire::MsgType type);

struct Outbound {
  Role dest;
  wire::Bytes frame;
};

/// One compute server (S0 or S1) as a deterministic frame-in/frames-out
/// state machine, independent of any transport. Sessions are keyed by
/// the frame session id; stored uploads and results live under the id
/// they arrived with.
class ServerNode {
 public:
  /// `fresh_rerandomize` swaps the verbatim stored-[0] masking in the
  /// comparison protocol for freshly encrypted zeros.
  ServerNode(Role role, PublicKey pk, std::optional<AssistedTuple> tuple,
             uint64_t rng_seed, bool fresh_rerandomize = false);

  std::vector<Outbound> handle(Role from, const wire::Bytes& frame);

  Role role() const { return role_; }
  const wire::Codec& codec() const { return codec_; }

  // Introspection for tests (e.g. byte-identity of S2C outputs on both
  // servers).
  const Ciphertext* stored_result_ct(uint64_t id) const;
  const Share* stored_result_share(uint64_t id) const;

 private:
  int role_bit() const { return role_ == Role::server0 ? 0 : 1; }
  Role peer() const {
    return role_ == Role::server0 ? Role::server1 : Role::server0;
  }
  const AssistedTuple& tuple() const;

  std::vector<Outbound> handle_control(Role from, uint64_t sid,
                                       const wire::ControlMsg& m);
  std::vector<Outbound> start_s2c(uint64_t sid, const Share& input);
  std::vector<Outbound> on_peer_s2c_ct(uint64_t sid, const Ciphertext& ct);
  std::vector<Outbound> start_poly(uint64_t sid, uint64_t x_id,
                                   wire::OpCode op);
  std::vector<Outbound> poly_advance(uint64_t sid);
  Outbound to_do_share(uint64_t sid, const Share& s) const;
  Outbound to_do_ct(uint64_t sid, const Ciphertext& ct) const;

  Role role_;
  PublicKey pk_;
  std::optional<AssistedTuple> tuple_;
  wire::Codec codec_;
  Rng rng_;
  bool fresh_rerandomize_ = false;

  std::map<uint64_t, Ciphertext> upload_cts_;
  std::map<uint64_t, Share> upload_shares_;
  std::map<uint64_t, Share> result_shares_;
  std::map<uint64_t, Ciphertext> result_cts_;
  std::map<uint64_t, ScmpSession> scmp_sessions_;

  struct S2cState {
    std::optional<Ciphertext> mine;
    std::optional<Ciphertext> theirs;
  };
  std::map<uint64_t, S2cState> s2c_;

  struct PolyState {
    uint64_t x_id = 0;
    int k = 2;  // next power to form
    Ciphertext cur_ct;
    Share acc;
    std::optional<Ciphertext> mine;
    std::optional<Ciphertext> theirs;
    bool active = false;
  };
  std::map<uint64_t, PolyState> poly_;
};

/// Driver-side view of the network: frames out, frames in, plus the
/// aggregated meter. Implementations: in-process pair of nodes, or TCP
/// links to remote serve loops.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(Role dest, const wire::Bytes& frame) = 0;
  /// Next frame addressed to the data owner; blocks (TCP) or fails
  /// (in-process) when nothing is pending.
  virtual std::pair<Role, wire::Bytes> recv() = 0;
  virtual MeterSnapshot meter() = 0;
};

/// Both servers in-process; frames route synchronously and
/// deterministically through a central queue with metering at each hop.
class InProcTransport : public Transport {
 public:
  InProcTransport(ServerNode s0, ServerNode s1);

  void send(Role dest, const wire::Bytes& frame) override;
  std::pair<Role, wire::Bytes> recv() override;
  MeterSnapshot meter() override;

  ServerNode& node(Role r);

 private:
  void pump(Role from, Role dest, const wire::Bytes& frame);

  ServerNode s0_;
  ServerNode s1_;
  CommMeter meter_;
  std::deque<std::pair<Role, wire::Bytes>> do_inbox_;
};

/// Blocking serve loop hosting one ServerNode over TCP. Inbound
/// connections identify themselves with a hello control frame; server 0
/// additionally dials server 1. Exits on a shutdown control frame.
class TcpServer {
 public:
  /// Binds immediately; port 0 picks a free port (see port()).
  TcpServer(ServerNode node, const std::string& listen_host,
            uint16_t listen_port,
            std::optional<std::string> peer_addr = std::nullopt);
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  uint16_t port() const { return port_; }
  /// Processes frames until shutdown; call from a dedicated thread or
  /// process.
  void run();

 private:
  void route(std::vector<Outbound> outs);

  ServerNode node_;
  std::optional<std::string> peer_addr_;
  int listen_fd_ = -1;
  int do_fd_ = -1;
  int peer_fd_ = -1;
  uint16_t port_ = 0;
  CommMeter meter_;
};

/// Driver-side transport over TCP links to two serve loops. The meter
/// aggregates this side's sends with the per-server reports fetched via
/// meter-query control frames.
class TcpTransport : public Transport {
 public:
  TcpTransport(const Mpz& modulus, const std::string& s0_addr,
               const std::string& s1_addr);
  ~TcpTransport();
  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  void send(Role dest, const wire::Bytes& frame) override;
  std::pair<Role, wire::Bytes> recv() override;
  MeterSnapshot meter() override;

 private:
  int fd_for(Role dest) const;
  MeterSnapshot query_server(Role server);

  wire::Codec codec_;
  int s0_fd_ = -1;
  int s1_fd_ = -1;
  CommMeter own_;
  std::deque<std::pair<Role, wire::Bytes>> pending_;
};

/// "host:port" -> (host, port). TransportError on malformed input.
std::pair<std::string, uint16_t> parse_addr(const std::string& addr);

/// The data owner: uploads values, triggers protocol runs, collects and
/// verifies results. Owns sk; the transport never sees it.
class Driver {
 public:
  Driver(const KeyPair& keys, Transport& transport, uint64_t rng_seed);

  /// Sends [x] to both servers and the matching integer shares of
  /// 2*alpha*x; returns the upload id.
  uint64_t upload(const Mpz& x);

  /// Sends pre-built upload records (e.g. staged in a keystore).
  uint64_t upload_records(const UploadRecord& r0, const UploadRecord& r1);

  /// Pushes assisted tuples over the wire (normally they are preloaded
  /// from the keystore).
  void push_assisted(const AssistedTuple& t0, const AssistedTuple& t1);

  Mpz run_smul(uint64_t x_id, uint64_t y_id);
  /// Returns mu = [x < y] as 0/1; the result ciphertext stays on S0
  /// under the returned session id.
  struct ScmpRun {
    Mpz mu;
    uint64_t session;
  };
  ScmpRun run_scmp(uint64_t x_id, uint64_t y_id);
  /// Converts the shares of a finished smul session to a ciphertext and
  /// returns its decryption (signed).
  struct S2cRun {
    Mpz value;
    uint64_t session;
  };
  S2cRun run_s2c(uint64_t smul_session);
  /// Converts a ciphertext held by S0 (scmp or s2c output) to shares and
  /// returns the recovered plaintext of that ciphertext.
  Mpz run_c2s(uint64_t ct_session);
  Mpz run_poly(uint64_t x_id, PolyPath path);

  void shutdown();
  MeterSnapshot meter() { return transport_.meter(); }
  /// Session id assigned to the most recent upload or run.
  uint64_t last_session() const { return next_session_ - 1; }

 private:
  uint64_t fresh_session();
  void send_both(const wire::ProtocolMessage& msg);
  wire::ProtocolMessage expect(Role& from_out);
  /// Collects one ResultShare from each server for `sid`.
  SharePair collect_share_pair(uint64_t sid);
  Ciphertext collect_result_ct(uint64_t sid);

  const KeyPair& keys_;
  Transport& transport_;
  wire::Codec codec_;
  Rng rng_;
  uint64_t next_session_ = 1;
};

}  // namespace mrse
