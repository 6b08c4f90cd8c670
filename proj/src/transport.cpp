// SPDX-License-Identifier: Apache-2.0
#include "mrse/transport.hpp"

namespace mrse {

using namespace wire;

const char* role_name(Role r) {
  switch (r) {
    case Role::data_owner:
      return "do";
    case Role::server0:
      return "s0";
    case Role::server1:
      return "s1";
  }
  return "?";
}

MeterSnapshot MeterSnapshot::operator-(const MeterSnapshot& rhs) const {
  return MeterSnapshot{s0_to_s1_bits - rhs.s0_to_s1_bits,
                       s1_to_s0_bits - rhs.s1_to_s0_bits,
                       server_to_do_bits - rhs.server_to_do_bits,
                       do_to_server_bits - rhs.do_to_server_bits};
}

void CommMeter::record(Role from, Role to, const Bytes& frame) {
  if (frame.size() >= 6 &&
      frame[5] == static_cast<uint8_t>(MsgType::control)) {
    return;  // orchestration, not protocol traffic
  }
  uint64_t bits = 8 * Codec::payload_length(frame);
  std::lock_guard<std::mutex> lock(mu_);
  if (from == Role::server0 && to == Role::server1) {
    totals_.s0_to_s1_bits += bits;
  } else if (from == Role::server1 && to == Role::server0) {
    totals_.s1_to_s0_bits += bits;
  } else if (to == Role::data_owner) {
    totals_.server_to_do_bits += bits;
  } else {
    totals_.do_to_server_bits += bits;
  }
}

void CommMeter::merge(const MeterSnapshot& delta) {
  std::lock_guard<std::mutex> lock(mu_);
  totals_.s0_to_s1_bits += delta.s0_to_s1_bits;
  totals_.s1_to_s0_bits += delta.s1_to_s0_bits;
  totals_.server_to_do_bits += delta.server_to_do_bits;
  totals_.do_to_server_bits += delta.do_to_server_bits;
}

MeterSnapshot CommMeter::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return totals_;
}

void enforce_route_contract(Role from, Role to, MsgType type) {
  auto fail = [&]() {
    throw ProtocolError(std::string("route contract violation: ") +
                        role_name(from) + " may not send message type " +
                        std::to_string(static_cast<int>(type)) + " to " +
                        role_name(to));
  };
  bool from_do = from == Role::data_owner;
  bool to_do = to == Role::data_owner;
  bool server_pair = !from_do && !to_do && from != to;
  switch (type) {
    case MsgType::upload_ct:
    case MsgType::upload_share:
    case MsgType::assisted_init:
      if (!(from_do && !to_do)) fail();
      break;
    case MsgType::scmp_round1:
    case MsgType::c2s_ct:
      if (!(from == Role::server0 && to == Role::server1)) fail();
      break;
    case MsgType::scmp_round2:
      if (!(from == Role::server1 && to == Role::server0)) fail();
      break;
    case MsgType::s2c_share_ct:
      if (!server_pair) fail();
      break;
    case MsgType::result_share:
      if (!(!from_do && to_do)) fail();
      break;
    case MsgType::result_ct:
      // Only server 0 may hand ciphertext results to the data owner.
      if (!(from == Role::server0 && to == Role::data_owner)) fail();
      break;
    case MsgType::control:
      break;
  }
}

ServerNode::ServerNode(Role role, PublicKey pk,
                       std::optional<AssistedTuple> tuple, uint64_t rng_seed,
                       bool fresh_rerandomize)
    : role_(role),
      pk_(std::move(pk)),
      tuple_(std::move(tuple)),
      codec_(pk_.N),
      rng_(rng_seed),
      fresh_rerandomize_(fresh_rerandomize) {
  if (role != Role::server0 && role != Role::server1) {
    throw ProtocolError("a server node must be server0 or server1");
  }
}

const AssistedTuple& ServerNode::tuple() const {
  if (!tuple_) throw ProtocolError("assisted tuple not initialized");
  return *tuple_;
}

const Ciphertext* ServerNode::stored_result_ct(uint64_t id) const {
  auto it = result_cts_.find(id);
  return it == result_cts_.end() ? nullptr : &it->second;
}

const Share* ServerNode::stored_result_share(uint64_t id) const {
  auto it = result_shares_.find(id);
  return it == result_shares_.end() ? nullptr : &it->second;
}

Outbound ServerNode::to_do_share(uint64_t sid, const Share& s) const {
  ProtocolMessage msg{sid, ResultShareMsg{s}};
  return Outbound{Role::data_owner, codec_.encode(msg)};
}

Outbound ServerNode::to_do_ct(uint64_t sid, const Ciphertext& ct) const {
  if (role_ != Role::server0) {
    throw ProtocolError("only server 0 may send ciphertext results");
  }
  ProtocolMessage msg{sid, ResultCtMsg{ct}};
  return Outbound{Role::data_owner, codec_.encode(msg)};
}

std::vector<Outbound> ServerNode::handle(Role from, const Bytes& frame) {
  ProtocolMessage msg = codec_.decode(frame);
  enforce_route_contract(from, role_, msg.type());
  uint64_t sid = msg.session_id;
  std::vector<Outbound> out;

  std::visit(
      [&](auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, UploadCtMsg>) {
          upload_cts_[sid] = m.ct;
        } else if constexpr (std::is_same_v<T, UploadShareMsg>) {
          if (m.share.role != role_bit()) {
            throw ProtocolError("upload share routed to the wrong server");
          }
          upload_shares_[sid] = m.share;
        } else if constexpr (std::is_same_v<T, AssistedInitMsg>) {
          if (m.tuple.two_alpha_share.role != role_bit()) {
            throw ProtocolError("assisted tuple routed to the wrong server");
          }
          tuple_ = m.tuple;
        } else if constexpr (std::is_same_v<T, ScmpRound1Msg>) {
          ScmpRound2Out r2 = scmp_s1_round(
              m.d_ct, m.z0_masked, tuple(),
              fresh_rerandomize_ ? &pk_ : nullptr,
              fresh_rerandomize_ ? &rng_ : nullptr);
          ProtocolMessage reply{sid, ScmpRound2Msg{r2.ct_mu0}};
          out.push_back({Role::server0, codec_.encode(reply)});
        } else if constexpr (std::is_same_v<T, ScmpRound2Msg>) {
          auto it = scmp_sessions_.find(sid);
          if (it == scmp_sessions_.end()) {
            throw ProtocolError(
                "comparison round 2 for an unknown session (round 1 never "
                "ran or was already finalized)");
          }
          ComparisonResult res = scmp_s0_finalize(
              it->second, m.ct_mu0, tuple(),
              fresh_rerandomize_ ? &pk_ : nullptr,
              fresh_rerandomize_ ? &rng_ : nullptr);
          scmp_sessions_.erase(it);
          result_cts_[sid] = res.ct_mu;
          out.push_back(to_do_ct(sid, res.ct_mu));
        } else if constexpr (std::is_same_v<T, S2cShareCtMsg>) {
          auto sub = on_peer_s2c_ct(sid, m.ct);
          out.insert(out.end(), sub.begin(), sub.end());
        } else if constexpr (std::is_same_v<T, C2sCtMsg>) {
          Share s = c2s_local(role_bit(), m.ct, tuple());
          result_shares_[sid] = s;
          out.push_back(to_do_share(sid, s));
        } else if constexpr (std::is_same_v<T, ControlMsg>) {
          auto sub = handle_control(from, sid, m);
          out.insert(out.end(), sub.begin(), sub.end());
        } else {
          throw ProtocolError("message type not expected at a server");
        }
      },
      msg.body);

  return out;
}

std::vector<Outbound> ServerNode::handle_control(Role from, uint64_t sid,
                                                 const ControlMsg& m) {
  std::vector<Outbound> out;
  if (m.cmd != ControlCmd::run_op) return out;  // hello etc.: nothing to do
  if (from != Role::data_owner) {
    throw ProtocolError("only the data owner issues commands");
  }
  auto op = static_cast<OpCode>(m.role_or_op);
  switch (op) {
    case OpCode::smul: {
      auto ct = upload_cts_.find(m.x_id);
      auto sh = upload_shares_.find(m.y_id);
      if (ct == upload_cts_.end() || sh == upload_shares_.end()) {
        throw ProtocolError("smul references an unknown upload");
      }
      Share z = smul_local(role_bit(), ct->second, sh->second);
      result_shares_[sid] = z;
      out.push_back(to_do_share(sid, z));
      break;
    }
    case OpCode::scmp: {
      if (role_ != Role::server0) {
        throw ProtocolError("comparisons start at server 0");
      }
      auto cx = upload_cts_.find(m.x_id);
      auto cy = upload_cts_.find(m.y_id);
      if (cx == upload_cts_.end() || cy == upload_cts_.end()) {
        throw ProtocolError("scmp references an unknown upload");
      }
      ScmpRound1Out r1 =
          scmp_s0_round1(pk_, cx->second, cy->second, tuple(), rng_, sid);
      scmp_sessions_[sid] = r1.session;
      ProtocolMessage msg1{sid, ScmpRound1Msg{r1.d_ct, r1.z0_masked}};
      out.push_back({Role::server1, codec_.encode(msg1)});
      break;
    }
    case OpCode::s2c: {
      auto it = result_shares_.find(m.x_id);
      if (it == result_shares_.end()) {
        throw ProtocolError("s2c references an unknown result share");
      }
      return start_s2c(sid, it->second);
    }
    case OpCode::c2s: {
      if (role_ != Role::server0) {
        throw ProtocolError("c2s starts at server 0, the ciphertext holder");
      }
      auto it = result_cts_.find(m.x_id);
      if (it == result_cts_.end()) {
        throw ProtocolError("c2s references an unknown result ciphertext");
      }
      ProtocolMessage fwd{sid, C2sCtMsg{it->second}};
      out.push_back({Role::server1, codec_.encode(fwd)});
      Share s = c2s_local(0, it->second, tuple());
      result_shares_[sid] = s;
      out.push_back(to_do_share(sid, s));
      break;
    }
    case OpCode::poly_s2c:
    case OpCode::poly_theta:
      return start_poly(sid, m.x_id, op);
    default:
      throw ProtocolError("unknown operation code");
  }
  return out;
}

std::vector<Outbound> ServerNode::start_s2c(uint64_t sid, const Share& input) {
  S2cState& st = s2c_[sid];
  st.mine = s2c_make_ct(input, tuple(), pk_, rng_);
  std::vector<Outbound> out;
  ProtocolMessage msg{sid, S2cShareCtMsg{*st.mine}};
  out.push_back({peer(), codec_.encode(msg)});
  if (st.theirs) {
    Ciphertext mine = *st.mine;
    Ciphertext theirs = *st.theirs;
    Ciphertext combined = role_ == Role::server0 ? s2c_combine(mine, theirs)
                                                 : s2c_combine(theirs, mine);
    result_cts_[sid] = combined;
    s2c_.erase(sid);
    if (role_ == Role::server0) out.push_back(to_do_ct(sid, combined));
  }
  return out;
}

std::vector<Outbound> ServerNode::on_peer_s2c_ct(uint64_t sid,
                                                 const Ciphertext& ct) {
  if (auto pit = poly_.find(sid); pit != poly_.end() && pit->second.active) {
    pit->second.theirs = ct;
    return poly_advance(sid);
  }
  S2cState& st = s2c_[sid];
  st.theirs = ct;
  std::vector<Outbound> out;
  if (st.mine) {
    Ciphertext combined = role_ == Role::server0
                              ? s2c_combine(*st.mine, *st.theirs)
                              : s2c_combine(*st.theirs, *st.mine);
    result_cts_[sid] = combined;
    s2c_.erase(sid);
    if (role_ == Role::server0) out.push_back(to_do_ct(sid, combined));
  }
  return out;
}

std::vector<Outbound> ServerNode::start_poly(uint64_t sid, uint64_t x_id,
                                             OpCode op) {
  auto ct = upload_cts_.find(x_id);
  auto sh = upload_shares_.find(x_id);
  if (ct == upload_cts_.end() || sh == upload_shares_.end()) {
    throw ProtocolError("poly references an unknown upload");
  }

  if (op == OpCode::poly_theta) {
    // Four chained multiplications with theta-compressed exponents and
    // zero server-to-server traffic.
    Mpz theta = default_theta(pk_.params.kappa);
    Share acc = reduce_share_mod_theta(sh->second, theta);
    Share cur = sh->second;
    for (int k = 2; k <= 5; ++k) {
      Share z = smul_local(role_bit(), ct->second, cur);
      Share red = reduce_share_mod_theta(z, theta);
      acc = share_add(acc, red);
      cur = red;
    }
    result_shares_[sid] = acc;
    return {to_do_share(sid, acc)};
  }

  PolyState st;
  st.x_id = x_id;
  st.k = 2;
  st.cur_ct = ct->second;
  st.acc = reduce_share_mod_n(sh->second, pk_.N);
  st.active = true;
  // The peer may have raced ahead: its first step ciphertext can arrive
  // before our command does, parked under the plain-s2c pending map.
  if (auto parked = s2c_.find(sid); parked != s2c_.end()) {
    st.theirs = parked->second.theirs;
    s2c_.erase(parked);
  }
  poly_.insert_or_assign(sid, std::move(st));
  return poly_advance(sid);
}

std::vector<Outbound> ServerNode::poly_advance(uint64_t sid) {
  PolyState& st = poly_.at(sid);
  const Share& base_share = upload_shares_.at(st.x_id);
  std::vector<Outbound> out;

  while (true) {
    if (!st.mine) {
      // [x^k] = smul([x^(k-1)], <2a x>)
      Share z = smul_local(role_bit(), st.cur_ct, base_share);
      st.acc = share_add(st.acc, z);
      if (st.k == 5) {
        result_shares_[sid] = st.acc;
        out.push_back(to_do_share(sid, st.acc));
        poly_.erase(sid);
        return out;
      }
      st.mine = s2c_make_ct(z, tuple(), pk_, rng_);
      ProtocolMessage msg{sid, S2cShareCtMsg{*st.mine}};
      out.push_back({peer(), codec_.encode(msg)});
    }
    if (!st.theirs) return out;  // wait for the peer's step ciphertext
    st.cur_ct = role_ == Role::server0 ? s2c_combine(*st.mine, *st.theirs)
                                       : s2c_combine(*st.theirs, *st.mine);
    st.mine.reset();
    st.theirs.reset();
    st.k += 1;
  }
}

InProcTransport::InProcTransport(ServerNode s0, ServerNode s1)
    : s0_(std::move(s0)), s1_(std::move(s1)) {
  if (s0_.role() != Role::server0 || s1_.role() != Role::server1) {
    throw ProtocolError("in-process transport needs one node per server role");
  }
}

ServerNode& InProcTransport::node(Role r) {
  if (r == Role::server0) return s0_;
  if (r == Role::server1) return s1_;
  throw ProtocolError("no such node");
}

void InProcTransport::send(Role dest, const Bytes& frame) {
  pump(Role::data_owner, dest, frame);
}

void InProcTransport::pump(Role from, Role dest, const Bytes& frame) {
  std::deque<std::tuple<Role, Role, Bytes>> queue;
  queue.emplace_back(from, dest, frame);
  while (!queue.empty()) {
    auto [src, dst, bytes] = std::move(queue.front());
    queue.pop_front();
    meter_.record(src, dst, bytes);
    if (dst == Role::data_owner) {
      enforce_route_contract(src, dst, frame_type(bytes));
      do_inbox_.emplace_back(src, std::move(bytes));
      continue;
    }
    for (auto& o : node(dst).handle(src, bytes)) {
      queue.emplace_back(dst, o.dest, std::move(o.frame));
    }
  }
}

std::pair<Role, Bytes> InProcTransport::recv() {
  if (do_inbox_.empty()) {
    throw ProtocolError("no frame pending for the data owner");
  }
  auto front = std::move(do_inbox_.front());
  do_inbox_.pop_front();
  return front;
}

MeterSnapshot InProcTransport::meter() { return meter_.snapshot(); }

Driver::Driver(const KeyPair& keys, Transport& transport, uint64_t rng_seed)
    : keys_(keys), transport_(transport), codec_(keys.pk.N), rng_(rng_seed) {}

uint64_t Driver::fresh_session() { return next_session_++; }

void Driver::send_both(const ProtocolMessage& msg) {
  Bytes frame = codec_.encode(msg);
  transport_.send(Role::server0, frame);
  transport_.send(Role::server1, frame);
}

uint64_t Driver::upload(const Mpz& x) {
  auto [r0, r1] = do_upload(keys_, x, rng_);
  return upload_records(r0, r1);
}

uint64_t Driver::upload_records(const UploadRecord& r0,
                                const UploadRecord& r1) {
  uint64_t id = fresh_session();
  transport_.send(Role::server0,
                  codec_.encode({id, UploadCtMsg{r0.ct}}));
  transport_.send(Role::server1,
                  codec_.encode({id, UploadCtMsg{r1.ct}}));
  transport_.send(Role::server0,
                  codec_.encode({id, UploadShareMsg{r0.share_2ax}}));
  transport_.send(Role::server1,
                  codec_.encode({id, UploadShareMsg{r1.share_2ax}}));
  return id;
}

void Driver::push_assisted(const AssistedTuple& t0, const AssistedTuple& t1) {
  uint64_t id = fresh_session();
  transport_.send(Role::server0, codec_.encode({id, AssistedInitMsg{t0}}));
  transport_.send(Role::server1, codec_.encode({id, AssistedInitMsg{t1}}));
}

ProtocolMessage Driver::expect(Role& from_out) {
  auto [from, frame] = transport_.recv();
  ProtocolMessage msg = codec_.decode(frame);
  enforce_route_contract(from, Role::data_owner, msg.type());
  if (auto* ctl = std::get_if<ControlMsg>(&msg.body)) {
    if (ctl->cmd == ControlCmd::error_report) {
      throw ProtocolError("server " + std::string(role_name(from)) +
                          " reported: " + ctl->text);
    }
  }
  from_out = from;
  return msg;
}

SharePair Driver::collect_share_pair(uint64_t sid) {
  std::optional<Share> s0, s1;
  while (!s0 || !s1) {
    Role from;
    ProtocolMessage msg = expect(from);
    if (msg.session_id != sid) {
      throw ProtocolError("result for an unexpected session");
    }
    auto* rs = std::get_if<ResultShareMsg>(&msg.body);
    if (rs == nullptr) throw ProtocolError("expected a share result");
    if (rs->share.role == 0) {
      s0 = rs->share;
    } else {
      s1 = rs->share;
    }
  }
  return SharePair{*s0, *s1};
}

Ciphertext Driver::collect_result_ct(uint64_t sid) {
  Role from;
  ProtocolMessage msg = expect(from);
  if (msg.session_id != sid) {
    throw ProtocolError("result for an unexpected session");
  }
  auto* rc = std::get_if<ResultCtMsg>(&msg.body);
  if (rc == nullptr) throw ProtocolError("expected a ciphertext result");
  return rc->ct;
}

Mpz Driver::run_smul(uint64_t x_id, uint64_t y_id) {
  uint64_t sid = fresh_session();
  ControlMsg cmd;
  cmd.cmd = ControlCmd::run_op;
  cmd.role_or_op = static_cast<uint8_t>(OpCode::smul);
  cmd.x_id = x_id;
  cmd.y_id = y_id;
  send_both({sid, cmd});
  return do_recover_product(collect_share_pair(sid), keys_.sk);
}

Driver::ScmpRun Driver::run_scmp(uint64_t x_id, uint64_t y_id) {
  uint64_t sid = fresh_session();
  ControlMsg cmd;
  cmd.cmd = ControlCmd::run_op;
  cmd.role_or_op = static_cast<uint8_t>(OpCode::scmp);
  cmd.x_id = x_id;
  cmd.y_id = y_id;
  transport_.send(Role::server0, codec_.encode({sid, cmd}));
  Mpz mu = decrypt(keys_.sk, collect_result_ct(sid));
  return ScmpRun{mu, sid};
}

Driver::S2cRun Driver::run_s2c(uint64_t smul_session) {
  uint64_t sid = fresh_session();
  ControlMsg cmd;
  cmd.cmd = ControlCmd::run_op;
  cmd.role_or_op = static_cast<uint8_t>(OpCode::s2c);
  cmd.x_id = smul_session;
  send_both({sid, cmd});
  Mpz m = decrypt(keys_.sk, collect_result_ct(sid));
  return S2cRun{decode_signed(m, keys_.pk.N), sid};
}

Mpz Driver::run_c2s(uint64_t ct_session) {
  uint64_t sid = fresh_session();
  ControlMsg cmd;
  cmd.cmd = ControlCmd::run_op;
  cmd.role_or_op = static_cast<uint8_t>(OpCode::c2s);
  cmd.x_id = ct_session;
  transport_.send(Role::server0, codec_.encode({sid, cmd}));
  SharePair pair = collect_share_pair(sid);
  // Shares reconstruct to 2*alpha*mu; recovery divides it back out.
  return do_recover_product(pair, keys_.sk);
}

Mpz Driver::run_poly(uint64_t x_id, PolyPath path) {
  uint64_t sid = fresh_session();
  ControlMsg cmd;
  cmd.cmd = ControlCmd::run_op;
  cmd.role_or_op = static_cast<uint8_t>(
      path == PolyPath::s2c ? OpCode::poly_s2c : OpCode::poly_theta);
  cmd.x_id = x_id;
  send_both({sid, cmd});
  SharePair pair = collect_share_pair(sid);
  Mpz sum_bound = pow2(keys_.pk.params.data_bits + 3);
  Mpz v;
  if (path == PolyPath::s2c) {
    v = do_recover_product(pair, keys_.sk, sum_bound);
  } else {
    Mpz theta = default_theta(keys_.pk.params.kappa);
    v = do_recover_product_theta(pair, keys_.sk, theta, sum_bound);
  }
  return v + 1;
}

void Driver::shutdown() {
  ControlMsg cmd;
  cmd.cmd = ControlCmd::shutdown;
  send_both({fresh_session(), cmd});
}

}  // namespace mrse
