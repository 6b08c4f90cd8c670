// SPDX-License-Identifier: Apache-2.0
#include "mrse/wire.hpp"

namespace mrse::wire {

void put_u8(Bytes& out, uint8_t v) { out.push_back(v); }

void put_u16(Bytes& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void put_u32(Bytes& out, uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(v >> s));
}

void put_u64(Bytes& out, uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<uint8_t>(v >> s));
}

void put_mpz(Bytes& out, const Mpz& x, size_t width) {
  if (x < 0) throw WireError("cannot encode negative magnitude");
  if (bit_length(x) > 8 * width) {
    throw WireError("value does not fit its fixed field width");
  }
  size_t start = out.size();
  out.resize(start + width, 0);
  if (x != 0) {
    size_t count = (bit_length(x) + 7) / 8;
    mpz_export(out.data() + start + (width - count), &count, 1, 1, 0, 0,
               x.get_mpz_t());
  }
}

uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

uint16_t ByteReader::u16() {
  need(2);
  uint16_t v = static_cast<uint16_t>((uint16_t(data_[pos_]) << 8) |
                                     data_[pos_ + 1]);
  pos_ += 2;
  return v;
}

uint32_t ByteReader::u32() {
  need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
  pos_ += 4;
  return v;
}

uint64_t ByteReader::u64() {
  need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_ + i];
  pos_ += 8;
  return v;
}

Mpz ByteReader::mpz(size_t width) {
  need(width);
  Mpz x;
  if (width > 0) {
    mpz_import(x.get_mpz_t(), width, 1, 1, 0, 0, data_.data() + pos_);
  }
  pos_ += width;
  return x;
}

std::string ByteReader::str(size_t len) {
  need(len);
  std::string s(data_.begin() + pos_, data_.begin() + pos_ + len);
  pos_ += len;
  return s;
}

void ByteReader::expect_end() const {
  if (pos_ != data_.size()) throw WireError("trailing bytes in payload");
}

void ByteReader::need(size_t n) const {
  if (pos_ + n > data_.size()) throw WireError("payload truncated");
}

// Modular-context values occupy exactly the modulus width; integer
// shares are width-prefixed sign-magnitude.
void put_share(Bytes& out, const Share& s) {
  out.push_back(static_cast<uint8_t>(s.role));
  out.push_back(static_cast<uint8_t>(s.ctx.domain));
  size_t mod_w = (bit_length(s.ctx.modulus) + 7) / 8;
  put_u32(out, static_cast<uint32_t>(mod_w));
  put_mpz(out, s.ctx.modulus, mod_w);
  if (s.ctx.domain == ShareDomain::integers) {
    Mpz mag = abs(s.value);
    size_t val_w = (bit_length(mag) + 7) / 8;
    put_u32(out, static_cast<uint32_t>(val_w));
    put_mpz(out, mag, val_w);
    out.push_back(s.value < 0 ? 1 : 0);
  } else {
    put_mpz(out, s.value, mod_w);
  }
}

Share get_share(ByteReader& r) {
  Share s;
  uint8_t role = r.u8();
  if (role > 1) throw WireError("share role must be 0 or 1");
  s.role = role;
  uint8_t dom = r.u8();
  if (dom > 2) throw WireError("unknown share context tag");
  s.ctx.domain = static_cast<ShareDomain>(dom);
  size_t mod_w = r.u32();
  s.ctx.modulus = r.mpz(mod_w);
  if (s.ctx.domain == ShareDomain::integers) {
    size_t val_w = r.u32();
    s.value = r.mpz(val_w);
    if (r.u8() != 0) s.value = -s.value;
  } else {
    s.value = r.mpz(mod_w);
    if (s.ctx.modulus <= 0 || s.value >= s.ctx.modulus) {
      throw WireError("share value out of modular range");
    }
  }
  return s;
}

MsgType ProtocolMessage::type() const {
  struct Visitor {
    MsgType operator()(const UploadCtMsg&) { return MsgType::upload_ct; }
    MsgType operator()(const UploadShareMsg&) { return MsgType::upload_share; }
    MsgType operator()(const AssistedInitMsg&) {
      return MsgType::assisted_init;
    }
    MsgType operator()(const ScmpRound1Msg&) { return MsgType::scmp_round1; }
    MsgType operator()(const ScmpRound2Msg&) { return MsgType::scmp_round2; }
    MsgType operator()(const S2cShareCtMsg&) { return MsgType::s2c_share_ct; }
    MsgType operator()(const C2sCtMsg&) { return MsgType::c2s_ct; }
    MsgType operator()(const ResultShareMsg&) { return MsgType::result_share; }
    MsgType operator()(const ResultCtMsg&) { return MsgType::result_ct; }
    MsgType operator()(const ControlMsg&) { return MsgType::control; }
  };
  return std::visit(Visitor{}, body);
}

Codec::Codec(const Mpz& N)
    : n_(N), n_sq_(N * N), width_((bit_length(N) + 7) / 8) {}

Bytes Codec::encode(const ProtocolMessage& msg) const {
  Bytes payload;
  const size_t w = width_;
  const size_t w2 = 2 * width_;

  auto put_ct = [&](const Ciphertext& ct) {
    if (ct.n != n_) throw WireError("ciphertext modulus mismatch with codec");
    put_mpz(payload, ct.value, w2);
  };

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, UploadCtMsg>) {
          put_ct(m.ct);
        } else if constexpr (std::is_same_v<T, UploadShareMsg>) {
          put_share(payload, m.share);
        } else if constexpr (std::is_same_v<T, AssistedInitMsg>) {
          put_share(payload, m.tuple.two_alpha_share);
          put_ct(m.tuple.ct_two_alpha_inv);
          put_ct(m.tuple.ct_zero);
          put_ct(m.tuple.ct_one);
        } else if constexpr (std::is_same_v<T, ScmpRound1Msg>) {
          put_ct(m.d_ct);
          if (m.z0_masked < 0 || m.z0_masked >= n_) {
            throw WireError("masked share out of range [0, N)");
          }
          put_mpz(payload, m.z0_masked, w);
        } else if constexpr (std::is_same_v<T, ScmpRound2Msg>) {
          put_ct(m.ct_mu0);
        } else if constexpr (std::is_same_v<T, S2cShareCtMsg>) {
          put_ct(m.ct);
        } else if constexpr (std::is_same_v<T, C2sCtMsg>) {
          put_ct(m.ct);
        } else if constexpr (std::is_same_v<T, ResultShareMsg>) {
          put_share(payload, m.share);
        } else if constexpr (std::is_same_v<T, ResultCtMsg>) {
          put_ct(m.ct);
        } else if constexpr (std::is_same_v<T, ControlMsg>) {
          payload.push_back(static_cast<uint8_t>(m.cmd));
          switch (m.cmd) {
            case ControlCmd::hello:
              payload.push_back(m.role_or_op);
              break;
            case ControlCmd::shutdown:
            case ControlCmd::meter_query:
              break;
            case ControlCmd::run_op:
              payload.push_back(m.role_or_op);
              put_u64(payload, m.x_id);
              put_u64(payload, m.y_id);
              break;
            case ControlCmd::meter_report:
              for (uint64_t v : m.meter) put_u64(payload, v);
              break;
            case ControlCmd::error_report:
              put_u16(payload, static_cast<uint16_t>(m.text.size()));
              payload.insert(payload.end(), m.text.begin(), m.text.end());
              break;
          }
        }
      },
      msg.body);

  Bytes frame;
  frame.reserve(kHeaderSize + payload.size());
  frame.insert(frame.end(), kMagic.begin(), kMagic.end());
  frame.push_back(kVersion);
  frame.push_back(static_cast<uint8_t>(msg.type()));
  put_u64(frame, msg.session_id);
  put_u32(frame, static_cast<uint32_t>(payload.size()));
  frame.insert(frame.end(), payload.begin(), payload.end());
  return frame;
}

ProtocolMessage Codec::decode(const Bytes& frame) const {
  if (frame.size() < kHeaderSize) throw WireError("frame shorter than header");
  for (size_t i = 0; i < kMagic.size(); ++i) {
    if (frame[i] != kMagic[i]) throw WireError("bad magic");
  }
  if (frame[4] != kVersion) throw WireError("unknown version");
  uint8_t type = frame[5];
  uint64_t session_id = 0;
  for (int i = 0; i < 8; ++i) session_id = (session_id << 8) | frame[6 + i];
  uint32_t plen = 0;
  for (int i = 0; i < 4; ++i) plen = (plen << 8) | frame[14 + i];
  if (frame.size() != kHeaderSize + plen) {
    throw WireError("frame length mismatch");
  }

  Bytes payload(frame.begin() + kHeaderSize, frame.end());
  ByteReader r(payload);
  const size_t w = width_;
  const size_t w2 = 2 * width_;

  auto get_ct = [&]() {
    Mpz v = r.mpz(w2);
    if (v <= 0 || v >= n_sq_) {
      throw WireError("ciphertext out of range (0, N^2)");
    }
    return Ciphertext{v, n_};
  };
  auto get_zn = [&]() {
    Mpz v = r.mpz(w);
    if (v >= n_) throw WireError("value out of range [0, N)");
    return v;
  };

  ProtocolMessage msg;
  msg.session_id = session_id;
  switch (static_cast<MsgType>(type)) {
    case MsgType::upload_ct:
      msg.body = UploadCtMsg{get_ct()};
      break;
    case MsgType::upload_share:
      msg.body = UploadShareMsg{get_share(r)};
      break;
    case MsgType::assisted_init: {
      AssistedInitMsg m{AssistedTuple{get_share(r), get_ct(), get_ct(),
                                      get_ct()}};
      msg.body = std::move(m);
      break;
    }
    case MsgType::scmp_round1: {
      ScmpRound1Msg m;
      m.d_ct = get_ct();
      m.z0_masked = get_zn();
      msg.body = std::move(m);
      break;
    }
    case MsgType::scmp_round2:
      msg.body = ScmpRound2Msg{get_ct()};
      break;
    case MsgType::s2c_share_ct:
      msg.body = S2cShareCtMsg{get_ct()};
      break;
    case MsgType::c2s_ct:
      msg.body = C2sCtMsg{get_ct()};
      break;
    case MsgType::result_share:
      msg.body = ResultShareMsg{get_share(r)};
      break;
    case MsgType::result_ct:
      msg.body = ResultCtMsg{get_ct()};
      break;
    case MsgType::control: {
      ControlMsg m;
      uint8_t cmd = r.u8();
      if (cmd < 1 || cmd > 6) throw WireError("unknown control command");
      m.cmd = static_cast<ControlCmd>(cmd);
      switch (m.cmd) {
        case ControlCmd::hello:
          m.role_or_op = r.u8();
          break;
        case ControlCmd::shutdown:
        case ControlCmd::meter_query:
          break;
        case ControlCmd::run_op:
          m.role_or_op = r.u8();
          m.x_id = r.u64();
          m.y_id = r.u64();
          break;
        case ControlCmd::meter_report:
          for (auto& v : m.meter) v = r.u64();
          break;
        case ControlCmd::error_report:
          m.text = r.str(r.u16());
          break;
      }
      msg.body = std::move(m);
      break;
    }
    default:
      throw WireError("unknown message type");
  }
  r.expect_end();
  return msg;
}

size_t Codec::payload_length(const Bytes& frame) {
  if (frame.size() < kHeaderSize) throw WireError("frame shorter than header");
  uint32_t plen = 0;
  for (int i = 0; i < 4; ++i) plen = (plen << 8) | frame[14 + i];
  return plen;
}

MsgType frame_type(const Bytes& frame) {
  if (frame.size() < kHeaderSize) throw WireError("frame shorter than header");
  uint8_t t = frame[5];
  if (t < 0x01 || t > 0x0A) throw WireError("unknown message type");
  return static_cast<MsgType>(t);
}

}  // namespace mrse::wire
