// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mrse/protocols.hpp"

namespace mrse::wire {

using Bytes = std::vector<uint8_t>;

// Frame layout: "MRSE" | version | msg_type | session_id (8, BE) |
// payload length (4, BE) | payload. Field widths inside payloads are
// fixed by the modulus: Z_N values take ceil(|N|/8) bytes, Z_{N^2}
// values twice that, so metered payload sizes are a function of |N|
// alone. Shares are self-describing (role, context tag, width-prefixed
// modulus and magnitude, sign byte in the integer context).
inline constexpr std::array<uint8_t, 4> kMagic = {'M', 'R', 'S', 'E'};
inline constexpr uint8_t kVersion = 1;

enum class MsgType : uint8_t {
  upload_ct = 0x01,
  upload_share = 0x02,
  assisted_init = 0x03,
  scmp_round1 = 0x04,
  scmp_round2 = 0x05,
  s2c_share_ct = 0x06,
  c2s_ct = 0x07,
  result_share = 0x08,
  result_ct = 0x09,
  control = 0x0A,
};

enum class ControlCmd : uint8_t {
  hello = 0x01,
  shutdown = 0x02,
  run_op = 0x03,
  meter_query = 0x04,
  meter_report = 0x05,
  error_report = 0x06,
};

enum class OpCode : uint8_t {
  smul = 0x01,
  scmp = 0x02,
  s2c = 0x03,
  c2s = 0x04,
  poly_s2c = 0x05,
  poly_theta = 0x06,
};

struct UploadCtMsg {
  Ciphertext ct;
};
struct UploadShareMsg {
  Share share;
};
struct AssistedInitMsg {
  AssistedTuple tuple;
};
struct ScmpRound1Msg {
  Ciphertext d_ct;
  Mpz z0_masked;
};
struct ScmpRound2Msg {
  Ciphertext ct_mu0;
};
struct S2cShareCtMsg {
  Ciphertext ct;
};
struct C2sCtMsg {
  Ciphertext ct;
};
struct ResultShareMsg {
  Share share;
};
struct ResultCtMsg {
  Ciphertext ct;
};
struct ControlMsg {
  ControlCmd cmd = ControlCmd::hello;
  uint8_t role_or_op = 0;                  // hello: sender role; run_op: OpCode
  uint64_t x_id = 0;                       // run_op operand references
  uint64_t y_id = 0;
  std::array<uint64_t, 4> meter = {0, 0, 0, 0};  // meter_report
  std::string text;                        // error_report
};

using MessageBody =
    std::variant<UploadCtMsg, UploadShareMsg, AssistedInitMsg, ScmpRound1Msg,
                 ScmpRound2Msg, S2cShareCtMsg, C2sCtMsg, ResultShareMsg,
                 ResultCtMsg, ControlMsg>;

struct ProtocolMessage {
  uint64_t session_id = 0;
  MessageBody body;

  MsgType type() const;
};

/// Field-width context for the fixed-width payload encodings.
class Codec {
 public:
  explicit Codec(const Mpz& N);

  /// Full frame bytes, header included.
  Bytes encode(const ProtocolMessage& msg) const;

  /// Parses a complete frame. WireError on bad magic, unknown version or
  /// type, length mismatch, out-of-range values, or trailing bytes.
  ProtocolMessage decode(const Bytes& frame) const;

  /// Payload length in bytes for a frame already on the wire.
  static size_t payload_length(const Bytes& frame);

  size_t zn_width() const { return width_; }
  size_t zn2_width() const { return 2 * width_; }
  const Mpz& modulus() const { return n_; }

 private:
  Mpz n_;
  Mpz n_sq_;
  size_t width_;
};

/// Number of bytes a frame header occupies (magic through length field).
inline constexpr size_t kHeaderSize = 4 + 1 + 1 + 8 + 4;

/// Message type of an encoded frame without a full decode.
MsgType frame_type(const Bytes& frame);

// Byte-level primitives shared by the codec and the keystore files.
void put_u8(Bytes& out, uint8_t v);
void put_u16(Bytes& out, uint16_t v);
void put_u32(Bytes& out, uint32_t v);
void put_u64(Bytes& out, uint64_t v);
/// Big-endian magnitude in exactly `width` bytes; WireError if it
/// does not fit or is negative.
void put_mpz(Bytes& out, const Mpz& x, size_t width);
void put_share(Bytes& out, const Share& s);

/// Bounds-checked sequential reader; WireError on overrun.
class ByteReader {
 public:
  explicit ByteReader(const Bytes& data) : data_(data) {}
  uint8_t u8();
  uint16_t u16();
  uint32_t u32();
  uint64_t u64();
  Mpz mpz(size_t width);
  std::string str(size_t len);
  size_t remaining() const { return data_.size() - pos_; }
  void expect_end() const;

 private:
  void need(size_t n) const;
  const Bytes& data_;
  size_t pos_ = 0;
};

Share get_share(ByteReader& r);

}  // namespace mrse::wire
