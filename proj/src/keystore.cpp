// SPDX-License-Identifier: Apache-2.0
#include "mrse/keystore.hpp"

#include <fstream>

namespace mrse {

using namespace wire;

namespace {

constexpr uint8_t kFilePublicKey = 0x11;
constexpr uint8_t kFilePrivateKey = 0x12;
constexpr uint8_t kFileAssisted = 0x13;
constexpr uint8_t kFileUploads = 0x14;

void write_file(const std::filesystem::path& file, const Bytes& data) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + file.string());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed: " + file.string());
}

Bytes read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open for reading: " + file.string());
  auto size = in.tellg();
  in.seekg(0);
  Bytes data(static_cast<size_t>(size));
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(size));
  if (!in) throw IoError("read failed: " + file.string());
  return data;
}

void put_header(Bytes& out, uint8_t file_type) {
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  out.push_back(kVersion);
  out.push_back(file_type);
}

ByteReader open_body(const Bytes& data, uint8_t expected_type) {
  ByteReader r(data);
  for (uint8_t m : kMagic) {
    if (r.u8() != m) throw WireError("bad magic in keystore file");
  }
  if (r.u8() != kVersion) throw WireError("unknown keystore version");
  if (r.u8() != expected_type) throw WireError("unexpected keystore file type");
  return r;
}

void put_params(Bytes& out, const SecurityParams& sp) {
  put_u32(out, static_cast<uint32_t>(sp.kappa));
  put_u32(out, static_cast<uint32_t>(sp.n_bits));
  put_u32(out, static_cast<uint32_t>(sp.l_sk_bits));
  put_u32(out, static_cast<uint32_t>(sp.sigma));
  put_u32(out, static_cast<uint32_t>(sp.data_bits));
  put_u8(out, sp.toy ? 1 : 0);
}

SecurityParams get_params(ByteReader& r) {
  SecurityParams sp;
  sp.kappa = r.u32();
  sp.n_bits = r.u32();
  sp.l_sk_bits = r.u32();
  sp.sigma = r.u32();
  sp.data_bits = r.u32();
  sp.toy = r.u8() != 0;
  return sp;
}

size_t zn_width(const SecurityParams& sp) { return (sp.n_bits + 7) / 8; }

// Width-prefixed magnitude for auxiliary fields.
void put_var_mpz(Bytes& out, const Mpz& x) {
  size_t w = (bit_length(x) + 7) / 8;
  put_u32(out, static_cast<uint32_t>(w));
  put_mpz(out, x, w);
}

Mpz get_var_mpz(ByteReader& r) { return r.mpz(r.u32()); }

void put_ct(Bytes& out, const Ciphertext& ct, size_t w) {
  put_mpz(out, ct.value, 2 * w);
}

Ciphertext get_ct(ByteReader& r, const Mpz& n, size_t w) {
  Mpz v = r.mpz(2 * w);
  if (v <= 0 || v >= n * n) throw WireError("stored ciphertext out of range");
  return Ciphertext{v, n};
}

}  // namespace

void save_public_key(const std::filesystem::path& file, const PublicKey& pk) {
  Bytes out;
  put_header(out, kFilePublicKey);
  put_params(out, pk.params);
  size_t w = zn_width(pk.params);
  put_mpz(out, pk.N, w);
  put_mpz(out, pk.h, w);
  write_file(file, out);
}

PublicKey load_public_key(const std::filesystem::path& file) {
  Bytes data = read_file(file);
  ByteReader r = open_body(data, kFilePublicKey);
  PublicKey pk;
  pk.params = get_params(r);
  size_t w = zn_width(pk.params);
  pk.N = r.mpz(w);
  pk.h = r.mpz(w);
  pk.N_sq = pk.N * pk.N;
  r.expect_end();
  if (pk.h <= 1 || pk.h >= pk.N) throw WireError("stored h out of range");
  return pk;
}

void save_private_key(const std::filesystem::path& file, const PrivateKey& sk,
                      const ParamSet& pset) {
  Bytes out;
  put_header(out, kFilePrivateKey);
  put_params(out, sk.params);
  size_t w = zn_width(sk.params);
  put_mpz(out, sk.N, w);
  put_mpz(out, sk.alpha, w);
  put_mpz(out, sk.two_alpha, w);
  put_mpz(out, sk.two_alpha_inv, w);
  put_var_mpz(out, pset.P);
  put_var_mpz(out, pset.Q);
  put_var_mpz(out, pset.p);
  put_var_mpz(out, pset.q);
  write_file(file, out);
}

PrivateKeyFile load_private_key(const std::filesystem::path& file) {
  Bytes data = read_file(file);
  ByteReader r = open_body(data, kFilePrivateKey);
  PrivateKeyFile out;
  out.sk.params = get_params(r);
  size_t w = zn_width(out.sk.params);
  out.sk.N = r.mpz(w);
  out.sk.alpha = r.mpz(w);
  out.sk.two_alpha = r.mpz(w);
  out.sk.two_alpha_inv = r.mpz(w);
  out.pset.P = get_var_mpz(r);
  out.pset.Q = get_var_mpz(r);
  out.pset.p = get_var_mpz(r);
  out.pset.q = get_var_mpz(r);
  out.pset.N = out.sk.N;
  r.expect_end();
  if (mod(out.sk.two_alpha * out.sk.two_alpha_inv, out.sk.N) != 1) {
    throw WireError("stored private key is inconsistent");
  }
  return out;
}

void save_assisted_tuple(const std::filesystem::path& file,
                         const AssistedTuple& tuple, const PublicKey& pk) {
  Bytes out;
  put_header(out, kFileAssisted);
  put_params(out, pk.params);
  size_t w = zn_width(pk.params);
  put_mpz(out, pk.N, w);
  put_share(out, tuple.two_alpha_share);
  put_ct(out, tuple.ct_two_alpha_inv, w);
  put_ct(out, tuple.ct_zero, w);
  put_ct(out, tuple.ct_one, w);
  write_file(file, out);
}

AssistedTuple load_assisted_tuple(const std::filesystem::path& file) {
  Bytes data = read_file(file);
  ByteReader r = open_body(data, kFileAssisted);
  SecurityParams sp = get_params(r);
  size_t w = zn_width(sp);
  Mpz n = r.mpz(w);
  AssistedTuple t{get_share(r), get_ct(r, n, w), get_ct(r, n, w),
                  get_ct(r, n, w)};
  r.expect_end();
  return t;
}

void save_uploads(const std::filesystem::path& file,
                  const std::vector<StoredUpload>& uploads,
                  const PublicKey& pk) {
  Bytes out;
  put_header(out, kFileUploads);
  put_params(out, pk.params);
  size_t w = zn_width(pk.params);
  put_mpz(out, pk.N, w);
  put_u32(out, static_cast<uint32_t>(uploads.size()));
  for (const StoredUpload& u : uploads) {
    put_u64(out, u.id);
    put_u8(out, u.x < 0 ? 1 : 0);
    put_var_mpz(out, abs(u.x));
    put_ct(out, u.for_s0.ct, w);
    put_share(out, u.for_s0.share_2ax);
    put_ct(out, u.for_s1.ct, w);
    put_share(out, u.for_s1.share_2ax);
  }
  write_file(file, out);
}

std::vector<StoredUpload> load_uploads(const std::filesystem::path& file,
                                       const PublicKey& pk) {
  Bytes data = read_file(file);
  ByteReader r = open_body(data, kFileUploads);
  SecurityParams sp = get_params(r);
  size_t w = zn_width(sp);
  Mpz n = r.mpz(w);
  if (n != pk.N) throw WireError("upload store belongs to a different key");
  uint32_t count = r.u32();
  std::vector<StoredUpload> out;
  out.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    StoredUpload u;
    u.id = r.u64();
    bool neg = r.u8() != 0;
    u.x = get_var_mpz(r);
    if (neg) u.x = -u.x;
    u.for_s0.ct = get_ct(r, n, w);
    u.for_s0.share_2ax = get_share(r);
    u.for_s1.ct = get_ct(r, n, w);
    u.for_s1.share_2ax = get_share(r);
    out.push_back(std::move(u));
  }
  r.expect_end();
  return out;
}

KeyPair load_keypair(const StoreLayout& store) {
  KeyPair kp;
  kp.pk = load_public_key(store.public_key());
  PrivateKeyFile skf = load_private_key(store.private_key());
  kp.sk = skf.sk;
  kp.pset = skf.pset;
  if (kp.sk.N != kp.pk.N) {
    throw WireError("public and private key files do not match");
  }
  return kp;
}

}  // namespace mrse
