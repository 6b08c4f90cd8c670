// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <vector>

#include "mrse/protocols.hpp"
#include "mrse/wire.hpp"

namespace mrse {

// Keystore files share the wire serialization: a "MRSE" magic, a format
// version, a file-type byte, then fixed-width big-endian fields (Z_N
// values in ceil(|N|/8) bytes, Z_{N^2} values in twice that). The
// private-key file is written separately from the server-distributable
// files so it can be withheld from the servers.

void save_public_key(const std::filesystem::path& file, const PublicKey& pk);
PublicKey load_public_key(const std::filesystem::path& file);

void save_private_key(const std::filesystem::path& file, const PrivateKey& sk,
                      const ParamSet& pset);
struct PrivateKeyFile {
  PrivateKey sk;
  ParamSet pset;
};
PrivateKeyFile load_private_key(const std::filesystem::path& file);

void save_assisted_tuple(const std::filesystem::path& file,
                         const AssistedTuple& tuple, const PublicKey& pk);
AssistedTuple load_assisted_tuple(const std::filesystem::path& file);

struct StoredUpload {
  uint64_t id = 0;
  Mpz x;  // kept DO-side for correctness checks
  UploadRecord for_s0;
  UploadRecord for_s1;
};

void save_uploads(const std::filesystem::path& file,
                  const std::vector<StoredUpload>& uploads,
                  const PublicKey& pk);
std::vector<StoredUpload> load_uploads(const std::filesystem::path& file,
                                       const PublicKey& pk);

/// Conventional file names inside a keystore directory.
struct StoreLayout {
  std::filesystem::path dir;
  std::filesystem::path public_key() const { return dir / "pk.mrse"; }
  std::filesystem::path private_key() const { return dir / "sk.mrse"; }
  std::filesystem::path assisted(int role) const {
    return dir / (role == 0 ? "assisted_s0.mrse" : "assisted_s1.mrse");
  }
  std::filesystem::path uploads() const { return dir / "uploads.mrse"; }
};

/// Loads pk + sk and reassembles the key pair.
KeyPair load_keypair(const StoreLayout& store);

}  // namespace mrse
