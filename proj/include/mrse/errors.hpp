// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace mrse {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Parameter or key generation failure (attempt bound exhausted,
/// invariant violated, unsupported security level).
class ParamError : public Error {
 public:
  using Error::Error;
};

/// A value fell outside its declared domain (plaintext out of range,
/// signed decode overflow, exponent beyond table coverage, theta >= N).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Arithmetic objects from incompatible contexts were mixed
/// (ciphertexts under different moduli, shares in different contexts).
class ContextError : public Error {
 public:
  using Error::Error;
};

/// A number-theoretic step failed (non-invertible element, L-step
/// non-integral on a foreign ciphertext).
class MathError : public Error {
 public:
  using Error::Error;
};

/// Data-owner recovery could not produce a valid result.
class RecoveryError : public Error {
 public:
  using Error::Error;
};

/// Malformed bytes on the wire: bad magic, unknown version, length
/// mismatch, trailing data.
class WireError : public Error {
 public:
  using Error::Error;
};

/// File read/write failure.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Socket-level failure (bind, connect, broken link).
class TransportError : public Error {
 public:
  using Error::Error;
};

/// A protocol message arrived out of order, referenced an unknown
/// session, or violated a role contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace mrse
