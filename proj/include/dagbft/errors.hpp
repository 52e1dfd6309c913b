#pragma once

#include <stdexcept>
#include <string>

namespace dagbft {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Byte stream could not be decoded (truncated, bad tag, bad version).
class DecodeError : public Error {
 public:
  using Error::Error;
};

// verify()/sign() was asked about a server the key registry does not know.
class UnknownServerError : public Error {
 public:
  using Error::Error;
};

// A block violates the structural rules (e.g. lists two parents).
class MalformedBlockError : public Error {
 public:
  using Error::Error;
};

// A BlockRef that is not part of the dag was passed to a graph query.
class UnknownBlockError : public Error {
 public:
  using Error::Error;
};

// insert() precondition failed; the message names the failed precondition.
class InsertError : public Error {
 public:
  using Error::Error;
};

// A protocol instance rejected an input (e.g. undecodable request).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Caller broke an API contract (wrong receiver, uninterpreted block, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Scenario / CLI configuration is inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dagbft
