#pragma once

#include <stdexcept>
#include <string>

namespace epg {

// Failure categories surfaced by the library.  The CLI maps these onto
// process exit codes, so the distinction between "your input is malformed"
// (InvalidInput), "the map is not of the supported dynamical type"
// (NotEndperiodic / NotGeneralizedEndperiodic), "an iteration budget ran out"
// (CapExceeded) and "a certificate check failed" (VerificationFailed) is part
// of the public contract.
enum class ErrorKind {
  InvalidInput,
  NotEndperiodic,
  NotGeneralizedEndperiodic,
  CapExceeded,
  VerificationFailed,
  Unsupported,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::NotEndperiodic: return "not endperiodic";
    case ErrorKind::NotGeneralizedEndperiodic: return "not generalized endperiodic";
    case ErrorKind::CapExceeded: return "cap exceeded";
    case ErrorKind::VerificationFailed: return "verification failed";
    case ErrorKind::Unsupported: return "unsupported configuration";
    case ErrorKind::Internal: return "internal error";
  }
  return "unknown error";
}

}  // namespace epg
