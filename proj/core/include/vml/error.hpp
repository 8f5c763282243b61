#pragma once

#include <stdexcept>
#include <string>

namespace vml {

// Failure categories surfaced by the library. Callers decide which are
// recoverable: parse failures usually are, backend outages usually are not.
enum class ErrorCode {
  invalid_argument,
  ingestion_error,
  backend_unavailable,
  script_exhausted,
  script_mismatch,
  oracle_cannot_interpret,
  learner_parse_failure,
  optimizer_parse_failure,
  ensemble_failure,
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::ingestion_error: return "ingestion_error";
    case ErrorCode::backend_unavailable: return "backend_unavailable";
    case ErrorCode::script_exhausted: return "script_exhausted";
    case ErrorCode::script_mismatch: return "script_mismatch";
    case ErrorCode::oracle_cannot_interpret: return "oracle_cannot_interpret";
    case ErrorCode::learner_parse_failure: return "learner_parse_failure";
    case ErrorCode::optimizer_parse_failure: return "optimizer_parse_failure";
    case ErrorCode::ensemble_failure: return "ensemble_failure";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

}  // namespace vml
