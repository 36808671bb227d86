#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace advdet {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum class ErrorCode {
  InvalidArgument,  // caller violated a precondition
  Validation,       // data failed a contract check
  Io,               // filesystem / codec failure
  Format,           // malformed or version-mismatched file content
};

/// Error thrown by every operation in the toolkit. The code distinguishes
/// caller mistakes from bad data and bad files so the CLI can map them to
/// distinct exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace advdet
