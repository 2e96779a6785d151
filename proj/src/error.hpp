#pragma once

#include <stdexcept>
#include <string>

namespace driftwatch {

enum class ErrorCode {
  InvalidInput,
  NotPositiveDefinite,
  State,
  Parse,
  Io,
  Validation,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

[[noreturn]] inline void fail_invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidInput, what);
}

}  // namespace driftwatch
