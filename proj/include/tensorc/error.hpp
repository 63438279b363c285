#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tensorc {

/// Failure categories. The CLI prints them as `error[<category>]: ...`.
enum class ErrorCode {
  Parse,
  Symbol,
  Index,
  Rule,
  NonConvergence,
  Component,
  Kernel,
  Grid,
  Numeric,
  Param,
  Io,
  Usage,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tensorc
