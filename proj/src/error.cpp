#include "tensorc/error.hpp"

namespace tensorc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Symbol: return "symbol";
    case ErrorCode::Index: return "index";
    case ErrorCode::Rule: return "rule";
    case ErrorCode::NonConvergence: return "nonconvergence";
    case ErrorCode::Component: return "component";
    case ErrorCode::Kernel: return "kernel";
    case ErrorCode::Grid: return "grid";
    case ErrorCode::Numeric: return "numeric";
    case ErrorCode::Param: return "param";
    case ErrorCode::Io: return "io";
    case ErrorCode::Usage: return "usage";
  }
  return "unknown";
}

}  // namespace tensorc
