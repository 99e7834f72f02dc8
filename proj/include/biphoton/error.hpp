#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

/// Failure classes shared by every module. The C API maps these one-to-one
/// onto its status codes.
enum class ErrorCode {
  parameter,        // a spec or input value is out of its valid range
  domain_mismatch,  // time-domain op handed frequency data, mismatched grids, ...
  zero_norm,        // an amplitude or denominator that must be nonzero was zero
  numerical,        // decomposition failed or produced non-finite values
  not_converged,    // iterative procedure hit its iteration bound
  undefined,        // quantity is mathematically undefined for this input
  precondition,     // input data does not meet an operation's requirements
  io,
  parse,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace biphoton
