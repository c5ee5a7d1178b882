#pragma once

#include <stdexcept>
#include <string>

namespace bala {

enum class ErrorCode {
  dimension_mismatch,
  invalid_argument,
  malformed_file,
  schema_error,
  version_mismatch,
  dimension_inconsistent,
  unsupported_format,
  solver_failure,
  invariant_violation,
  io_failure,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bala
