#pragma once

#include <stdexcept>
#include <string>

namespace satf {

// Values mirror satf_status in satf.h.
enum class ErrorCode : int {
  ok = 0,
  invalid_argument = 1,
  invalid_dimension = 2,
  dimension_mismatch = 3,
  parse_error = 4,
  size_cap = 5,
  non_satisfying_solution = 6,
  duplicate_solution = 7,
  domain_error = 8,
  io_error = 9,
  process_failure = 10,
  validation_failure = 11,
  insufficient_solutions = 12,
  schedule_mismatch = 13,
  empty_grid = 14,
  missing_oracle = 15,
  internal = 99,
};

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

}  // namespace satf
