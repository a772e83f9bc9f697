// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef NCFACT_ERRORS_HPP
#define NCFACT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ncfact {

/// Error categories; values double as process exit codes in the CLI.
enum class ErrorCode : int {
  internal = 1,
  input = 2,
  verify = 3,
  convergence = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct InputError : Error {
  explicit InputError(const std::string& what) : Error(ErrorCode::input, what) {}
};

struct VerifyError : Error {
  explicit VerifyError(const std::string& what) : Error(ErrorCode::verify, what) {}
};

struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& what)
      : Error(ErrorCode::convergence, what) {}
};

}  // namespace ncfact

#endif  // NCFACT_ERRORS_HPP
