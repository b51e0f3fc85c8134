#pragma once

#include <stdexcept>
#include <string>

namespace axbq {

// Numeric values are part of the C API (see include/axbq/axbq.h).
enum class ErrorCode : int {
  ok = 0,
  invalid_argument = 1,
  invalid_dimension = 2,
  parity_mismatch = 3,
  solver_nonconvergence = 4,
  grid_too_coarse = 5,
  near_one_branch = 6,
  wrong_branch = 7,
  blow_up = 8,
  missing_series = 9,
  config_mismatch = 10,
  parse_error = 11,
  validation_error = 12,
  io_error = 13,
  missing_run = 14,
  check_failed = 15,
  internal = 99,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(ErrorCode::solver_nonconvergence, what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double t, std::string last_checkpoint = {})
      : Error(ErrorCode::blow_up, what), t_(t), last_checkpoint_(std::move(last_checkpoint)) {}
  double time() const noexcept { return t_; }
  const std::string& last_checkpoint() const noexcept { return last_checkpoint_; }
  void set_last_checkpoint(std::string path) { last_checkpoint_ = std::move(path); }

 private:
  double t_;
  std::string last_checkpoint_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(ErrorCode::parse_error,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace axbq
