#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hppc {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// OCV evaluated at a pole of the Combined+3 model (scaled SOC of 0 or 1).
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

// SOC left [0, 1] during simulation.
class DepletionError : public Error {
 public:
  DepletionError(const std::string& what, double time_s)
      : Error(what), time_s_(time_s) {}
  double time_s() const noexcept { return time_s_; }

 private:
  double time_s_;
};

// Least-squares system whose columns are not linearly independent.
class RankError : public Error {
 public:
  RankError(const std::string& what, std::size_t columns)
      : Error(what), columns_(columns) {}
  std::size_t columns() const noexcept { return columns_; }

 private:
  std::size_t columns_;
};

// Iterative solver ran out of iterations; carries the best iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best)
      : Error(what), best_(std::move(best)) {}
  const std::vector<double>& best_iterate() const noexcept { return best_; }

 private:
  std::vector<double> best_;
};

// Data violates a structural constraint (non-constant pulse current, bad
// index range, too few samples).
class ConstraintError : public Error {
 public:
  using Error::Error;
};

// Configuration or input file failed validation. `path` names the offending
// field ("ocv.u3") or file location ("line 12").
class ValidationError : public Error {
 public:
  ValidationError(const std::string& path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hppc
