#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hppc {

// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  const std::vector<double>& data() const { return data_; }

  std::vector<double> multiply(std::span<const double> x) const;
  // this^T * y
  std::vector<double> transpose_multiply(std::span<const double> y) const;
  DenseMatrix select_columns(std::span<const std::size_t> columns) const;
  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// minimise ||z - H x||_2
struct LsProblem {
  DenseMatrix h;
  std::vector<double> z;

  // m >= n >= 1, len(z) == m, finite entries. Throws ValidationError.
  void validate() const;
};

double norm2(std::span<const double> v);
double norm_inf(std::span<const double> v);
std::vector<double> residual(const LsProblem& problem, std::span<const double> x);

// Unconstrained least squares by Householder QR. Throws RankError when the
// columns are numerically dependent.
std::vector<double> solve_least_squares(const LsProblem& problem);

struct NnlsOptions {
  std::optional<double> tol;             // default: default_nnls_tolerance
  std::optional<std::size_t> max_iter;   // default: 3n
};

struct NnlsSolution {
  std::vector<double> x;
  double residual_norm = 0.0;
  std::vector<std::size_t> active_set;  // indices with x_j == 0
  std::vector<double> dual;             // w = H^T (z - H x)
  std::size_t iterations = 0;
};

// 10 * machine epsilon * max(m, n) * ||H^T z||_inf.
double default_nnls_tolerance(const LsProblem& problem);

// Lawson-Hanson active-set solver for min ||z - H x||_2 subject to x >= 0.
// Throws ConvergenceError (carrying the current iterate) when more than
// max_iter variables are freed.
NnlsSolution solve_nnls(const LsProblem& problem, const NnlsOptions& options = {});

struct KktReport {
  bool ok = true;
  double max_violation = 0.0;
  std::string message;
};

// Recomputes the dual and checks x >= 0, w_j <= tol where x_j == 0 and
// |w_j| <= tol where x_j > 0.
KktReport kkt_check(const LsProblem& problem, const NnlsSolution& solution, double tol);

}  // namespace hppc
