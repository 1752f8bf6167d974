#include "hppc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hppc/error.hpp"

namespace hppc {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows_ * cols_)
    throw ValidationError("matrix", "entry count does not match rows * cols");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t k = 0; k < n; ++k) m(k, k) = 1.0;
  return m;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> out(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) acc += (*this)(r, c) * x[c];
    out[r] = acc;
  }
  return out;
}

std::vector<double> DenseMatrix::transpose_multiply(std::span<const double> y) const {
  std::vector<double> out(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out[c] += (*this)(r, c) * y[r];
  }
  return out;
}

DenseMatrix DenseMatrix::select_columns(std::span<const std::size_t> columns) const {
  DenseMatrix out(rows_, columns.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = 0; k < columns.size(); ++k) out(r, k) = (*this)(r, columns[k]);
  }
  return out;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void LsProblem::validate() const {
  const std::size_t m = h.rows();
  const std::size_t n = h.cols();
  if (n == 0) throw ValidationError("problem.h", "needs at least one column");
  if (m < n) throw ValidationError("problem.h", "needs at least as many rows as columns");
  if (z.size() != m) throw ValidationError("problem.z", "length must equal the row count of h");
  if (!h.all_finite()) throw ValidationError("problem.h", "entries must be finite");
  if (!std::all_of(z.begin(), z.end(), [](double v) { return std::isfinite(v); }))
    throw ValidationError("problem.z", "entries must be finite");
}

double norm2(std::span<const double> v) {
  // Scaled accumulation so large voltages times large coulomb counts cannot overflow.
  double scale = 0.0;
  double ssq = 1.0;
  for (double a : v) {
    if (a == 0.0) continue;
    const double abs_a = std::abs(a);
    if (scale < abs_a) {
      ssq = 1.0 + ssq * (scale / abs_a) * (scale / abs_a);
      scale = abs_a;
    } else {
      ssq += (abs_a / scale) * (abs_a / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double norm_inf(std::span<const double> v) {
  double out = 0.0;
  for (double a : v) out = std::max(out, std::abs(a));
  return out;
}

std::vector<double> residual(const LsProblem& problem, std::span<const double> x) {
  std::vector<double> r = problem.h.multiply(x);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = problem.z[k] - r[k];
  return r;
}

std::vector<double> solve_least_squares(const LsProblem& problem) {
  problem.validate();
  const std::size_t m = problem.h.rows();
  const std::size_t n = problem.h.cols();

  // Column-major working copy: Householder reflections act on columns.
  std::vector<std::vector<double>> a(n, std::vector<double>(m));
  double max_col_norm = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < m; ++r) a[c][r] = problem.h(r, c);
    max_col_norm = std::max(max_col_norm, norm2(a[c]));
  }
  std::vector<double> b = problem.z;
  const double rank_tol = 10.0 * std::numeric_limits<double>::epsilon() *
                          static_cast<double>(m) * max_col_norm;

  std::vector<double> diag(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto& v = a[j];
    const double sigma = norm2(std::span<const double>(v).subspan(j));
    if (!(sigma > rank_tol)) {
      std::ostringstream os;
      os << "least-squares system is rank deficient at column " << j << " of " << n;
      throw RankError(os.str(), n);
    }
    // Reflect v[j:] onto -sign(v[j]) * sigma * e_j.
    const double alpha = v[j] >= 0.0 ? -sigma : sigma;
    v[j] -= alpha;
    const double vtv = -2.0 * alpha * v[j];  // ||v||^2 after the shift
    diag[j] = alpha;

    auto reflect = [&](std::vector<double>& y) {
      double dot = 0.0;
      for (std::size_t r = j; r < m; ++r) dot += v[r] * y[r];
      const double f = 2.0 * dot / vtv;
      for (std::size_t r = j; r < m; ++r) y[r] -= f * v[r];
    };
    for (std::size_t c = j + 1; c < n; ++c) reflect(a[c]);
    reflect(b);
  }

  std::vector<double> x(n);
  for (std::size_t jj = n; jj-- > 0;) {
    double acc = b[jj];
    for (std::size_t c = jj + 1; c < n; ++c) acc -= a[c][jj] * x[c];
    x[jj] = acc / diag[jj];
  }
  return x;
}

double default_nnls_tolerance(const LsProblem& problem) {
  const auto htz = problem.h.transpose_multiply(problem.z);
  const double dim = static_cast<double>(std::max(problem.h.rows(), problem.h.cols()));
  return 10.0 * std::numeric_limits<double>::epsilon() * dim * norm_inf(htz);
}

NnlsSolution solve_nnls(const LsProblem& problem, const NnlsOptions& options) {
  problem.validate();
  const std::size_t n = problem.h.cols();
  const double tol = options.tol.value_or(default_nnls_tolerance(problem));
  if (!(tol >= 0.0)) throw ValidationError("nnls.tol", "must be non-negative");
  const std::size_t max_iter = options.max_iter.value_or(3 * n);

  std::vector<double> x(n, 0.0);
  std::vector<bool> passive(n, false);
  // Variables whose freshly computed coefficient came out non-positive; they
  // are skipped until x changes.
  std::vector<bool> excluded(n, false);
  std::vector<double> w = problem.h.transpose_multiply(residual(problem, x));
  std::size_t iterations = 0;

  auto passive_indices = [&] {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    return idx;
  };
  auto restricted_solve = [&](const std::vector<std::size_t>& idx) {
    LsProblem sub{problem.h.select_columns(idx), problem.z};
    std::vector<double> full(n, 0.0);
    const auto s = solve_least_squares(sub);
    for (std::size_t k = 0; k < idx.size(); ++k) full[idx[k]] = s[k];
    return full;
  };

  while (true) {
    std::size_t t = n;
    double best = tol;
    for (std::size_t j = 0; j < n; ++j) {
      if (!passive[j] && !excluded[j] && w[j] > best) {
        best = w[j];
        t = j;
      }
    }
    if (t == n) break;
    if (++iterations > max_iter) {
      std::ostringstream os;
      os << "NNLS did not converge within " << max_iter << " iterations";
      throw ConvergenceError(os.str(), x);
    }

    passive[t] = true;
    std::vector<double> s;
    try {
      s = restricted_solve(passive_indices());
    } catch (const RankError&) {
      s.clear();
    }
    if (s.empty() || s[t] <= 0.0) {
      passive[t] = false;
      excluded[t] = true;
      continue;
    }

    while (true) {
      const auto idx = passive_indices();
      bool feasible = true;
      for (std::size_t j : idx) feasible = feasible && s[j] > 0.0;
      if (feasible) {
        x = s;
        break;
      }
      double alpha = 1.0;
      std::size_t blocking = n;
      for (std::size_t j : idx) {
        if (s[j] <= 0.0) {
          const double a = x[j] / (x[j] - s[j]);
          if (a < alpha || blocking == n) {
            alpha = a;
            blocking = j;
          }
        }
      }
      for (std::size_t j : idx) x[j] += alpha * (s[j] - x[j]);
      x[blocking] = 0.0;
      for (std::size_t j : idx) {
        if (x[j] <= 0.0) {
          x[j] = 0.0;
          passive[j] = false;
        }
      }
      const auto remaining = passive_indices();
      if (remaining.empty()) break;
      s = restricted_solve(remaining);
    }
    std::fill(excluded.begin(), excluded.end(), false);
    w = problem.h.transpose_multiply(residual(problem, x));
  }

  NnlsSolution sol;
  sol.x = x;
  sol.residual_norm = norm2(residual(problem, x));
  for (std::size_t j = 0; j < n; ++j)
    if (x[j] == 0.0) sol.active_set.push_back(j);
  sol.dual = std::move(w);
  sol.iterations = iterations;
  return sol;
}

KktReport kkt_check(const LsProblem& problem, const NnlsSolution& solution, double tol) {
  KktReport report;
  const std::size_t n = problem.h.cols();
  if (solution.x.size() != n || problem.z.size() != problem.h.rows()) {
    report.ok = false;
    report.message = "dimension mismatch";
    return report;
  }
  const auto w = problem.h.transpose_multiply(residual(problem, solution.x));
  auto fail = [&](std::size_t j, double violation, const char* what) {
    report.max_violation = std::max(report.max_violation, violation);
    if (report.ok) {
      std::ostringstream os;
      os << what << " at index " << j;
      report.message = os.str();
    }
    report.ok = false;
  };
  for (std::size_t j = 0; j < n; ++j) {
    const double xj = solution.x[j];
    if (xj < 0.0) {
      fail(j, -xj, "negative coordinate");
    } else if (xj == 0.0) {
      if (w[j] > tol) fail(j, w[j], "positive dual on a bound coordinate");
    } else if (std::abs(w[j]) > tol) {
      fail(j, std::abs(w[j]), "non-zero dual on a free coordinate");
    }
  }
  return report;
}

}  // namespace hppc
