#include "hppc/ocv_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hppc/error.hpp"

namespace hppc {
namespace {

double evaluate(const CombinedPlus3Params& p, double x) {
  const auto& u = p.u;
  const double inv = 1.0 / x;
  // Horner form of u1/x + u2/x^2 + u3/x^3 + u4/x^4.
  const double reciprocal = inv * (u[1] + inv * (u[2] + inv * (u[3] + inv * u[4])));
  return u[0] + reciprocal + u[5] * x + u[6] * std::log(x) + u[7] * std::log1p(-x);
}

double evaluate_derivative(const CombinedPlus3Params& p, double x) {
  const auto& u = p.u;
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double reciprocal =
      -inv2 * (u[1] + inv * (2.0 * u[2] + inv * (3.0 * u[3] + inv * 4.0 * u[4])));
  return reciprocal + u[5] + u[6] * inv - u[7] / (1.0 - x);
}

}  // namespace

bool CombinedPlus3Params::all_finite() const {
  for (double v : u) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

CombinedPlus3Params reference_ocv_params() {
  return {{-9.082, 103.087, -18.185, 2.062, -0.102, -76.604, 141.199, -1.117}};
}

double scale_soc(double soc, SocScaling scaling) {
  if (!(soc >= 0.0 && soc <= 1.0)) {
    std::ostringstream os;
    os << "SOC " << soc << " outside [0, 1]";
    throw DomainError(os.str());
  }
  if (!scaling.valid()) throw DomainError("SOC scaling epsilon must lie in [0, 0.5)");
  return (1.0 - 2.0 * scaling.epsilon) * soc + scaling.epsilon;
}

OcvCurve::OcvCurve(CombinedPlus3Params params, SocScaling scaling)
    : params_(params), scaling_(scaling) {
  if (!params_.all_finite()) throw DomainError("OCV coefficients must be finite");
  if (!scaling_.valid()) throw DomainError("SOC scaling epsilon must lie in [0, 0.5)");
}

double OcvCurve::scaled_checked(double soc) const {
  const double x = scale_soc(soc, scaling_);
  if (x <= 0.0 || x >= 1.0) {
    std::ostringstream os;
    os << "Combined+3 model is singular at scaled SOC " << x << " (SOC " << soc << ")";
    throw SingularityError(os.str());
  }
  return x;
}

double OcvCurve::ocv(double soc) const { return evaluate(params_, scaled_checked(soc)); }

double OcvCurve::gradient(double soc) const {
  const double x = scaled_checked(soc);
  return evaluate_derivative(params_, x) * (1.0 - 2.0 * scaling_.epsilon);
}

OcvValidationReport validate_params(const CombinedPlus3Params& params,
                                    SocScaling scaling, std::size_t grid_size) {
  OcvValidationReport report;
  if (grid_size < 2) throw DomainError("validation grid needs at least two points");
  if (!scaling.valid()) {
    report.finite = false;
    report.monotone_non_decreasing = false;
    return report;
  }

  report.min_volts = std::numeric_limits<double>::infinity();
  report.max_volts = -std::numeric_limits<double>::infinity();
  double previous = std::numeric_limits<double>::quiet_NaN();
  const double step = 1.0 / static_cast<double>(grid_size - 1);
  for (std::size_t k = 0; k < grid_size; ++k) {
    const double soc = k + 1 == grid_size ? 1.0 : step * static_cast<double>(k);
    const double x = (1.0 - 2.0 * scaling.epsilon) * soc + scaling.epsilon;
    const double v = (x > 0.0 && x < 1.0) ? evaluate(params, x)
                                           : std::numeric_limits<double>::infinity();
    if (!std::isfinite(v)) {
      if (report.finite) report.first_nonfinite_soc = soc;
      report.finite = false;
      continue;
    }
    report.min_volts = std::min(report.min_volts, v);
    report.max_volts = std::max(report.max_volts, v);
    if (std::isfinite(previous) && v < previous && report.monotone_non_decreasing) {
      report.monotone_non_decreasing = false;
      report.first_decrease_soc = soc;
    }
    previous = v;
  }
  if (!report.finite) report.monotone_non_decreasing = false;
  return report;
}

}  // namespace hppc
