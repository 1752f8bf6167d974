#pragma once

#include <array>
#include <cstddef>
#include <optional>

namespace hppc {

// Coefficients u0..u7 of the Combined+3 open-circuit-voltage model
//
//   E(s) = u0 + u1/s + u2/s^2 + u3/s^3 + u4/s^4 + u5*s + u6*ln(s) + u7*ln(1-s)
//
// evaluated on the scaled SOC (see SocScaling).
struct CombinedPlus3Params {
  std::array<double, 8> u{};

  bool all_finite() const;
};

// Affine map s' = (1 - 2*epsilon)*s + epsilon that keeps the model away from
// its poles at s' = 0 and s' = 1.
struct SocScaling {
  double epsilon = 0.175;

  bool valid() const { return epsilon >= 0.0 && epsilon < 0.5; }
};

// Coefficients of the reference simulation cell (1.5 Ah, 5 mOhm study).
CombinedPlus3Params reference_ocv_params();

double scale_soc(double soc, SocScaling scaling);

// Immutable OCV curve. Construction validates the coefficients and scaling.
class OcvCurve {
 public:
  OcvCurve(CombinedPlus3Params params, SocScaling scaling);

  const CombinedPlus3Params& params() const { return params_; }
  SocScaling scaling() const { return scaling_; }

  // Volts at SOC fraction `soc` in [0, 1].
  double ocv(double soc) const;
  // dE/ds in volts per unit SOC, including the (1 - 2*epsilon) chain factor.
  double gradient(double soc) const;

 private:
  double scaled_checked(double soc) const;

  CombinedPlus3Params params_;
  SocScaling scaling_;
};

inline double ocv_at(const OcvCurve& curve, double soc) { return curve.ocv(soc); }
inline double ocv_gradient(const OcvCurve& curve, double soc) {
  return curve.gradient(soc);
}

struct OcvValidationReport {
  bool finite = true;
  bool monotone_non_decreasing = true;
  // First grid SOC at which the curve was non-finite or decreased.
  std::optional<double> first_nonfinite_soc;
  std::optional<double> first_decrease_soc;
  double min_volts = 0.0;
  double max_volts = 0.0;

  bool ok() const { return finite && monotone_non_decreasing; }
};

// Evaluates the curve on `grid_size` uniformly spaced SOC points in [0, 1].
// Never throws for bad coefficients; failures are reported.
OcvValidationReport validate_params(const CombinedPlus3Params& params,
                                    SocScaling scaling, std::size_t grid_size);

}  // namespace hppc
