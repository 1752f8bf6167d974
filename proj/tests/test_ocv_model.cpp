#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hppc/error.hpp"
#include "hppc/ocv_model.hpp"
#include "oracles.hpp"

namespace hppc {
namespace {

OcvCurve reference_curve() { return {reference_ocv_params(), SocScaling{0.175}}; }

TEST(ScaleSoc, AffineMap) {
  EXPECT_DOUBLE_EQ(scale_soc(0.5, {0.175}), 0.5);
  EXPECT_NEAR(scale_soc(1.0, {0.175}), 0.825, 1e-15);
  EXPECT_EQ(scale_soc(0.0, {0.0}), 0.0);
}

TEST(ScaleSoc, RejectsOutOfRange) {
  EXPECT_THROW(scale_soc(-0.01, {0.175}), DomainError);
  EXPECT_THROW(scale_soc(1.01, {0.175}), DomainError);
  EXPECT_THROW(scale_soc(std::nan(""), {0.175}), DomainError);
}

TEST(ScaleSoc, OrderPreserving) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0), e(0.0, 0.499);
  for (int k = 0; k < 1000; ++k) {
    double a = u(rng), b = u(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const SocScaling s{e(rng)};
    EXPECT_LT(scale_soc(a, s), scale_soc(b, s));
  }
}

// Zero-current voltages of the reference cell at three initial SOCs.
TEST(OcvAt, ReproducesReferenceRestVoltages) {
  const auto curve = reference_curve();
  EXPECT_NEAR(curve.ocv(1.0), 4.1917, 1e-3);
  EXPECT_NEAR(curve.ocv(0.5), 3.8166, 1e-3);
  EXPECT_NEAR(curve.ocv(0.15), 3.6344, 1e-3);
  // The rest voltage printed to five decimals for the full cell.
  EXPECT_NEAR(curve.ocv(1.0), 4.19175, 5e-6);
}

TEST(OcvAt, SevenEighthsSoc) {
  // True OCV after drawing 1/8 of capacity from full; the corrected
  // estimator's E(t1) of 4.0729 V lies within 3 mV of it.
  const auto curve = reference_curve();
  EXPECT_NEAR(curve.ocv(0.875), 4.071148, 1e-5);
  EXPECT_NEAR(curve.ocv(0.875), 4.0729, 3e-3);
}

TEST(OcvAt, SingularWithoutScaling) {
  const OcvCurve curve(reference_ocv_params(), SocScaling{0.0});
  EXPECT_THROW(curve.ocv(1.0), SingularityError);
  EXPECT_THROW(curve.ocv(0.0), SingularityError);
  EXPECT_THROW(curve.gradient(1.0), SingularityError);
  EXPECT_NO_THROW(curve.ocv(0.5));
}

TEST(OcvAt, FiniteEverywhereWithPositiveEpsilon) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> e(1e-3, 0.499);
  for (int k = 0; k < 50; ++k) {
    const OcvCurve curve(reference_ocv_params(), SocScaling{e(rng)});
    for (int i = 0; i <= 100; ++i) EXPECT_TRUE(std::isfinite(curve.ocv(i / 100.0)));
  }
}

TEST(OcvCurve, RejectsBadConstruction) {
  auto p = reference_ocv_params();
  p.u[3] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(OcvCurve(p, SocScaling{}), DomainError);
  EXPECT_THROW(OcvCurve(reference_ocv_params(), SocScaling{0.5}), DomainError);
  EXPECT_THROW(OcvCurve(reference_ocv_params(), SocScaling{-0.1}), DomainError);
}

TEST(OcvGradient, MatchesCentralDifferences) {
  const auto curve = reference_curve();
  for (int i = 0; i <= 90; ++i) {
    const double s = 0.05 + 0.01 * i;
    const double fd =
        testing::central_difference([&](double x) { return curve.ocv(x); }, s, 1e-6);
    const double g = curve.gradient(s);
    EXPECT_NEAR(g, fd, 1e-5 * std::abs(fd)) << "s = " << s;
  }
}

TEST(OcvGradient, ConstantCurveHasZeroSlope) {
  CombinedPlus3Params p;
  p.u[0] = 3.6;
  const OcvCurve curve(p, SocScaling{});
  for (int i = 0; i <= 10; ++i) EXPECT_EQ(curve.gradient(i / 10.0), 0.0);
}

TEST(OcvGradient, LinearTermCarriesChainFactor) {
  CombinedPlus3Params p;
  p.u[5] = 0.8;
  const SocScaling s{0.175};
  const OcvCurve curve(p, s);
  for (int i = 0; i <= 10; ++i) EXPECT_NEAR(curve.gradient(i / 10.0), 0.8 * 0.65, 1e-15);
}

TEST(ValidateParams, ReferenceCurveIsFiniteAndMonotone) {
  const auto report = validate_params(reference_ocv_params(), SocScaling{0.175}, 1001);
  EXPECT_TRUE(report.finite);
  EXPECT_TRUE(report.monotone_non_decreasing);
  EXPECT_TRUE(report.ok());
  EXPECT_NEAR(report.max_volts, 4.19175, 1e-5);
}

TEST(ValidateParams, ZeroCurveIsConstant) {
  const auto report = validate_params(CombinedPlus3Params{}, SocScaling{}, 11);
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.min_volts, 0.0);
  EXPECT_EQ(report.max_volts, 0.0);
}

TEST(ValidateParams, LogSingularityFails) {
  CombinedPlus3Params p;
  p.u[7] = -1.117;
  const auto report = validate_params(p, SocScaling{0.0}, 101);
  EXPECT_FALSE(report.finite);
  EXPECT_FALSE(report.ok());
  ASSERT_TRUE(report.first_nonfinite_soc.has_value());
  EXPECT_EQ(*report.first_nonfinite_soc, 0.0);  // ln(0) at s = 0 as well
}

TEST(ValidateParams, DetectsDecrease) {
  CombinedPlus3Params p;
  p.u[5] = -1.0;
  const auto report = validate_params(p, SocScaling{}, 11);
  EXPECT_TRUE(report.finite);
  EXPECT_FALSE(report.monotone_non_decreasing);
  ASSERT_TRUE(report.first_decrease_soc.has_value());
}

TEST(ValidateParams, GridTooSmall) {
  EXPECT_THROW(validate_params(CombinedPlus3Params{}, SocScaling{}, 1), DomainError);
}

}  // namespace
}  // namespace hppc
