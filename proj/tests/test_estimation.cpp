#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hppc/error.hpp"
#include "hppc/estimation.hpp"

namespace hppc {
namespace {

PulseSegment simulate_pulse(const BatteryConfig& cfg, double soc0, double current,
                            double duration = 30.0) {
  const auto s = run_profile(cfg, soc0, CurrentProfile{{{duration, current}}});
  return extract_segment(s, 1, s.size() - 1);
}

PulseSegment endpoints_only(double v0, double v1, double current) {
  PulseSegment seg;
  seg.current_a = current;
  seg.v_t0 = v0;
  seg.v_t1 = v1;
  seg.samples = {{0.0, 0.0, v0, std::nullopt}, {30.0, current, v1, std::nullopt}};
  seg.start = seg.end = 1;
  return seg;
}

BatteryConfig cell_with(CombinedPlus3Params p, double r0 = 0.005) {
  BatteryConfig c;
  c.ocv = OcvCurve(p, SocScaling{});
  c.r0_ohm = r0;
  return c;
}

BatteryConfig flat_cell() {
  CombinedPlus3Params p;
  p.u[0] = 3.6;
  return cell_with(p);
}

BatteryConfig linear_cell() {
  CombinedPlus3Params p;
  p.u[0] = 3.2;
  p.u[5] = 1.1;
  return cell_with(p);
}

TEST(NaiveDischarge, TableEndpoints) {
  EXPECT_NEAR(naive_discharge_resistance(endpoints_only(4.1917, 3.9586, -22.5)) * 1e3, 10.36, 1e-3);
  EXPECT_NEAR(naive_discharge_resistance(endpoints_only(3.8166, 3.6590, -22.5)) * 1e3, 7.0044, 1e-3);
  EXPECT_NEAR(naive_discharge_resistance(endpoints_only(3.6344, 3.1938, -22.5)) * 1e3, 19.5822, 1e-3);
}

TEST(NaiveDischarge, SimulatedReferencePulses) {
  const BatteryConfig cfg;
  EXPECT_NEAR(naive_discharge_resistance(simulate_pulse(cfg, 1.0, -22.5)) * 1e3, 10.36, 1e-3);
  EXPECT_NEAR(naive_discharge_resistance(simulate_pulse(cfg, 0.5, -22.5)) * 1e3, 7.0025, 1e-4);
  EXPECT_NEAR(naive_discharge_resistance(simulate_pulse(cfg, 0.15, -22.5)) * 1e3, 19.5838, 1e-4);
}

TEST(NaiveDischarge, FlatOcvIsExact) {
  EXPECT_NEAR(naive_discharge_resistance(simulate_pulse(flat_cell(), 0.7, -22.5)), 0.005, 1e-15);
}

TEST(NaiveDischarge, ZeroCurrentDifferenceThrows) {
  auto seg = endpoints_only(4.0, 3.9, 0.0);
  EXPECT_THROW(naive_discharge_resistance(seg), DomainError);
  EXPECT_THROW(naive_regen_resistance(seg), DomainError);
}

TEST(NaiveRegen, FlatOcvIsExact) {
  EXPECT_NEAR(naive_regen_resistance(simulate_pulse(flat_cell(), 0.5, 16.875, 10.0)), 0.005, 1e-15);
}

TEST(NaiveRegen, OverestimatesOnRisingOcv) {
  const BatteryConfig cfg;
  EXPECT_GT(naive_regen_resistance(simulate_pulse(cfg, 0.5, 16.875, 10.0)), cfg.r0_ohm);
}

TEST(ObservationModel, ToySegment) {
  PulseSegment seg;
  seg.current_a = -2.0;
  seg.samples = {{0.0, 0.0, 4.0, std::nullopt}, {1.0, -2.0, 3.9, std::nullopt},
                 {2.0, -2.0, 3.8, std::nullopt}};
  const auto m = build_observation_model(seg, 1.0);
  const std::vector<double> expected{0, 1, 0, -2, 1, -2, -2, 1, -4};
  EXPECT_EQ(m.h.data(), expected);
  EXPECT_EQ(m.z, (std::vector<double>{4.0, 3.9, 3.8}));
}

TEST(ObservationModel, ThirtySecondPulse) {
  const BatteryConfig cfg;
  const auto m = build_observation_model(simulate_pulse(cfg, 1.0, -22.5), 0.1);
  EXPECT_EQ(m.h.rows(), 301u);
  EXPECT_NEAR(m.coulomb_column_as.back(), -675.0, 1e-9);
  EXPECT_EQ(m.h(0, 0), 0.0);
  EXPECT_EQ(m.h(0, 1), 1.0);
  EXPECT_EQ(m.h(0, 2), 0.0);
  for (std::size_t k = 1; k < m.h.rows(); ++k) EXPECT_LT(m.h(k, 2), m.h(k - 1, 2));
}

TEST(ObservationModel, PredictedDropFromSecantSlope) {
  // kappa * C{t1} with kappa = (E(s1) - E(s0)) / (s1 - s0) / Q reproduces the
  // true OCV drop exactly.
  const BatteryConfig cfg;
  const auto m = build_observation_model(simulate_pulse(cfg, 1.0, -22.5), 0.1);
  const double ds = m.coulomb_column_as.back() / cfg.capacity_as();
  EXPECT_NEAR(ds, -0.125, 1e-12);
  const double slope = (cfg.ocv.ocv(1.0 + ds) - cfg.ocv.ocv(1.0)) / ds;
  const double kappa = slope / cfg.capacity_as();
  EXPECT_NEAR(kappa * m.coulomb_column_as.back(), cfg.ocv.ocv(0.875) - cfg.ocv.ocv(1.0), 1e-12);
  EXPECT_NEAR(kappa * m.coulomb_column_as.back(), -0.1206, 1e-4);
}

TEST(ObservationModel, IrregularTimestampsUseElapsedTime) {
  PulseSegment seg;
  seg.current_a = -1.0;
  seg.samples = {{10.0, 0.0, 4.0, std::nullopt}, {11.0, -1.0, 3.9, std::nullopt},
                 {12.5, -1.0, 3.8, std::nullopt}, {13.0, -1.0, 3.7, std::nullopt}};
  const auto m = build_observation_model(seg, 1.0);
  EXPECT_EQ(m.coulomb_column_as, (std::vector<double>{0.0, -1.0, -2.5, -3.0}));
}

TEST(ObservationModel, Preconditions) {
  PulseSegment seg;
  seg.current_a = -1.0;
  seg.samples = {{0.0, 0.0, 4.0, std::nullopt}, {1.0, -1.0, 3.9, std::nullopt}};
  EXPECT_THROW(build_observation_model(seg, 1.0), ConstraintError);
  seg.samples.push_back({2.0, -1.5, 3.8, std::nullopt});
  EXPECT_THROW(build_observation_model(seg, 1.0), ConstraintError);
}

TEST(EstimateCorrected, ReferenceTable) {
  const BatteryConfig cfg;
  struct Row {
    double soc0, r0_mohm, delta_e;
  };
  for (const Row& row : {Row{1.0, 5.0784, 0.1188}, Row{0.5, 5.0193, 0.0446},
                         Row{0.15, 7.4656, 0.2727}}) {
    const auto est = estimate_corrected(simulate_pulse(cfg, row.soc0, -22.5), 0.1);
    EXPECT_NEAR(est.r0_ohm * 1e3, row.r0_mohm, 1e-4) << row.soc0;
    EXPECT_NEAR(std::abs(est.delta_e_volts), row.delta_e, 1e-4) << row.soc0;
    EXPECT_LE(est.delta_e_volts, 0.0);
    EXPECT_GE(est.kappa_volts_per_as, 0.0);
    EXPECT_GE(est.e0_volts, 0.0);
    EXPECT_GE(est.r0_ls_ohm, 0.0);
    EXPECT_LE(est.r0_ohm, est.r0_naive_ohm);
  }
}

TEST(EstimateCorrected, FlatOcvHasZeroKappa) {
  const auto est = estimate_corrected(simulate_pulse(flat_cell(), 0.4, -22.5), 0.1);
  EXPECT_NEAR(est.kappa_volts_per_as, 0.0, 1e-15);
  EXPECT_NEAR(est.r0_ohm, 0.005, 1e-12);
  EXPECT_NEAR(est.r0_naive_ohm, 0.005, 1e-12);
}

TEST(EstimateCorrected, LinearOcvExactRecovery) {
  const auto cfg = linear_cell();
  for (double soc0 : {0.9, 0.5, 0.2}) {
    for (double i : {-1.5, -7.5, -22.5}) {
      const auto est = estimate_corrected(simulate_pulse(cfg, soc0, i), 0.1);
      EXPECT_NEAR(est.r0_ohm, 0.005, 1e-9);
      EXPECT_NEAR(est.r0_ls_ohm, 0.005, 1e-9);
      const double kappa = 1.1 * 0.65 / cfg.capacity_as();
      EXPECT_NEAR(est.kappa_volts_per_as, kappa, 1e-6 * kappa);
      EXPECT_FALSE(est.constraint_active);
    }
  }
}

TEST(EstimateCorrected, CorrectionNeverRaisesEstimateUnderNoise) {
  const BatteryConfig cfg;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> soc(0.15, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = run_profile(cfg, soc(rng), CurrentProfile{{{30.0, -7.5}}},
                               NoiseModel{0.001, static_cast<std::uint64_t>(trial)});
    const auto est = estimate_corrected(extract_segment(s, 1, s.size() - 1), 0.1);
    EXPECT_LE(est.r0_ohm, est.r0_naive_ohm);
  }
}

TEST(ErrorPercent, Values) {
  EXPECT_NEAR(resistance_error_percent(10.36e-3, 5e-3), 107.2, 1e-9);
  EXPECT_EQ(resistance_error_percent(5e-3, 5e-3), 0.0);
  EXPECT_NEAR(resistance_error_percent(7.4656e-3, 5e-3), 49.312, 1e-9);
  EXPECT_THROW(resistance_error_percent(1.0, 0.0), DomainError);
  EXPECT_THROW(resistance_error_percent(1.0, -1.0), DomainError);
}

TEST(SocSweep, ParallelMatchesSerialBitForBit) {
  const BatteryConfig cfg;
  const auto grid = default_soc_grid();
  const auto rates = default_c_rates();
  const auto a = soc_sweep(cfg, grid, rates);
  const auto b = soc_sweep_serial(cfg, grid, rates);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].soc0, b[k].soc0);
    EXPECT_EQ(a[k].c_rate, b[k].c_rate);
    EXPECT_EQ(a[k].r0_naive_ohm, b[k].r0_naive_ohm);
    EXPECT_EQ(a[k].r0_corrected_ohm, b[k].r0_corrected_ohm);
  }
}

TEST(SocSweep, OrderingAndReferenceRows) {
  const BatteryConfig cfg;
  const auto pts = soc_sweep(cfg, {1.0, 0.5, 0.15}, {15.0});
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_NEAR(pts[0].err_naive_pct, 107.2003, 1e-3);
  EXPECT_NEAR(pts[1].err_naive_pct, 40.0501, 1e-3);
  EXPECT_NEAR(pts[2].err_naive_pct, 291.6755, 1e-3);
  EXPECT_NEAR(pts[0].err_corrected_pct, 1.5678, 1e-3);
  EXPECT_NEAR(pts[1].err_corrected_pct, 0.3867, 1e-3);
  EXPECT_NEAR(pts[2].err_corrected_pct, 49.3118, 1e-3);
  for (const auto& p : pts) EXPECT_EQ(p.i_dis_a, -22.5);
}

TEST(SocSweep, DepletionIsFlaggedNotFatal) {
  const BatteryConfig cfg;
  const auto pts = soc_sweep(cfg, {0.05, 0.5}, {15.0});
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_FALSE(pts[0].ok());
  EXPECT_TRUE(std::isnan(pts[0].r0_naive_ohm));
  EXPECT_TRUE(pts[1].ok());
}

TEST(SocSweep, InputValidation) {
  const BatteryConfig cfg;
  EXPECT_THROW(soc_sweep(cfg, {0.5}, {}), ValidationError);
  EXPECT_THROW(soc_sweep(cfg, {1.5}, {1.0}), ValidationError);
  EXPECT_THROW(soc_sweep(cfg, {0.5}, {-1.0}), ValidationError);
}

TEST(SocSweep, DefaultGrid) {
  const auto g = default_soc_grid();
  ASSERT_EQ(g.size(), 18u);
  EXPECT_EQ(g.front(), 0.15);
  EXPECT_EQ(g.back(), 1.0);
}

}  // namespace
}  // namespace hppc
