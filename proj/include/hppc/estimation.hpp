#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hppc/battery_sim.hpp"
#include "hppc/numerics.hpp"
#include "hppc/segmentation.hpp"

namespace hppc {

// |dv / di| across a discharge pulse, ignoring the OCV drop.
double naive_discharge_resistance(const PulseSegment& segment);
// Same ratio across a regenerative (charge) pulse.
double naive_regen_resistance(const PulseSegment& segment);

// z = H x with x = [R0, E(s(t0)), kappa]. Row 0 is the rest sample [0, 1, 0];
// every later row is [I_dis, 1, C_k] where C_k is the signed charge drawn
// since t0.
struct ObservationModel {
  std::vector<double> z;
  DenseMatrix h;
  std::vector<double> coulomb_column_as;
  double current_a = 0.0;

  LsProblem problem() const { return {h, z}; }
};

// Uses k * sampling_period_s for the charge column when timestamps sit on
// that grid, elapsed time otherwise.
ObservationModel build_observation_model(const PulseSegment& segment, double sampling_period_s,
                                         double cc_relative_tolerance = 0.02);

struct CorrectedEstimate {
  // (dv - kappa * C{t1}) / I_dis, the OCV-drop corrected resistance.
  double r0_ohm = 0.0;
  // First component of the NNLS solution.
  double r0_ls_ohm = 0.0;
  double e0_volts = 0.0;
  double kappa_volts_per_as = 0.0;
  // kappa * C{t1}; non-positive for discharge.
  double delta_e_volts = 0.0;
  double r0_naive_ohm = 0.0;
  double residual_norm = 0.0;
  // At least one non-negativity bound is active in the NNLS solution.
  bool constraint_active = false;
};

CorrectedEstimate estimate_corrected(const PulseSegment& segment, double sampling_period_s,
                                     double cc_relative_tolerance = 0.02);

// 100 * |estimate - truth| / truth
double resistance_error_percent(double estimate_ohm, double true_ohm);

struct SweepPoint {
  double soc0 = 0.0;
  double c_rate = 0.0;
  double i_dis_a = 0.0;
  double r0_naive_ohm = 0.0;
  double r0_corrected_ohm = 0.0;
  double err_naive_pct = 0.0;
  double err_corrected_pct = 0.0;
  // Set when the point could not be simulated or estimated; numbers are NaN.
  std::optional<std::string> flag;

  bool ok() const { return !flag.has_value(); }
  double gain_pct() const { return err_naive_pct - err_corrected_pct; }
};

// soc0 from 0.15 to 1.0 in steps of 0.05.
std::vector<double> default_soc_grid();
// {1, 5, 15}
std::vector<double> default_c_rates();

// One 30 s discharge pulse per (rate, soc0) from a rested cell, both
// estimators scored against config.r0_ohm. Ordered by (rate, soc0) as given.
// Points run in parallel when OpenMP is available.
std::vector<SweepPoint> soc_sweep(const BatteryConfig& config, const std::vector<double>& soc_grid,
                                  const std::vector<double>& c_rates);

// Single-threaded reference for soc_sweep; identical output.
std::vector<SweepPoint> soc_sweep_serial(const BatteryConfig& config,
                                         const std::vector<double>& soc_grid,
                                         const std::vector<double>& c_rates);

// Evaluates a single sweep point.
SweepPoint sweep_point(const BatteryConfig& config, double soc0, double c_rate);

}  // namespace hppc
