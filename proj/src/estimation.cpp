#include "hppc/estimation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hppc/error.hpp"


namespace hppc {
namespace {

double endpoint_ratio(const PulseSegment& segment) {
  if (segment.samples.size() < 2) throw ConstraintError("segment has no in-pulse samples");
  const double dv = segment.v_t1 - segment.v_t0;
  const double di = segment.samples.back().i_a - segment.samples.front().i_a;
  if (di == 0.0) throw DomainError("current difference across the pulse is zero");
  return std::abs(dv / di);
}

void validate_sweep_inputs(const BatteryConfig& config, const std::vector<double>& soc_grid,
                           const std::vector<double>& c_rates) {
  config.validate();
  if (!(config.r0_ohm > 0.0))
    throw ValidationError("battery.r0_ohm", "sweep needs a positive ground-truth resistance");
  if (c_rates.empty()) throw ValidationError("sweep.c_rates", "must not be empty");
  for (double r : c_rates)
    if (!(r > 0.0)) throw ValidationError("sweep.c_rates", "rates must be positive");
  for (double s : soc_grid)
    if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("sweep.soc_grid", "SOC outside [0, 1]");
}

}  // namespace

double naive_discharge_resistance(const PulseSegment& segment) { return endpoint_ratio(segment); }

double naive_regen_resistance(const PulseSegment& segment) { return endpoint_ratio(segment); }

ObservationModel build_observation_model(const PulseSegment& segment, double sampling_period_s,
                                         double cc_relative_tolerance) {
  if (!(sampling_period_s > 0.0)) throw DomainError("sampling period must be positive");
  const auto& s = segment.samples;
  if (s.size() < 3)
    throw ConstraintError("observation model needs a rest sample and at least two pulse samples");
  const double i_dis = segment.current_a;
  if (i_dis == 0.0) throw ConstraintError("pulse current is zero");
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (std::abs(s[k].i_a - i_dis) > cc_relative_tolerance * std::abs(i_dis))
      throw ConstraintError("pulse current is not constant within tolerance");
  }

  const double t0 = s.front().t_s;
  bool on_grid = true;
  for (std::size_t k = 1; k < s.size() && on_grid; ++k) {
    const double dt = s[k].t_s - s[k - 1].t_s;
    on_grid = std::abs(dt - sampling_period_s) <= 1e-6 * sampling_period_s;
  }

  const std::size_t m = s.size();
  ObservationModel model;
  model.current_a = i_dis;
  model.z.resize(m);
  model.h = DenseMatrix(m, 3);
  model.coulomb_column_as.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    model.z[k] = s[k].v_volts;
    const double elapsed = on_grid ? static_cast<double>(k) * sampling_period_s : s[k].t_s - t0;
    const double coulombs = k == 0 ? 0.0 : elapsed * i_dis;
    model.h(k, 0) = k == 0 ? 0.0 : i_dis;
    model.h(k, 1) = 1.0;
    model.h(k, 2) = coulombs;
    model.coulomb_column_as[k] = coulombs;
  }
  return model;
}

CorrectedEstimate estimate_corrected(const PulseSegment& segment, double sampling_period_s,
                                     double cc_relative_tolerance) {
  const ObservationModel model =
      build_observation_model(segment, sampling_period_s, cc_relative_tolerance);
  const NnlsSolution sol = solve_nnls(model.problem());

  CorrectedEstimate est;
  est.r0_ls_ohm = sol.x[0];
  est.e0_volts = sol.x[1];
  est.kappa_volts_per_as = sol.x[2];
  est.delta_e_volts = sol.x[2] * model.coulomb_column_as.back();
  est.r0_naive_ohm = naive_discharge_resistance(segment);
  est.residual_norm = sol.residual_norm;
  est.constraint_active = !sol.active_set.empty();
  const double dv = segment.v_t1 - segment.v_t0;
  est.r0_ohm = std::abs((dv - est.delta_e_volts) / model.current_a);
  return est;
}

double resistance_error_percent(double estimate_ohm, double true_ohm) {
  if (!(true_ohm > 0.0)) throw DomainError("true resistance must be positive");
  return 100.0 * std::abs(estimate_ohm - true_ohm) / true_ohm;
}

std::vector<double> default_soc_grid() {
  std::vector<double> grid;
  for (int k = 3; k <= 20; ++k) grid.push_back(static_cast<double>(k) / 20.0);
  return grid;
}

std::vector<double> default_c_rates() { return {1.0, 5.0, 15.0}; }

SweepPoint sweep_point(const BatteryConfig& config, double soc0, double c_rate) {
  SweepPoint p;
  p.soc0 = soc0;
  p.c_rate = c_rate;
  p.i_dis_a = -c_rate * config.capacity_ah;
  try {
    const CurrentProfile pulse{{{kPulseDischargeS, p.i_dis_a}}};
    const TimeSeries series = run_profile(config, soc0, pulse);
    if (!series.flags.empty()) throw DepletionError("voltage limit reached during pulse", series.flags.front().t_s);
    const PulseSegment seg = extract_segment(series, 1, series.size() - 1);
    const CorrectedEstimate est = estimate_corrected(seg, config.sampling_period_s);
    p.r0_naive_ohm = est.r0_naive_ohm;
    p.r0_corrected_ohm = est.r0_ohm;
    p.err_naive_pct = resistance_error_percent(p.r0_naive_ohm, config.r0_ohm);
    p.err_corrected_pct = resistance_error_percent(p.r0_corrected_ohm, config.r0_ohm);
  } catch (const Error& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    p.r0_naive_ohm = p.r0_corrected_ohm = p.err_naive_pct = p.err_corrected_pct = nan;
    p.flag = e.what();
  }
  return p;
}

std::vector<SweepPoint> soc_sweep_serial(const BatteryConfig& config,
                                         const std::vector<double>& soc_grid,
                                         const std::vector<double>& c_rates) {
  validate_sweep_inputs(config, soc_grid, c_rates);
  std::vector<SweepPoint> out;
  out.reserve(soc_grid.size() * c_rates.size());
  for (double rate : c_rates)
    for (double soc0 : soc_grid) out.push_back(sweep_point(config, soc0, rate));
  return out;
}

std::vector<SweepPoint> soc_sweep(const BatteryConfig& config, const std::vector<double>& soc_grid,
                                  const std::vector<double>& c_rates) {
  validate_sweep_inputs(config, soc_grid, c_rates);
  const std::ptrdiff_t n_soc = static_cast<std::ptrdiff_t>(soc_grid.size());
  const std::ptrdiff_t total = n_soc * static_cast<std::ptrdiff_t>(c_rates.size());
  std::vector<SweepPoint> out(static_cast<std::size_t>(total));

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    out[static_cast<std::size_t>(k)] =
        sweep_point(config, soc_grid[static_cast<std::size_t>(k % n_soc)],
                    c_rates[static_cast<std::size_t>(k / n_soc)]);
  }
  return out;
}

}  // namespace hppc
