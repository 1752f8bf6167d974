#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hppc/ocv_model.hpp"
#include "hppc/timeseries.hpp"

namespace hppc {

// R-int cell: ideal OCV source in series with R0.
struct BatteryConfig {
  double capacity_ah = 1.5;
  double r0_ohm = 0.005;
  OcvCurve ocv{reference_ocv_params(), SocScaling{}};
  double v_max = 4.2;
  double v_min = 2.5;
  double sampling_period_s = 0.1;

  double capacity_as() const { return capacity_ah * 3600.0; }
  // Throws ValidationError naming the offending field.
  void validate() const;
};

struct SimState {
  double soc = 1.0;
  double time_s = 0.0;
};

struct ProfileSegment {
  double duration_s = 0.0;
  double current_a = 0.0;
};

struct CurrentProfile {
  std::vector<ProfileSegment> segments;

  double total_duration_s() const;
  // Signed ampere-seconds delivered to the cell (negative for net discharge).
  double net_charge_as() const;
};

// Optional zero-mean Gaussian voltage noise.
struct NoiseModel {
  double std_volts = 0.0;
  std::uint64_t seed = 0;
};

struct StepResult {
  SimState state;
  Sample sample;
};

// Advances one sampling period at constant current (rectangular coulomb
// counting). The returned sample is stamped at the end of the period and its
// voltage uses the SOC reached there.
StepResult step(const BatteryConfig& config, const SimState& state, double current_a);

// Simulates `profile` from `initial_soc`. The first sample is a zero-current
// sample at t = 0; every further sample covers one sampling period. A segment
// is cut short (and flagged) when the noiseless terminal voltage crosses
// v_min while discharging or v_max while charging.
TimeSeries run_profile(const BatteryConfig& config, double initial_soc,
                       const CurrentProfile& profile,
                       const std::optional<NoiseModel>& noise = std::nullopt);

inline constexpr double kPulseDischargeS = 30.0;
inline constexpr double kPulseRestS = 40.0;
inline constexpr double kPulseChargeS = 10.0;
inline constexpr double kRegenRatio = 0.75;
inline constexpr double kTestRestS = 3600.0;
inline constexpr int kTestRepetitions = 10;

// Discharge 30 s at c_rate*C, rest 40 s, charge 10 s at 0.75*c_rate*C.
CurrentProfile hppc_pulse_profile(double capacity_ah, double c_rate_dis);

// Seconds of C/3 discharge that, together with one pulse at `c_rate_dis`,
// remove 10 % SOC (1012.5 s at 1C).
double c3_discharge_duration_s(double c_rate_dis = 1.0);

// Full test: 1 h rest, then ten times {pulse, C/3 discharge, 1 h rest}.
// When the C/3 duration is not a multiple of the sampling period, the
// discharge ends with one sampling-period tail at reduced current so the
// removed charge stays exact and later segments stay on the sampling grid.
CurrentProfile full_hppc_test_profile(const BatteryConfig& config, double c_rate_dis);

}  // namespace hppc
