#include "hppc/battery_sim.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "hppc/error.hpp"

namespace hppc {
namespace {

constexpr double kSocSlack = 1e-9;

std::int64_t steps_in(double duration_s, double period_s) {
  const double ratio = duration_s / period_s;
  const auto n = static_cast<std::int64_t>(std::llround(ratio));
  if (n <= 0 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "segment duration " << duration_s
       << " s is not a positive multiple of the sampling period " << period_s << " s";
    throw ValidationError("profile", os.str());
  }
  return n;
}

}  // namespace

bool TimeSeries::strictly_increasing() const {
  for (std::size_t k = 1; k < samples.size(); ++k) {
    if (!(samples[k].t_s > samples[k - 1].t_s)) return false;
  }
  return true;
}

void BatteryConfig::validate() const {
  if (!(capacity_ah > 0.0) || !std::isfinite(capacity_ah))
    throw ValidationError("battery.capacity_ah", "must be positive");
  if (!(r0_ohm >= 0.0) || !std::isfinite(r0_ohm))
    throw ValidationError("battery.r0_ohm", "must be non-negative");
  if (!(sampling_period_s > 0.0) || !std::isfinite(sampling_period_s))
    throw ValidationError("battery.sampling_period_s", "must be positive");
  if (!(v_min < v_max)) throw ValidationError("battery.v_min", "must be below battery.v_max");
}

double CurrentProfile::total_duration_s() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration_s;
  return total;
}

double CurrentProfile::net_charge_as() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration_s * s.current_a;
  return total;
}

StepResult step(const BatteryConfig& config, const SimState& state, double current_a) {
  if (!(state.soc >= 0.0 && state.soc <= 1.0)) throw DomainError("state SOC outside [0, 1]");
  const double period = config.sampling_period_s;
  double soc = state.soc + period * current_a / config.capacity_as();
  const double t = state.time_s + period;
  if (soc < -kSocSlack || soc > 1.0 + kSocSlack) {
    std::ostringstream os;
    os << (soc < 0.0 ? "cell depleted" : "cell overcharged") << " at t = " << t
       << " s (SOC " << soc << ")";
    throw DepletionError(os.str(), t);
  }
  soc = std::clamp(soc, 0.0, 1.0);
  const double v = config.ocv.ocv(soc) + current_a * config.r0_ohm;
  return {SimState{soc, t}, Sample{t, current_a, v, soc}};
}

TimeSeries run_profile(const BatteryConfig& config, double initial_soc,
                       const CurrentProfile& profile, const std::optional<NoiseModel>& noise) {
  config.validate();
  if (!(initial_soc >= 0.0 && initial_soc <= 1.0))
    throw DomainError("initial SOC outside [0, 1]");
  if (profile.segments.empty() || !(profile.total_duration_s() > 0.0))
    throw ValidationError("profile", "profile must have positive total duration");

  const double period = config.sampling_period_s;
  std::vector<std::int64_t> counts;
  std::int64_t total_steps = 0;
  for (const auto& seg : profile.segments) {
    counts.push_back(steps_in(seg.duration_s, period));
    total_steps += counts.back();
  }

  std::mt19937_64 rng(noise ? noise->seed : 0);
  std::normal_distribution<double> gauss(0.0, noise && noise->std_volts > 0.0 ? noise->std_volts : 1.0);
  const bool noisy = noise && noise->std_volts > 0.0;
  auto measured = [&](double v) { return noisy ? v + gauss(rng) : v; };

  TimeSeries series;
  series.samples.reserve(static_cast<std::size_t>(total_steps) + 1);
  SimState state{initial_soc, 0.0};
  series.samples.push_back(Sample{0.0, 0.0, measured(config.ocv.ocv(initial_soc)), initial_soc});

  std::int64_t index = 0;
  for (std::size_t s = 0; s < profile.segments.size(); ++s) {
    const double current = profile.segments[s].current_a;
    for (std::int64_t k = 0; k < counts[s]; ++k) {
      auto [next, sample] = step(config, state, current);
      ++index;
      // Stamp from the step count so long runs do not accumulate drift.
      next.time_s = sample.t_s = static_cast<double>(index) * period;
      state = next;
      const double clean_v = sample.v_volts;
      sample.v_volts = measured(clean_v);
      series.samples.push_back(sample);

      const bool below = current < 0.0 && clean_v < config.v_min;
      const bool above = current > 0.0 && clean_v > config.v_max;
      if (below || above) {
        series.flags.push_back(LimitFlag{sample.t_s, s,
                                         below ? LimitKind::BelowMin : LimitKind::AboveMax,
                                         clean_v});
        break;
      }
    }
  }
  return series;
}

CurrentProfile hppc_pulse_profile(double capacity_ah, double c_rate_dis) {
  if (!(c_rate_dis > 0.0)) throw DomainError("discharge C-rate must be positive");
  if (!(capacity_ah > 0.0)) throw DomainError("capacity must be positive");
  const double i_dis = c_rate_dis * capacity_ah;
  return {{{kPulseDischargeS, -i_dis},
           {kPulseRestS, 0.0},
           {kPulseChargeS, kRegenRatio * i_dis}}};
}

double c3_discharge_duration_s(double c_rate_dis) {
  // Per unit of capacity C: 10 % SOC is 360*C As, the pulse removes
  // (30 - 0.75*10)*c_rate*C As and the rest is drawn at C/3 A.
  const double total = 0.1 * 3600.0;
  const double pulse = c_rate_dis * (kPulseDischargeS - kRegenRatio * kPulseChargeS);
  if (!(pulse < total)) throw DomainError("HPPC pulse alone removes 10 % SOC or more");
  return (total - pulse) / (1.0 / 3.0);
}

CurrentProfile full_hppc_test_profile(const BatteryConfig& config, double c_rate_dis) {
  config.validate();
  const double period = config.sampling_period_s;
  const double i_c3 = config.capacity_ah / 3.0;
  const double t_dis = c3_discharge_duration_s(c_rate_dis);

  std::vector<ProfileSegment> discharge;
  const double ratio = t_dis / period;
  const double whole = std::floor(ratio + 1e-9);
  if (std::abs(ratio - std::round(ratio)) <= 1e-9 * ratio) {
    discharge.push_back({t_dis, -i_c3});
  } else {
    const double leftover = t_dis - whole * period;
    if (whole > 0.0) discharge.push_back({whole * period, -i_c3});
    discharge.push_back({period, -i_c3 * leftover / period});
  }

  CurrentProfile pulse = hppc_pulse_profile(config.capacity_ah, c_rate_dis);
  CurrentProfile out;
  out.segments.push_back({kTestRestS, 0.0});
  for (int rep = 0; rep < kTestRepetitions; ++rep) {
    out.segments.insert(out.segments.end(), pulse.segments.begin(), pulse.segments.end());
    out.segments.insert(out.segments.end(), discharge.begin(), discharge.end());
    out.segments.push_back({kTestRestS, 0.0});
  }
  return out;
}

}  // namespace hppc
