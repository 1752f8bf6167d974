#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace hppc {

// One (t, i, v) record. Discharge current is negative.
struct Sample {
  double t_s = 0.0;
  double i_a = 0.0;
  double v_volts = 0.0;
  std::optional<double> soc;  // simulation only
};

enum class LimitKind { BelowMin, AboveMax };

// Raised by the simulator when a voltage limit stopped a profile segment.
struct LimitFlag {
  double t_s = 0.0;
  std::size_t segment = 0;
  LimitKind kind = LimitKind::BelowMin;
  double v_volts = 0.0;
};

struct TimeSeries {
  std::vector<Sample> samples;
  std::vector<LimitFlag> flags;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  const Sample& operator[](std::size_t k) const { return samples[k]; }
  bool has_soc() const { return !samples.empty() && samples.front().soc.has_value(); }
  bool strictly_increasing() const;
};

}  // namespace hppc
