#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hppc/timeseries.hpp"

namespace hppc {

struct SegmentationConfig {
  double rest_current_threshold_a = 0.05;
  double cc_relative_tolerance = 0.02;
  double min_pulse_duration_s = 5.0;
  double max_pulse_duration_s = 60.0;
  double min_rest_before_s = 10.0;

  void validate() const;
};

// A constant-current pulse window. `samples` holds the leading rest sample
// (t0) followed by every in-pulse sample up to t1.
struct PulseSegment {
  std::size_t start = 0;  // first in-pulse index in the source series
  std::size_t end = 0;    // last in-pulse index (inclusive)
  double current_a = 0.0;  // median in-pulse current
  double v_t0 = 0.0;
  double v_t1 = 0.0;
  std::vector<Sample> samples;
  std::optional<double> soc_label;

  double t0() const { return samples.front().t_s; }
  double t1() const { return samples.back().t_s; }
  double duration_s() const { return t1() - t0(); }
  std::size_t pulse_sample_count() const { return samples.size() - 1; }
};

// Builds the segment for in-pulse indices [start, end]. The sample before
// `start` must be a rest sample and every in-pulse current must lie within
// the relative tolerance of the median.
PulseSegment extract_segment(const TimeSeries& series, std::size_t start, std::size_t end,
                             const SegmentationConfig& config = {});

std::vector<PulseSegment> find_discharge_pulses(const TimeSeries& series,
                                                const SegmentationConfig& config = {});
std::vector<PulseSegment> find_charge_pulses(const TimeSeries& series,
                                             const SegmentationConfig& config = {});

// True when every in-pulse sample is within tolerance of the segment current
// and the leading sample is at rest.
bool satisfies_constant_current(const PulseSegment& segment,
                                const SegmentationConfig& config = {});

}  // namespace hppc
