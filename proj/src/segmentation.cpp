#include "hppc/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hppc/error.hpp"

namespace hppc {
namespace {

double median(std::vector<double> values) {
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

bool within(double value, double reference, double rel_tol) {
  return std::abs(value - reference) <= rel_tol * std::abs(reference);
}

std::vector<PulseSegment> find_pulses(const TimeSeries& series,
                                      const SegmentationConfig& config, double sign) {
  config.validate();
  if (series.empty()) throw DomainError("cannot segment an empty series");
  if (!series.strictly_increasing())
    throw DomainError("series timestamps must be strictly increasing");

  const auto& s = series.samples;
  const double thr = config.rest_current_threshold_a;
  auto is_rest = [&](std::size_t k) { return std::abs(s[k].i_a) <= thr; };
  auto is_active = [&](std::size_t k) { return sign * s[k].i_a > thr; };

  std::vector<PulseSegment> out;
  std::size_t k = 0;
  while (k < s.size()) {
    if (!is_active(k)) {
      ++k;
      continue;
    }
    const std::size_t start = k;
    const double reference = s[k].i_a;
    while (k + 1 < s.size() && is_active(k + 1) &&
           within(s[k + 1].i_a, reference, config.cc_relative_tolerance)) {
      ++k;
    }
    const std::size_t end = k;
    ++k;

    if (start == 0 || !is_rest(start - 1)) continue;
    std::size_t rest_first = start - 1;
    while (rest_first > 0 && is_rest(rest_first - 1)) --rest_first;
    const double rest_span = s[start - 1].t_s - s[rest_first].t_s;
    if (rest_first != 0 && rest_span < config.min_rest_before_s) continue;

    const double duration = s[end].t_s - s[start - 1].t_s;
    if (duration < config.min_pulse_duration_s || duration > config.max_pulse_duration_s)
      continue;

    try {
      out.push_back(extract_segment(series, start, end, config));
    } catch (const ConstraintError&) {
      // Run drifted away from its median; not a constant-current pulse.
    }
  }
  return out;
}

}  // namespace

void SegmentationConfig::validate() const {
  if (!(rest_current_threshold_a >= 0.0))
    throw ValidationError("segmentation.rest_current_threshold_a", "must be non-negative");
  if (!(cc_relative_tolerance >= 0.0 && cc_relative_tolerance < 1.0))
    throw ValidationError("segmentation.cc_relative_tolerance", "must lie in [0, 1)");
  if (!(min_pulse_duration_s >= 0.0))
    throw ValidationError("segmentation.min_pulse_duration_s", "must be non-negative");
  if (!(max_pulse_duration_s >= min_pulse_duration_s))
    throw ValidationError("segmentation.max_pulse_duration_s",
                          "must be at least min_pulse_duration_s");
  if (!(min_rest_before_s >= 0.0))
    throw ValidationError("segmentation.min_rest_before_s", "must be non-negative");
}

PulseSegment extract_segment(const TimeSeries& series, std::size_t start, std::size_t end,
                             const SegmentationConfig& config) {
  const auto& s = series.samples;
  if (start > end || end >= s.size()) {
    std::ostringstream os;
    os << "index range [" << start << ", " << end << "] out of bounds for " << s.size()
       << " samples";
    throw DomainError(os.str());
  }
  if (start == 0) throw ConstraintError("pulse has no preceding rest sample");
  if (std::abs(s[start - 1].i_a) > config.rest_current_threshold_a)
    throw ConstraintError("sample before the pulse is not a rest sample");

  std::vector<double> currents;
  currents.reserve(end - start + 1);
  for (std::size_t k = start; k <= end; ++k) currents.push_back(s[k].i_a);
  const double i_med = median(currents);
  if (std::abs(i_med) <= config.rest_current_threshold_a)
    throw ConstraintError("pulse current is within the rest threshold");
  for (std::size_t k = start; k <= end; ++k) {
    if (!within(s[k].i_a, i_med, config.cc_relative_tolerance)) {
      std::ostringstream os;
      os << "current " << s[k].i_a << " A at t = " << s[k].t_s
         << " s deviates from pulse current " << i_med << " A beyond tolerance";
      throw ConstraintError(os.str());
    }
  }

  PulseSegment seg;
  seg.start = start;
  seg.end = end;
  seg.current_a = i_med;
  seg.v_t0 = s[start - 1].v_volts;
  seg.v_t1 = s[end].v_volts;
  seg.samples.assign(s.begin() + static_cast<std::ptrdiff_t>(start - 1),
                     s.begin() + static_cast<std::ptrdiff_t>(end + 1));
  seg.soc_label = s[start - 1].soc;
  return seg;
}

std::vector<PulseSegment> find_discharge_pulses(const TimeSeries& series,
                                                const SegmentationConfig& config) {
  return find_pulses(series, config, -1.0);
}

std::vector<PulseSegment> find_charge_pulses(const TimeSeries& series,
                                             const SegmentationConfig& config) {
  return find_pulses(series, config, +1.0);
}

bool satisfies_constant_current(const PulseSegment& segment, const SegmentationConfig& config) {
  if (segment.samples.size() < 2) return false;
  if (std::abs(segment.samples.front().i_a) > config.rest_current_threshold_a) return false;
  for (std::size_t k = 1; k < segment.samples.size(); ++k) {
    if (!within(segment.samples[k].i_a, segment.current_a, config.cc_relative_tolerance))
      return false;
  }
  return true;
}

}  // namespace hppc
