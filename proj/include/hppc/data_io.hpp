#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hppc/battery_sim.hpp"
#include "hppc/estimation.hpp"
#include "hppc/segmentation.hpp"
#include "hppc/timeseries.hpp"

namespace hppc {

// Maps cycler export columns onto (t, i, v). When `discharge_positive` is
// set the file records discharge as positive current and values are negated
// on read.
struct ColumnMap {
  std::string time = "t_s";
  std::string current = "i_a";
  std::string voltage = "v_volts";
  // Read when present in the header.
  std::optional<std::string> soc = "soc";
  bool discharge_positive = false;
};

TimeSeries read_cycler_csv(const std::filesystem::path& path, const ColumnMap& columns = {});
TimeSeries parse_cycler_csv(std::istream& in, const ColumnMap& columns = {});

// Header "t_s,i_a,v_volts" plus ",soc" when the series carries SOC.
void write_timeseries_csv(const TimeSeries& series, const std::filesystem::path& path);
void write_timeseries_csv(const TimeSeries& series, std::ostream& out);

// One row of the results file. Unknown values are written as empty fields.
struct ResultRow {
  std::optional<double> soc0;
  double i_dis_a = 0.0;
  std::optional<double> r0_naive_ohm;
  std::optional<double> r0_corrected_ohm;
  std::optional<double> err_naive_pct;
  std::optional<double> err_corrected_pct;
};

inline constexpr const char* kResultsHeader =
    "soc0,i_dis_a,r0_naive_ohm,r0_corrected_ohm,err_naive_pct,err_corrected_pct";

ResultRow to_result_row(const SweepPoint& point);
// Errors are filled only when `true_r0_ohm` is given.
ResultRow to_result_row(const PulseSegment& segment, const CorrectedEstimate& estimate,
                        std::optional<double> true_r0_ohm);

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);
std::vector<ResultRow> parse_results_csv(std::istream& in);

struct SweepSettings {
  std::vector<double> soc_grid = default_soc_grid();
  std::vector<double> c_rates = default_c_rates();
};

struct RunConfig {
  // battery.r0_ohm holds the ground truth when one was given, 0 otherwise.
  BatteryConfig battery;
  std::optional<double> true_r0_ohm;
  SegmentationConfig segmentation;
  SweepSettings sweep;
  NoiseModel noise;
  ColumnMap columns;
};

RunConfig read_config_json(const std::filesystem::path& path);
RunConfig parse_config_json(const std::string& text);

}  // namespace hppc
