#include "hppc/data_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "hppc/error.hpp"

namespace hppc {
namespace {

using json = nlohmann::json;

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    fields.push_back(trim(std::string_view(line).substr(
        begin, comma == std::string::npos ? std::string::npos : comma - begin)));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return fields;
}

std::optional<double> parse_double(const std::string& field) {
  if (field.empty()) return std::nullopt;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (*first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

std::string line_path(std::size_t line) { return "line " + std::to_string(line); }

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void write_optional(std::ostream& out, const std::optional<double>& v) {
  if (v && std::isfinite(*v)) out << *v;
}

// --- JSON helpers -------------------------------------------------------

double number_at(const json& obj, const std::string& key, const std::string& prefix) {
  const std::string path = prefix + "." + key;
  if (!obj.contains(key)) throw ValidationError(path, "missing required field");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(path, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ValidationError(path, "must be finite");
  return d;
}

double number_or(const json& obj, const std::string& key, const std::string& prefix,
                 double fallback) {
  return obj.contains(key) ? number_at(obj, key, prefix) : fallback;
}

const json& object_at(const json& root, const std::string& key, bool required) {
  static const json empty = json::object();
  if (!root.contains(key)) {
    if (required) throw ValidationError(key, "missing required section");
    return empty;
  }
  const auto& v = root.at(key);
  if (!v.is_object()) throw ValidationError(key, "must be an object");
  return v;
}

std::vector<double> number_list(const json& obj, const std::string& key,
                                const std::string& prefix, std::vector<double> fallback) {
  if (!obj.contains(key)) return fallback;
  const std::string path = prefix + "." + key;
  const auto& v = obj.at(key);
  if (!v.is_array()) throw ValidationError(path, "must be an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_number())
      throw ValidationError(path + "[" + std::to_string(k) + "]", "must be a number");
    out.push_back(v[k].get<double>());
  }
  return out;
}

std::string string_or(const json& obj, const std::string& key, const std::string& prefix,
                      const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ValidationError(prefix + "." + key, "must be a string");
  return v.get<std::string>();
}

}  // namespace

TimeSeries parse_cycler_csv(std::istream& in, const ColumnMap& columns) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw ValidationError("header", "file is empty");
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

  auto find_column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (header[k] == name) return k;
    return std::nullopt;
  };
  auto require = [&](const std::string& name) {
    const auto idx = find_column(name);
    if (!idx) throw ValidationError("header", "missing column \"" + name + "\"");
    return *idx;
  };
  const std::size_t t_col = require(columns.time);
  const std::size_t i_col = require(columns.current);
  const std::size_t v_col = require(columns.voltage);
  const std::optional<std::size_t> soc_col =
      columns.soc ? find_column(*columns.soc) : std::nullopt;
  const double polarity = columns.discharge_positive ? -1.0 : 1.0;

  TimeSeries series;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    auto field = [&](std::size_t col, const std::string& name) {
      if (col >= fields.size()) throw ValidationError(line_path(line_no), "missing field " + name);
      const auto v = parse_double(fields[col]);
      if (!v || !std::isfinite(*v))
        throw ValidationError(line_path(line_no),
                              "cannot parse " + name + " value \"" + fields[col] + "\"");
      return *v;
    };
    Sample s;
    s.t_s = field(t_col, columns.time);
    s.i_a = polarity * field(i_col, columns.current);
    s.v_volts = field(v_col, columns.voltage);
    if (soc_col) s.soc = field(*soc_col, *columns.soc);
    if (!series.samples.empty() && s.t_s < series.samples.back().t_s)
      throw ValidationError(line_path(line_no), "timestamp decreases");
    series.samples.push_back(s);
  }
  return series;
}

TimeSeries read_cycler_csv(const std::filesystem::path& path, const ColumnMap& columns) {
  auto in = open_input(path);
  return parse_cycler_csv(in, columns);
}

void write_timeseries_csv(const TimeSeries& series, std::ostream& out) {
  const bool with_soc = series.has_soc();
  out << "t_s,i_a,v_volts" << (with_soc ? ",soc" : "") << '\n';
  out << std::fixed;
  for (const auto& s : series.samples) {
    out << std::setprecision(9) << s.t_s << ',' << s.i_a << ',' << s.v_volts;
    if (with_soc) out << ',' << std::setprecision(12) << s.soc.value_or(0.0);
    out << '\n';
  }
}

void write_timeseries_csv(const TimeSeries& series, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_timeseries_csv(series, out);
  finish(out, path);
}

ResultRow to_result_row(const SweepPoint& point) {
  ResultRow row;
  row.soc0 = point.soc0;
  row.i_dis_a = point.i_dis_a;
  if (point.ok()) {
    row.r0_naive_ohm = point.r0_naive_ohm;
    row.r0_corrected_ohm = point.r0_corrected_ohm;
    row.err_naive_pct = point.err_naive_pct;
    row.err_corrected_pct = point.err_corrected_pct;
  }
  return row;
}

ResultRow to_result_row(const PulseSegment& segment, const CorrectedEstimate& estimate,
                        std::optional<double> true_r0_ohm) {
  ResultRow row;
  row.soc0 = segment.soc_label;
  row.i_dis_a = segment.current_a;
  row.r0_naive_ohm = estimate.r0_naive_ohm;
  row.r0_corrected_ohm = estimate.r0_ohm;
  if (true_r0_ohm) {
    row.err_naive_pct = resistance_error_percent(estimate.r0_naive_ohm, *true_r0_ohm);
    row.err_corrected_pct = resistance_error_percent(estimate.r0_ohm, *true_r0_ohm);
  }
  return row;
}

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kResultsHeader << '\n';
  out << std::setprecision(12);
  for (const auto& r : rows) {
    write_optional(out, r.soc0);
    out << ',' << r.i_dis_a << ',';
    write_optional(out, r.r0_naive_ohm);
    out << ',';
    write_optional(out, r.r0_corrected_ohm);
    out << ',';
    write_optional(out, r.err_naive_pct);
    out << ',';
    write_optional(out, r.err_corrected_pct);
    out << '\n';
  }
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_results_csv(rows, out);
  finish(out, path);
}

std::vector<ResultRow> parse_results_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (!have_header) {
      if (t != kResultsHeader)
        throw ValidationError(line_path(line_no), std::string("expected header ") + kResultsHeader);
      have_header = true;
      continue;
    }
    const auto f = split_csv_line(t);
    if (f.size() != 6) throw ValidationError(line_path(line_no), "expected 6 fields");
    auto opt = [&](std::size_t k) -> std::optional<double> {
      if (f[k].empty()) return std::nullopt;
      const auto v = parse_double(f[k]);
      if (!v) throw ValidationError(line_path(line_no), "cannot parse \"" + f[k] + "\"");
      return v;
    };
    ResultRow r;
    r.soc0 = opt(0);
    const auto i = opt(1);
    if (!i) throw ValidationError(line_path(line_no), "missing i_dis_a");
    r.i_dis_a = *i;
    r.r0_naive_ohm = opt(2);
    r.r0_corrected_ohm = opt(3);
    r.err_naive_pct = opt(4);
    r.err_corrected_pct = opt(5);
    rows.push_back(r);
  }
  if (!have_header) throw ValidationError("header", "results file is empty");
  return rows;
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_results_csv(in);
}

RunConfig parse_config_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ValidationError("", "top level must be an object");

  RunConfig cfg;
  const json& battery = object_at(root, "battery", true);
  const json& ocv = object_at(root, "ocv", true);

  CombinedPlus3Params params;
  for (std::size_t k = 0; k < 8; ++k) params.u[k] = number_at(ocv, "u" + std::to_string(k), "ocv");
  SocScaling scaling{number_or(ocv, "epsilon", "ocv", 0.175)};
  if (!scaling.valid()) throw ValidationError("ocv.epsilon", "must lie in [0, 0.5)");

  BatteryConfig& b = cfg.battery;
  b.ocv = OcvCurve(params, scaling);
  b.capacity_ah = number_at(battery, "capacity_ah", "battery");
  b.v_max = number_at(battery, "v_max", "battery");
  b.v_min = number_at(battery, "v_min", "battery");
  b.sampling_period_s = number_or(battery, "sampling_period_s", "battery", 0.1);
  if (battery.contains("r0_ohm")) {
    cfg.true_r0_ohm = number_at(battery, "r0_ohm", "battery");
    b.r0_ohm = *cfg.true_r0_ohm;
  } else {
    b.r0_ohm = 0.0;
  }
  b.validate();

  const json& seg = object_at(root, "segmentation", false);
  SegmentationConfig& sc = cfg.segmentation;
  sc.rest_current_threshold_a =
      number_or(seg, "rest_current_threshold_a", "segmentation", sc.rest_current_threshold_a);
  sc.cc_relative_tolerance =
      number_or(seg, "cc_relative_tolerance", "segmentation", sc.cc_relative_tolerance);
  sc.min_pulse_duration_s =
      number_or(seg, "min_pulse_duration_s", "segmentation", sc.min_pulse_duration_s);
  sc.max_pulse_duration_s =
      number_or(seg, "max_pulse_duration_s", "segmentation", sc.max_pulse_duration_s);
  sc.min_rest_before_s = number_or(seg, "min_rest_before_s", "segmentation", sc.min_rest_before_s);
  sc.validate();

  const json& sweep = object_at(root, "sweep", false);
  cfg.sweep.soc_grid = number_list(sweep, "soc_grid", "sweep", cfg.sweep.soc_grid);
  cfg.sweep.c_rates = number_list(sweep, "c_rates", "sweep", cfg.sweep.c_rates);
  for (std::size_t k = 0; k < cfg.sweep.soc_grid.size(); ++k) {
    const double s = cfg.sweep.soc_grid[k];
    if (!(s >= 0.0 && s <= 1.0))
      throw ValidationError("sweep.soc_grid[" + std::to_string(k) + "]", "must lie in [0, 1]");
  }
  if (cfg.sweep.c_rates.empty()) throw ValidationError("sweep.c_rates", "must not be empty");
  for (std::size_t k = 0; k < cfg.sweep.c_rates.size(); ++k) {
    if (!(cfg.sweep.c_rates[k] > 0.0))
      throw ValidationError("sweep.c_rates[" + std::to_string(k) + "]", "must be positive");
  }

  const json& noise = object_at(root, "noise", false);
  cfg.noise.std_volts = number_or(noise, "std_volts", "noise", 0.0);
  if (!(cfg.noise.std_volts >= 0.0)) throw ValidationError("noise.std_volts", "must be non-negative");
  const double seed = number_or(noise, "seed", "noise", 0.0);
  if (seed < 0.0 || seed != std::floor(seed))
    throw ValidationError("noise.seed", "must be a non-negative integer");
  cfg.noise.seed = static_cast<std::uint64_t>(seed);

  const json& csv = object_at(root, "csv", false);
  cfg.columns.time = string_or(csv, "time_column", "csv", cfg.columns.time);
  cfg.columns.current = string_or(csv, "current_column", "csv", cfg.columns.current);
  cfg.columns.voltage = string_or(csv, "voltage_column", "csv", cfg.columns.voltage);
  if (csv.contains("soc_column")) {
    const auto& v = csv.at("soc_column");
    if (v.is_null()) {
      cfg.columns.soc.reset();
    } else {
      cfg.columns.soc = string_or(csv, "soc_column", "csv", "soc");
    }
  }
  if (csv.contains("discharge_positive")) {
    if (!csv.at("discharge_positive").is_boolean())
      throw ValidationError("csv.discharge_positive", "must be a boolean");
    cfg.columns.discharge_positive = csv.at("discharge_positive").get<bool>();
  }
  return cfg;
}

RunConfig read_config_json(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

}  // namespace hppc
