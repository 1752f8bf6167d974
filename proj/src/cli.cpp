#include "hppc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "hppc/data_io.hpp"
#include "hppc/error.hpp"
#include "hppc/estimation.hpp"

namespace hppc::cli {
namespace {

// Config problems map to kExitUsage; everything after loading to kExitFailure.
struct ConfigFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig load_config(const std::string& path) {
  try {
    return read_config_json(path);
  } catch (const std::exception& e) {
    throw ConfigFailure(path + ": " + e.what());
  }
}

double require_truth(const RunConfig& cfg) {
  if (!cfg.true_r0_ohm)
    throw ConfigFailure("battery.r0_ohm: required for simulation and sweeps");
  return *cfg.true_r0_ohm;
}

std::string fixed(double v, int decimals) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(decimals) << v;
  return os.str();
}

std::string fixed(const std::optional<double>& v, int decimals) {
  return v && std::isfinite(*v) ? fixed(*v, decimals) : std::string("-");
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void render(std::ostream& out, bool markdown) const {
    std::vector<std::size_t> width(header_.size());
    for (std::size_t c = 0; c < header_.size(); ++c) {
      width[c] = header_[c].size();
      for (const auto& r : rows_) width[c] = std::max(width[c], r[c].size());
    }
    auto line = [&](const std::vector<std::string>& cells) {
      if (markdown) out << "| ";
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (c > 0) out << (markdown ? " | " : "  ");
        out << std::setw(static_cast<int>(width[c])) << cells[c];
      }
      if (markdown) out << " |";
      out << '\n';
    };
    line(header_);
    if (markdown) {
      out << '|';
      for (std::size_t c = 0; c < header_.size(); ++c)
        out << std::string(width[c] + 1, '-') << ":|";
      out << '\n';
    } else {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      out << std::string(total > 2 ? total - 2 : 0, '-') << '\n';
    }
    for (const auto& r : rows_) line(r);
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

int cmd_simulate(const std::string& config_path, const std::string& mode, double soc0,
                 double c_rate, const std::optional<std::uint64_t>& seed,
                 const std::string& out_path, std::ostream& out) {
  RunConfig cfg = load_config(config_path);
  require_truth(cfg);
  if (seed) cfg.noise.seed = *seed;

  CurrentProfile profile;
  if (mode == "pulse") {
    profile = hppc_pulse_profile(cfg.battery.capacity_ah, c_rate);
  } else {
    profile = full_hppc_test_profile(cfg.battery, c_rate);
  }
  const TimeSeries series = run_profile(cfg.battery, soc0, profile, cfg.noise);
  write_timeseries_csv(series, out_path);

  const Sample& last = series.samples.back();
  out << "mode " << mode << ", " << series.size() << " samples over " << fixed(last.t_s, 1)
      << " s (" << fixed(last.t_s / 3600.0, 3) << " h)\n";
  out << "initial SOC " << fixed(soc0, 4) << ", final SOC " << fixed(last.soc.value_or(0.0), 6)
      << "\n";
  out << "voltage-limit flags: " << series.flags.size() << "\n";
  for (const auto& f : series.flags) {
    out << "  segment " << f.segment << " stopped at t = " << fixed(f.t_s, 1) << " s ("
        << (f.kind == LimitKind::BelowMin ? "below v_min" : "above v_max") << ", "
        << fixed(f.v_volts, 4) << " V)\n";
  }
  out << "wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_segment(const std::string& config_path, const std::string& in_path,
                const std::string& out_path, std::ostream& out) {
  const RunConfig cfg = load_config(config_path);
  const TimeSeries series = read_cycler_csv(in_path, cfg.columns);
  const auto dis = find_discharge_pulses(series, cfg.segmentation);
  const auto chg = find_charge_pulses(series, cfg.segmentation);

  std::ofstream file(out_path);
  if (!file) throw IoError("cannot open " + out_path + " for writing");
  file << "kind,start,end,t0_s,t1_s,current_a,v_t0,v_t1,soc\n" << std::setprecision(12);
  Table table({"kind", "t0 (s)", "t1 (s)", "I (A)", "v(t0) (V)", "v(t1) (V)"});
  auto emit = [&](const PulseSegment& s, const char* kind) {
    file << kind << ',' << s.start << ',' << s.end << ',' << s.t0() << ',' << s.t1() << ','
         << s.current_a << ',' << s.v_t0 << ',' << s.v_t1 << ',';
    if (s.soc_label) file << *s.soc_label;
    file << '\n';
    table.add({kind, fixed(s.t0(), 1), fixed(s.t1(), 1), fixed(s.current_a, 3),
               fixed(s.v_t0, 4), fixed(s.v_t1, 4)});
  };
  for (const auto& s : dis) emit(s, "discharge");
  for (const auto& s : chg) emit(s, "charge");
  if (!file) throw IoError("failed writing " + out_path);

  table.render(out, false);
  out << dis.size() << " discharge and " << chg.size() << " charge pulses\n";
  return kExitOk;
}

int cmd_estimate(const std::string& config_path, const std::string& in_path,
                 const std::string& out_path, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load_config(config_path);
  const TimeSeries series = read_cycler_csv(in_path, cfg.columns);
  if (series.empty()) {
    err << "error: " << in_path << " contains no samples\n";
    return kExitFailure;
  }
  const auto pulses = find_discharge_pulses(series, cfg.segmentation);
  if (pulses.empty()) {
    err << "error: no discharge pulses found in " << in_path
        << " (check segmentation thresholds and current polarity)\n";
    return kExitFailure;
  }

  std::vector<ResultRow> rows;
  Table table({"#", "t0 (s)", "SOC", "I_dis (A)", "R0 HPPC (mOhm)", "R0 corrected (mOhm)",
               "difference (mOhm)", "dE (V)"});
  for (std::size_t k = 0; k < pulses.size(); ++k) {
    const auto& p = pulses[k];
    const CorrectedEstimate est = estimate_corrected(p, cfg.battery.sampling_period_s,
                                                     cfg.segmentation.cc_relative_tolerance);
    rows.push_back(to_result_row(p, est, cfg.true_r0_ohm));
    table.add({std::to_string(k + 1), fixed(p.t0(), 1), fixed(p.soc_label, 3),
               fixed(p.current_a, 3), fixed(est.r0_naive_ohm * 1e3, 4), fixed(est.r0_ohm * 1e3, 4),
               fixed((est.r0_naive_ohm - est.r0_ohm) * 1e3, 4), fixed(est.delta_e_volts, 4)});
  }
  write_results_csv(rows, out_path);
  table.render(out, false);

  const auto charges = find_charge_pulses(series, cfg.segmentation);
  if (!charges.empty()) {
    out << "\nregenerative pulses (HPPC ratio only)\n";
    Table regen({"#", "t2 (s)", "I_ch (A)", "R_regen (mOhm)"});
    for (std::size_t k = 0; k < charges.size(); ++k) {
      regen.add({std::to_string(k + 1), fixed(charges[k].t0(), 1), fixed(charges[k].current_a, 3),
                 fixed(naive_regen_resistance(charges[k]) * 1e3, 4)});
    }
    regen.render(out, false);
  }
  out << "wrote " << rows.size() << " rows to " << out_path << "\n";
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path, std::ostream& out) {
  const RunConfig cfg = load_config(config_path);
  require_truth(cfg);
  const auto points = soc_sweep(cfg.battery, cfg.sweep.soc_grid, cfg.sweep.c_rates);
  std::vector<ResultRow> rows;
  rows.reserve(points.size());
  for (const auto& p : points) rows.push_back(to_result_row(p));
  write_results_csv(rows, out_path);

  std::size_t flagged = 0;
  for (const auto& p : points) flagged += p.ok() ? 0 : 1;
  out << points.size() << " sweep points (" << flagged << " flagged), wrote " << out_path << "\n";
  for (const auto& p : points)
    if (!p.ok()) out << "  soc0 " << fixed(p.soc0, 3) << " rate " << p.c_rate << ": " << *p.flag << "\n";
  return kExitOk;
}

int cmd_report(const std::string& in_path, const std::string& format, std::ostream& out) {
  const auto rows = read_results_csv(in_path);
  const bool markdown = format == "markdown";
  Table table({"soc0", "I_dis (A)", "R0 HPPC (mOhm)", "R0 corrected (mOhm)", "err HPPC (%)",
               "err corrected (%)", "gain (pts)"});
  std::optional<double> max_gain;
  std::optional<double> min_gain;
  const ResultRow* max_row = nullptr;
  const ResultRow* min_row = nullptr;
  for (const auto& r : rows) {
    std::optional<double> gain;
    if (r.err_naive_pct && r.err_corrected_pct) gain = *r.err_naive_pct - *r.err_corrected_pct;
    table.add({fixed(r.soc0, 2), fixed(r.i_dis_a, 3),
               fixed(r.r0_naive_ohm ? std::optional<double>(*r.r0_naive_ohm * 1e3) : std::nullopt, 4),
               fixed(r.r0_corrected_ohm ? std::optional<double>(*r.r0_corrected_ohm * 1e3)
                                        : std::nullopt,
                     4),
               fixed(r.err_naive_pct, 4), fixed(r.err_corrected_pct, 4), fixed(gain, 4)});
    if (gain) {
      if (!max_gain || *gain > *max_gain) max_gain = gain, max_row = &r;
      if (!min_gain || *gain < *min_gain) min_gain = gain, min_row = &r;
    }
  }
  table.render(out, markdown);
  out << '\n';
  if (max_row && min_row) {
    const char* bullet = markdown ? "- " : "";
    out << bullet << "max gain " << fixed(*max_gain, 2) << " points at soc0 "
        << fixed(max_row->soc0, 2) << ", " << fixed(max_row->i_dis_a, 3) << " A\n";
    out << bullet << "min gain " << fixed(*min_gain, 2) << " points at soc0 "
        << fixed(min_row->soc0, 2) << ", " << fixed(min_row->i_dis_a, 3) << " A\n";
  } else {
    out << rows.size() << " rows, no ground-truth error columns\n";
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"HPPC internal-resistance estimation toolkit"};
  app.require_subcommand(1);

  std::string config_path, in_path, out_path, mode = "pulse", format = "text";
  double soc0 = 1.0;
  double c_rate = 1.0;
  std::optional<std::uint64_t> seed;

  auto* sim = app.add_subcommand("simulate", "simulate an HPPC pulse or full test");
  sim->add_option("--config", config_path, "run configuration (JSON)")->required();
  sim->add_option("--mode", mode, "pulse or full-test")
      ->check(CLI::IsMember({"pulse", "full-test"}));
  sim->add_option("--soc0", soc0, "initial SOC")->check(CLI::Range(0.0, 1.0));
  sim->add_option("--c-rate", c_rate, "discharge pulse current as a multiple of C")
      ->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "noise seed (overrides config)");
  sim->add_option("--out", out_path, "output trace CSV")->required();

  auto* seg = app.add_subcommand("segment", "list constant-current pulses in a trace");
  seg->add_option("--config", config_path)->required();
  seg->add_option("--in", in_path, "input trace CSV")->required();
  seg->add_option("--out", out_path, "output pulse list CSV")->required();

  auto* est = app.add_subcommand("estimate", "estimate resistance for every discharge pulse");
  est->add_option("--config", config_path)->required();
  est->add_option("--in", in_path, "input trace CSV")->required();
  est->add_option("--out", out_path, "output results CSV")->required();

  auto* sweep = app.add_subcommand("sweep", "SOC / current sweep on the simulated cell");
  sweep->add_option("--config", config_path)->required();
  sweep->add_option("--out", out_path, "output results CSV")->required();

  auto* report = app.add_subcommand("report", "render a results CSV as a table");
  report->add_option("--in", in_path, "results CSV")->required();
  report->add_option("--format", format, "text or markdown")
      ->check(CLI::IsMember({"text", "markdown"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*sim) return cmd_simulate(config_path, mode, soc0, c_rate, seed, out_path, out);
    if (*seg) return cmd_segment(config_path, in_path, out_path, out);
    if (*est) return cmd_estimate(config_path, in_path, out_path, out, err);
    if (*sweep) return cmd_sweep(config_path, out_path, out);
    if (*report) return cmd_report(in_path, format, out);
  } catch (const ConfigFailure& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace hppc::cli
