// Command-line frontend: run scenarios, generate stability/safety charts,
// run parameter sweeps, and execute the cross-validation suite. All outputs
// are CSV/JSON files under the --out directory, together with the effective
// (fully defaulted) configuration for reproducibility.
//
// Exit codes: 0 success, 1 numerical failure, 2 configuration error.

#include <platoonlab/config.hpp>
#include <platoonlab/simulate.hpp>
#include <platoonlab/validate.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace platoonlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  return out;
}

void echo_config(const ExperimentSpec& spec, const fs::path& dir) {
  auto out = open_output(dir, "effective_config.json");
  out << effective_config(spec).dump(2) << '\n';
}

int cmd_simulate(const std::string& config_path, const fs::path& out_dir,
                 std::optional<double> dt_override) {
  ExperimentSpec spec = load_experiment_file(config_path);
  if (dt_override) spec.scenario.dt = *dt_override;
  spec.scenario.validate(spec.params.cfg.n_hv);

  const auto [record, metrics] = run_experiment(spec.params, spec.scenario, spec.mode);
  echo_config(spec, out_dir);
  {
    auto out = open_output(out_dir, "trajectory.csv");
    write_trajectory_csv(record, out);
  }
  {
    auto out = open_output(out_dir, "metrics.json");
    write_metrics_json(metrics, out);
  }
  std::cout << "simulate: " << record.steps.size() << " steps, "
            << (metrics.I ? "I = " + std::to_string(*metrics.I) : "I not applicable")
            << ", min gap " << metrics.min_gap << (metrics.collision ? " (collision)" : "")
            << '\n';
  return kExitOk;
}

int cmd_chart(const std::string& config_path, const fs::path& out_dir, int workers) {
  ExperimentSpec spec = load_experiment_file(config_path);
  if (!spec.chart) throw ConfigError("chart: config has no 'chart' section");
  echo_config(spec, out_dir);
  auto out = open_output(out_dir, "chart.csv");

  if (spec.chart->kind == ChartSpec::Kind::Safety) {
    const SafetyChart chart = safety_chart(spec.chart->x, spec.chart->y, spec.params.gains,
                                           spec.params.headways, spec.params.rp);
    write_csv(chart, out);
    std::cout << "chart: safety, " << chart.cells.size() << " cells\n";
    return kExitOk;
  }
  if (spec.chart->x.gain != GainAxis::BetaHeadTail || spec.chart->y.gain != GainAxis::BetaTailHead)
    throw ConfigError("chart: stability charts sweep beta_head_tail (x) and beta_tail_head (y)");
  const AxisSpec x{spec.chart->x.lo, spec.chart->x.hi, spec.chart->x.count};
  const AxisSpec y{spec.chart->y.lo, spec.chart->y.hi, spec.chart->y.count};
  const StabilityChart chart = stability_chart(x, y, spec.params.gains, spec.params.cfg,
                                               spec.params.hv, spec.params.rp,
                                               spec.scenario.v_star, workers);
  write_csv(chart, out);
  int stable = 0;
  for (const auto& c : chart.cells) stable += c.string_stable ? 1 : 0;
  std::cout << "chart: stability, " << chart.cells.size() << " cells, " << stable
            << " string stable\n";
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const fs::path& out_dir, int workers,
              std::optional<double> dt_override) {
  ExperimentSpec spec = load_experiment_file(config_path);
  if (!spec.sweep) throw ConfigError("sweep: config has no 'sweep' section");
  if (dt_override) spec.scenario.dt = *dt_override;
  spec.scenario.validate(spec.params.cfg.n_hv);
  echo_config(spec, out_dir);
  const SweepSpec& sw = *spec.sweep;

  switch (sw.kind) {
    case SweepSpec::Kind::Gains: {
      const GainSweepResult result =
          sweep_gains(sw.x, sw.y, spec.scenario, spec.mode, spec.params, sw.bisect, workers);
      auto out = open_output(out_dir, "gain_sweep.csv");
      write_gain_sweep_csv(result, out);
      std::cout << "sweep: gains, " << result.cells.size() << " cells\n";
      break;
    }
    case SweepSpec::Kind::HvCount: {
      const auto entries = sweep_hv_count(sw.n_values, sw.modes, spec.scenario, spec.params,
                                          workers);
      auto out = open_output(out_dir, "hv_count_sweep.csv");
      write_hv_count_sweep_csv(entries, out);
      std::cout << "sweep: hv_count, " << entries.size() << " runs\n";
      break;
    }
    case SweepSpec::Kind::HvParam: {
      const auto result = sweep_hv_params(sw.parameter, sw.values, sw.x, sw.y, spec.params.gains,
                                          spec.params.cfg, spec.params.hv.front(), spec.params.rp,
                                          spec.scenario.v_star, workers);
      for (std::size_t k = 0; k < result.values.size(); ++k) {
        std::ostringstream name;
        name << "chart_" << to_string(sw.parameter) << '_' << result.values[k] << ".csv";
        auto out = open_output(out_dir, name.str());
        write_csv(result.charts[k], out);
      }
      auto out = open_output(out_dir, "overlap.csv");
      write_csv(result.overlap, out);
      int overlap = 0;
      for (const auto& c : result.overlap.cells) overlap += c.string_stable ? 1 : 0;
      std::cout << "sweep: hv_param " << to_string(sw.parameter) << ", " << result.values.size()
                << " charts, overlap " << overlap << " string-stable cells\n";
      break;
    }
  }
  return kExitOk;
}

int cmd_validate(unsigned seed, std::optional<fs::path> out_dir) {
  const std::vector<CheckResult> results = run_all_checks(seed);
  bool all_pass = true;
  std::ostringstream report;
  for (const auto& r : results) {
    report << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  (" << r.detail << ")\n";
    all_pass = all_pass && r.pass;
  }
  std::cout << report.str();
  std::cout << (all_pass ? "validate: all checks passed\n" : "validate: FAILURES detected\n");
  if (out_dir) {
    auto out = open_output(*out_dir, "validation_report.txt");
    out << report.str();
  }
  return all_pass ? kExitOk : kExitNumerical;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed-platoon stability and safety laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  std::optional<double> dt_override;
  unsigned seed = 2024;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config)
      cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--workers", workers, "worker threads for grids and sweeps");
    return cmd;
  };

  auto* sim = add_common(app.add_subcommand("simulate", "run one scenario"), true);
  double dt_value = 0.0;
  sim->add_option("--dt", dt_value, "override the integration step");
  auto* chart = add_common(app.add_subcommand("chart", "stability or safety chart"), true);
  auto* sweep = add_common(app.add_subcommand("sweep", "gain / platoon-size / driver sweeps"), true);
  sweep->add_option("--dt", dt_value, "override the integration step");
  auto* validate = add_common(app.add_subcommand("validate", "run the cross-validation suite"),
                              false);
  validate->add_option("--seed", seed, "seed for the randomized samples");

  CLI11_PARSE(app, argc, argv);
  if (dt_value > 0.0) dt_override = dt_value;

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_dir, dt_override);
    if (chart->parsed()) return cmd_chart(config_path, out_dir, workers);
    if (sweep->parsed()) return cmd_sweep(config_path, out_dir, workers, dt_override);
    if (validate->parsed()) return cmd_validate(seed, fs::path(out_dir));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
