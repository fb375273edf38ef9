// SPDX-License-Identifier: Apache-2.0
//
// lasim command-line front end.
//
//   lasim run     --preset B2-LRI --seed 42 --out results/
//   lasim sweep   --preset B2-LRI --param a --values 0.005 0.015 0.05
//   lasim compare B10-LRI B10-Pursuit B10-MultiFixed
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "lasim/cli_config.hpp"
#include "lasim/harness.hpp"
#include "lasim/io.hpp"
#include "lasim/presets.hpp"

namespace fs = std::filesystem;

namespace {

struct BaseOptions {
  std::string config_path;
  std::string preset;
  std::string out_dir = "results";
  std::uint64_t workers = 1;
  std::uint64_t seed = 0;
  std::uint64_t runs = 0;
  std::uint64_t steps = 0;
  std::uint64_t stride = 0;
  double a = 0.0;
  double b = 0.0;
  double lambda = 0.0;
  double threshold = 0.0;

  CLI::Option* opt_config = nullptr;
  CLI::Option* opt_preset = nullptr;
  CLI::Option* opt_out = nullptr;
  CLI::Option* opt_workers = nullptr;
  CLI::Option* opt_seed = nullptr;
  CLI::Option* opt_runs = nullptr;
  CLI::Option* opt_steps = nullptr;
  CLI::Option* opt_stride = nullptr;
  CLI::Option* opt_a = nullptr;
  CLI::Option* opt_b = nullptr;
  CLI::Option* opt_lambda = nullptr;
  CLI::Option* opt_threshold = nullptr;
  CLI::Option* opt_stop = nullptr;
};

void add_experiment_options(CLI::App* cmd, BaseOptions& o) {
  o.opt_seed = cmd->add_option("--seed", o.seed, "Master seed override");
  o.opt_runs = cmd->add_option("--runs", o.runs, "Replication count override");
  o.opt_steps = cmd->add_option("--steps", o.steps, "Horizon override");
  o.opt_stride =
      cmd->add_option("--stride", o.stride, "Trace record stride override");
  o.opt_threshold = cmd->add_option("--threshold", o.threshold,
                                    "Convergence threshold override");
  o.opt_out = cmd->add_option("--out", o.out_dir,
                              "Output directory (default: results)");
  o.opt_workers =
      cmd->add_option("--workers", o.workers, "Worker threads (default: 1)");
}

void add_config_source_options(CLI::App* cmd, BaseOptions& o) {
  o.opt_config =
      cmd->add_option("--config", o.config_path, "JSON experiment config");
  o.opt_preset = cmd->add_option("--preset", o.preset,
                                 "Benchmark preset name, e.g. B2-LRI");
  o.opt_a = cmd->add_option("--a", o.a, "Reward step size override");
  o.opt_b = cmd->add_option("--b", o.b, "Penalty step size override");
  o.opt_lambda =
      cmd->add_option("--lambda", o.lambda, "Pursuit step size override");
  o.opt_stop = cmd->add_flag("--stop-on-convergence",
                             "Stop each run at its first threshold crossing");
}

struct Resolved {
  lasim::ExperimentConfig config;
  std::string out_dir;
  std::uint64_t workers;
};

// Precedence: command-line flags over config-file values over defaults.
Resolved resolve(const BaseOptions& o) {
  bool have_config = o.opt_config->count() > 0;
  bool have_preset = o.opt_preset->count() > 0;
  if (have_config == have_preset) {
    throw std::invalid_argument(
        "exactly one of --config or --preset is required");
  }

  std::optional<lasim::ExperimentConfig> config;
  std::optional<std::string> file_out;
  std::optional<std::uint64_t> file_workers;
  if (have_preset) {
    config = lasim::benchmark_preset(o.preset);
  } else {
    lasim::CliConfigFile file = lasim::load_config_file(o.config_path);
    config = std::move(file.experiment);
    file_out = std::move(file.out_dir);
    file_workers = file.workers;
  }

  if (o.opt_seed->count()) config->master_seed = o.seed;
  if (o.opt_runs->count()) config->runs = o.runs;
  if (o.opt_steps->count()) config->steps = o.steps;
  if (o.opt_stride->count()) config->record_stride = o.stride;
  if (o.opt_a && o.opt_a->count()) lasim::apply_parameter(*config, "a", o.a);
  if (o.opt_b && o.opt_b->count()) lasim::apply_parameter(*config, "b", o.b);
  if (o.opt_lambda && o.opt_lambda->count()) {
    lasim::apply_parameter(*config, "lambda", o.lambda);
  }
  if (o.opt_threshold->count()) {
    lasim::apply_parameter(*config, "threshold", o.threshold);
  }
  if (o.opt_stop && o.opt_stop->count()) config->stop_on_convergence = true;
  config->validate();

  std::string out_dir =
      o.opt_out->count() ? o.out_dir : file_out.value_or(o.out_dir);
  std::uint64_t workers =
      o.opt_workers->count() ? o.workers : file_workers.value_or(o.workers);
  if (workers < 1) {
    throw std::invalid_argument("workers must be >= 1");
  }
  return Resolved{std::move(*config), std::move(out_dir), workers};
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw lasim::IoError("cannot create output directory '" + dir.string() +
                         "': " + ec.message());
  }
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * fraction);
  return buf;
}

std::string step_count(double steps) {
  if (std::isnan(steps)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", steps);
  return buf;
}

void print_summary(const lasim::ExperimentSummary& s) {
  std::printf("runs                  %zu\n", s.num_runs);
  std::printf("converged             %s\n", percent(s.converged_fraction).c_str());
  std::printf("wrong action          %s\n", percent(s.wrong_fraction).c_str());
  std::printf("median converged step %s\n", step_count(s.step_stats.median).c_str());
  std::printf("mean converged step   %s\n", step_count(s.step_stats.mean).c_str());
  std::printf("mean final reward     %.6f\n", s.mean_final_reward);
  std::printf("epsilon               %.6f\n", s.epsilon);
  std::printf("duration              %.2f s\n", s.duration_seconds);
}

void cmd_run(const BaseOptions& o) {
  Resolved r = resolve(o);
  lasim::ExperimentResult result =
      lasim::run_experiment(r.config, static_cast<unsigned>(r.workers));
  ensure_directory(r.out_dir);
  lasim::write_file_atomic(fs::path(r.out_dir) / "traces.csv",
                           lasim::trace_csv(result.traces, r.config.env));
  lasim::write_file_atomic(fs::path(r.out_dir) / "summary.json",
                           lasim::summary_json(result.summary));
  lasim::write_file_atomic(
      fs::path(r.out_dir) / "resolved_config.json",
      lasim::resolved_config_json(r.config, r.out_dir, r.workers));
  print_summary(result.summary);
  std::printf("wrote %s/{traces.csv, summary.json, resolved_config.json}\n",
              r.out_dir.c_str());
}

void cmd_sweep(const BaseOptions& o, const std::string& parameter,
               const std::vector<double>& values) {
  Resolved r = resolve(o);
  std::vector<std::pair<double, lasim::ExperimentSummary>> rows;
  rows.reserve(values.size());
  for (double value : values) {
    lasim::ExperimentConfig config = r.config;
    lasim::apply_parameter(config, parameter, value);
    // Sweeps emit summaries only; keep the retained traces minimal.
    config.record_stride = config.steps;
    lasim::ExperimentResult result =
        lasim::run_experiment(config, static_cast<unsigned>(r.workers));
    std::printf("%s=%g  median=%s  wrong=%s  converged=%s\n",
                parameter.c_str(), value,
                step_count(result.summary.step_stats.median).c_str(),
                percent(result.summary.wrong_fraction).c_str(),
                percent(result.summary.converged_fraction).c_str());
    rows.emplace_back(value, result.summary);
  }
  ensure_directory(r.out_dir);
  lasim::write_file_atomic(fs::path(r.out_dir) / "sweep.csv",
                           lasim::sweep_csv(parameter, rows));
  lasim::write_file_atomic(
      fs::path(r.out_dir) / "resolved_config.json",
      lasim::sweep_resolved_json(r.config, r.out_dir, r.workers, parameter,
                                 values));
  std::printf("wrote %s/{sweep.csv, resolved_config.json}\n",
              r.out_dir.c_str());
}

void cmd_compare(const BaseOptions& o, const std::vector<std::string>& names) {
  std::vector<std::pair<std::string, lasim::ExperimentConfig>> experiments;
  experiments.reserve(names.size());
  for (const std::string& name : names) {
    lasim::ExperimentConfig config = lasim::benchmark_preset(name);
    if (o.opt_seed->count()) config.master_seed = o.seed;
    if (o.opt_runs->count()) config.runs = o.runs;
    if (o.opt_steps->count()) config.steps = o.steps;
    if (o.opt_stride->count()) config.record_stride = o.stride;
    if (o.opt_threshold->count()) {
      lasim::apply_parameter(config, "threshold", o.threshold);
    }
    experiments.emplace_back(name, std::move(config));
  }

  std::vector<std::pair<std::string, lasim::ExperimentSummary>> rows;
  rows.reserve(experiments.size());
  for (auto& [name, config] : experiments) {
    lasim::ExperimentConfig trimmed = config;
    trimmed.record_stride = trimmed.steps;
    lasim::ExperimentResult result =
        lasim::run_experiment(trimmed, static_cast<unsigned>(o.workers));
    std::printf("%s: median=%s  wrong=%s  (%.2f s)\n", name.c_str(),
                step_count(result.summary.step_stats.median).c_str(),
                percent(result.summary.wrong_fraction).c_str(),
                result.summary.duration_seconds);
    rows.emplace_back(name, result.summary);
  }

  auto rank_key = [](const lasim::ExperimentSummary& s) {
    return s.step_stats.count > 0 ? s.step_stats.median
                                  : std::numeric_limits<double>::infinity();
  };
  std::stable_sort(rows.begin(), rows.end(),
                   [&](const auto& lhs, const auto& rhs) {
                     return rank_key(lhs.second) < rank_key(rhs.second);
                   });

  std::printf("\n%-4s %-18s %10s %10s %10s %8s\n", "rank", "preset", "median",
              "mean", "converged", "wrong");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [name, s] = rows[i];
    std::printf("%-4zu %-18s %10s %10s %10s %8s\n", i + 1, name.c_str(),
                step_count(s.step_stats.median).c_str(),
                step_count(s.step_stats.mean).c_str(),
                percent(s.converged_fraction).c_str(),
                percent(s.wrong_fraction).c_str());
  }

  ensure_directory(o.out_dir);
  lasim::write_file_atomic(fs::path(o.out_dir) / "compare.csv",
                           lasim::compare_csv(rows));
  lasim::write_file_atomic(
      fs::path(o.out_dir) / "resolved_config.json",
      lasim::compare_resolved_json(experiments, o.out_dir, o.workers));
  std::printf("wrote %s/{compare.csv, resolved_config.json}\n",
              o.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning automata simulation benchmarks"};
  app.require_subcommand(1);

  BaseOptions run_opts;
  CLI::App* run = app.add_subcommand(
      "run", "Run one experiment; writes traces.csv and summary.json");
  add_config_source_options(run, run_opts);
  add_experiment_options(run, run_opts);
  run->callback([&] { cmd_run(run_opts); });

  BaseOptions sweep_opts;
  std::string sweep_parameter;
  std::vector<double> sweep_values;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run one experiment per parameter value; writes sweep.csv");
  add_config_source_options(sweep, sweep_opts);
  add_experiment_options(sweep, sweep_opts);
  sweep->add_option("--param", sweep_parameter,
                    "Parameter to sweep: a, b, lambda, or threshold")
      ->required();
  sweep->add_option("--values", sweep_values, "Values to sweep over")
      ->required()
      ->expected(-1);
  sweep->callback([&] { cmd_sweep(sweep_opts, sweep_parameter, sweep_values); });

  BaseOptions compare_opts;
  std::vector<std::string> compare_names;
  CLI::App* compare = app.add_subcommand(
      "compare", "Rank presets by median convergence step; writes compare.csv");
  add_experiment_options(compare, compare_opts);
  compare->add_option("presets", compare_names, "Benchmark preset names")
      ->required()
      ->expected(-1);
  compare->callback([&] { cmd_compare(compare_opts, compare_names); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const lasim::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
