// SPDX-License-Identifier: Apache-2.0
//
// Estimator scheme on a custom environment: five actions, a model grid that
// brackets the true reward probabilities, and early stopping at the first
// threshold crossing.
//
//   g++ -std=c++20 -O2 -I../include -I../vendor custom_environment.cpp -o demo

#include <cstdio>

#include "lasim/lasim.hpp"

int main() {
  // Action 2 is optimal. The grid need not contain the true values; each
  // action is matched to the grid point its empirical record fits best.
  lasim::EnvironmentSpec env({0.55, 0.3, 0.75, 0.6, 0.45});
  lasim::SchemeConfig scheme = lasim::SchemeConfig::multi_fixed_scheme(
      0.02, {0.1, 0.3, 0.5, 0.7, 0.9});

  lasim::ExperimentConfig config(env, scheme);
  config.steps = 10000;
  config.runs = 100;
  config.master_seed = 7;
  config.record_stride = 50;
  config.criterion.threshold = 0.99;
  config.stop_on_convergence = true;

  lasim::ExperimentResult result = lasim::run_experiment(config);

  const lasim::ExperimentSummary& s = result.summary;
  std::printf("converged %.0f%%, wrong %.1f%%\n", 100.0 * s.converged_fraction,
              100.0 * s.wrong_fraction);
  std::printf("converged step: median %.0f, p10 %.0f, p90 %.0f\n",
              s.step_stats.median, s.step_stats.percentile_10,
              s.step_stats.percentile_90);

  // With stop_on_convergence each trace ends at its crossing step.
  const lasim::RunTrace& first = result.traces[0];
  const lasim::StepRecord& last = first.records.back();
  std::printf("run 0 stopped at step %llu with p = (",
              static_cast<unsigned long long>(last.step));
  for (std::size_t i = 0; i < last.p_after.size(); ++i) {
    std::printf("%s%.3f", i ? ", " : "", last.p_after[i]);
  }
  std::printf(")\n");
  return 0;
}
