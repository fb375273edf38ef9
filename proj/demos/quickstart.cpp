// SPDX-License-Identifier: Apache-2.0
//
// Minimal tour of the library: build an environment, pick a scheme, run a
// replicated experiment, inspect one sample path and the aggregate.
//
//   g++ -std=c++20 -O2 -I../include -I../vendor quickstart.cpp -o quickstart

#include <cstdio>

#include "lasim/lasim.hpp"

int main() {
  // Two-action environment: action 0 rewards 70% of the time, action 1 40%.
  lasim::EnvironmentSpec env({0.7, 0.4});

  // Linear reward-inaction with step size 0.015, 20 replications.
  lasim::ExperimentConfig config(env, lasim::SchemeConfig::lri_scheme(0.015));
  config.steps = 5000;
  config.runs = 20;
  config.master_seed = 42;
  config.record_stride = 100;

  lasim::ExperimentResult result = lasim::run_experiment(config);

  std::printf("p(optimal action) along run 0:\n");
  for (const lasim::StepRecord& rec : result.traces[0].records) {
    if (rec.step % 1000 == 0) {
      std::printf("  step %5llu: p_opt = %.4f\n",
                  static_cast<unsigned long long>(rec.step),
                  rec.p_after[env.opt_index()]);
    }
  }

  const lasim::ExperimentSummary& s = result.summary;
  std::printf("converged: %.0f%% of %zu runs, median step %.0f\n",
              100.0 * s.converged_fraction, s.num_runs, s.step_stats.median);
  std::printf("mean final reward %.4f (epsilon %.4f)\n", s.mean_final_reward,
              s.epsilon);
  return 0;
}
