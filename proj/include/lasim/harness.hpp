// SPDX-License-Identifier: Apache-2.0
//
// Deterministic Monte Carlo experiment runner. Every run owns its own RNG
// stream, derived from (master_seed, run_index), so runs are independent and
// the aggregate is identical no matter how many workers execute them or in
// which order.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "lasim/environment.hpp"
#include "lasim/metrics.hpp"
#include "lasim/rng.hpp"
#include "lasim/schemes.hpp"

namespace lasim {

struct ExperimentConfig {
  ExperimentConfig(EnvironmentSpec environment, SchemeConfig scheme_config)
      : env(std::move(environment)), scheme(std::move(scheme_config)) {}

  EnvironmentSpec env;
  SchemeConfig scheme;
  std::uint64_t steps = 1;
  std::uint64_t runs = 1;
  std::uint64_t master_seed = 0;
  ConvergenceCriterion criterion;
  std::uint64_t record_stride = 1;
  // Runs execute to the full horizon by default so ergodic schemes'
  // distributional behavior stays observable; enable to stop each run at its
  // first threshold crossing.
  bool stop_on_convergence = false;

  void validate() const {
    if (steps < 1) {
      throw std::invalid_argument("ExperimentConfig: steps must be >= 1");
    }
    if (runs < 1) {
      throw std::invalid_argument("ExperimentConfig: runs must be >= 1");
    }
    if (record_stride < 1) {
      throw std::invalid_argument(
          "ExperimentConfig: record_stride must be >= 1");
    }
    criterion.validate();
    scheme.validate();
  }
};

// Recorded sample path of one run: every record_stride-th step plus the final
// step. The outcome is computed from the full-resolution step sequence before
// thinning, so converged_step is exact regardless of stride.
struct RunTrace {
  std::uint64_t run_index = 0;
  std::vector<StepRecord> records;
  RunOutcome outcome;
};

inline RunTrace run_single(const ExperimentConfig& config,
                           std::uint64_t run_index) {
  config.validate();
  RngStream rng = derive_stream(config.master_seed, run_index);
  SchemeState state =
      SchemeState::initial(config.scheme, config.env.num_actions());

  std::vector<StepRecord> full;
  full.reserve(static_cast<std::size_t>(
      std::min<std::uint64_t>(config.steps, std::uint64_t{1} << 20)));
  std::size_t opt = config.env.opt_index();
  for (std::uint64_t n = 0; n < config.steps; ++n) {
    full.push_back(scheme_step(state, config.scheme, config.env, rng));
    if (config.stop_on_convergence &&
        crossing_action(full.back().p_after, config.criterion, opt)) {
      break;
    }
  }

  RunTrace trace;
  trace.run_index = run_index;
  trace.outcome = detect_convergence(full, config.criterion, opt);
  trace.outcome.final_expected_reward =
      expected_reward(full.back().p_after, config.env);

  trace.records.reserve(full.size() / config.record_stride + 2);
  for (std::size_t k = 0; k < full.size(); ++k) {
    if (full[k].step % config.record_stride == 0 || k + 1 == full.size()) {
      trace.records.push_back(std::move(full[k]));
    }
  }
  return trace;
}

struct ExperimentResult {
  ExperimentSummary summary;
  std::vector<RunTrace> traces;  // ordered by run_index
};

// Executes runs 0..runs-1, on `workers` threads when workers > 1. Each worker
// claims the next unclaimed run index and writes into that run's dedicated
// slot; aggregation happens afterwards in index order, so the result is
// byte-identical for any worker count. A failing run surfaces as an error
// naming the lowest failing run_index.
inline ExperimentResult run_experiment(const ExperimentConfig& config,
                                       unsigned workers = 1) {
  config.validate();
  auto t0 = std::chrono::steady_clock::now();

  std::vector<RunTrace> traces(static_cast<std::size_t>(config.runs));
  std::mutex failure_mutex;
  std::optional<std::uint64_t> failed_index;
  std::string failure_message;
  auto note_failure = [&](std::uint64_t index, const std::string& message) {
    std::lock_guard<std::mutex> lock(failure_mutex);
    if (!failed_index || index < *failed_index) {
      failed_index = index;
      failure_message = message;
    }
  };
  auto execute = [&](std::uint64_t index) {
    try {
      traces[static_cast<std::size_t>(index)] = run_single(config, index);
    } catch (const std::exception& e) {
      note_failure(index, e.what());
    }
  };

  if (workers <= 1 || config.runs == 1) {
    for (std::uint64_t i = 0; i < config.runs; ++i) execute(i);
  } else {
    std::atomic<std::uint64_t> next{0};
    auto worker_loop = [&] {
      for (;;) {
        std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= config.runs) return;
        execute(i);
      }
    };
    std::size_t thread_count = static_cast<std::size_t>(
        std::min<std::uint64_t>(workers, config.runs));
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (std::size_t t = 0; t < thread_count; ++t) {
      pool.emplace_back(worker_loop);
    }
    for (std::thread& t : pool) t.join();
  }

  if (failed_index) {
    throw std::runtime_error("run_experiment: run " +
                             std::to_string(*failed_index) +
                             " failed: " + failure_message);
  }

  std::vector<RunOutcome> outcomes;
  outcomes.reserve(traces.size());
  for (const RunTrace& t : traces) outcomes.push_back(t.outcome);

  ExperimentResult result;
  result.summary = summarize(outcomes, config.env);
  result.summary.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  result.traces = std::move(traces);
  return result;
}

}  // namespace lasim
