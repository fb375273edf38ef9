// SPDX-License-Identifier: Apache-2.0
//
// Norms-of-behavior computations: expected reward M(n) = sum p_i d_i, the
// pure-chance baseline M0 = (1/r) sum d_i, a one-step conditional-expectation
// oracle for absolute expediency checks, convergence detection on recorded
// traces, and Monte Carlo aggregation.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lasim/environment.hpp"
#include "lasim/probability.hpp"
#include "lasim/schemes.hpp"

namespace lasim {

enum class ConvergenceTarget { optimal_only, any_action };

struct ConvergenceCriterion {
  double threshold = 0.95;
  ConvergenceTarget target = ConvergenceTarget::any_action;

  void validate() const {
    if (!(threshold > 0.0 && threshold < 1.0)) {
      throw std::invalid_argument(
          "ConvergenceCriterion: threshold must be in (0,1)");
    }
  }
};

// Outcome of a single run. correct is meaningful only when converged_step is
// present. final_expected_reward is filled by callers that know the
// environment (detect_convergence sees only the trace and leaves it NaN).
struct RunOutcome {
  std::optional<std::uint64_t> converged_step;
  std::optional<std::size_t> converged_action;
  bool correct = false;
  double final_expected_reward = std::numeric_limits<double>::quiet_NaN();

  bool converged() const { return converged_step.has_value(); }
};

inline double expected_reward(const ActionProbabilities& p,
                              const EnvironmentSpec& env) {
  if (p.size() != env.num_actions()) {
    throw std::invalid_argument(
        "expected_reward: p and environment have different action counts");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    m += p[i] * env.reward_probability(i);
  }
  return m;
}

// Delegates to expected_reward at uniform p so the identity
// baseline_reward(env) == expected_reward(uniform, env) holds bit-for-bit.
inline double baseline_reward(const EnvironmentSpec& env) {
  return expected_reward(ActionProbabilities::uniform(env.num_actions()), env);
}

// Exact E[M(n+1) | p(n)] for the closed-form schemes, by enumerating all
// (action, response) branches: weight p_i d_i for a reward on action i,
// p_i (1 - d_i) for a penalty. Zero-weight branches are skipped, and when
// every reachable branch lands on the same M the common value is returned
// directly, so degenerate cases (a = b = 0, absorbing unit vectors) come out
// exact rather than perturbed by the weighted summation.
inline double one_step_expected_reward(const SchemeConfig& config,
                                       const ActionProbabilities& p,
                                       const EnvironmentSpec& env) {
  if (config.is_estimator()) {
    throw std::invalid_argument(
        "one_step_expected_reward: estimator schemes depend on count history, "
        "not on p alone; only LRI/LRP/LREP are supported");
  }
  if (p.size() != env.num_actions()) {
    throw std::invalid_argument(
        "one_step_expected_reward: p and environment have different action "
        "counts");
  }
  if (!(config.a >= 0.0 && config.a < 1.0)) {
    throw std::invalid_argument("one_step_expected_reward: a must be in [0,1)");
  }
  if (!(config.b >= 0.0 && config.b < 1.0)) {
    throw std::invalid_argument("one_step_expected_reward: b must be in [0,1)");
  }
  bool penalty_acts = config.kind != SchemeKind::lri && config.b != 0.0;

  double acc = 0.0;
  double common = 0.0;
  bool have_common = false;
  bool all_same = true;
  auto visit = [&](double weight, double value) {
    if (!have_common) {
      common = value;
      have_common = true;
    } else if (value != common) {
      all_same = false;
    }
    acc += weight * value;
  };

  for (std::size_t i = 0; i < p.size(); ++i) {
    double pi = p[i];
    if (pi == 0.0) continue;
    double di = env.reward_probability(i);
    double weight_reward = pi * di;
    if (weight_reward != 0.0) {
      ActionProbabilities next =
          config.a == 0.0 ? p : lri_update(p, i, Response::reward, config.a);
      visit(weight_reward, expected_reward(next, env));
    }
    double weight_penalty = pi * (1.0 - di);
    if (weight_penalty != 0.0) {
      ActionProbabilities next =
          penalty_acts ? lrp_update(p, i, Response::penalty, config.a, config.b)
                       : p;
      visit(weight_penalty, expected_reward(next, env));
    }
  }
  return all_same ? common : acc;
}

// The action whose probability reaches the threshold in p, if any (lowest
// index when several qualify at once).
inline std::optional<std::size_t> crossing_action(
    const ActionProbabilities& p, const ConvergenceCriterion& criterion,
    std::size_t opt_index) {
  if (criterion.target == ConvergenceTarget::optimal_only) {
    if (p[opt_index] >= criterion.threshold) return opt_index;
    return std::nullopt;
  }
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] >= criterion.threshold) return j;
  }
  return std::nullopt;
}

// Scans the trace in order and reports the first record whose probability
// vector reaches the threshold. First-crossing semantics: the outcome stands
// even if an ergodic scheme later wanders away from the crossed action.
inline RunOutcome detect_convergence(std::span<const StepRecord> trace,
                                     const ConvergenceCriterion& criterion,
                                     std::size_t opt_index) {
  criterion.validate();
  if (trace.empty()) {
    throw std::invalid_argument("detect_convergence: empty trace");
  }
  if (opt_index >= trace.front().p_after.size()) {
    throw std::out_of_range("detect_convergence: opt_index out of range");
  }
  RunOutcome outcome;
  for (const StepRecord& rec : trace) {
    if (auto j = crossing_action(rec.p_after, criterion, opt_index)) {
      outcome.converged_step = rec.step;
      outcome.converged_action = *j;
      break;
    }
  }
  outcome.correct =
      outcome.converged_action && *outcome.converged_action == opt_index;
  return outcome;
}

// Statistics of converged_step over the converged runs only; count says how
// many runs the quantiles describe. All NaN when nothing converged.
struct ConvergenceStepStats {
  std::uint64_t count = 0;
  double median = std::numeric_limits<double>::quiet_NaN();
  double mean = std::numeric_limits<double>::quiet_NaN();
  double percentile_10 = std::numeric_limits<double>::quiet_NaN();
  double percentile_90 = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentSummary {
  std::size_t num_runs = 0;
  double converged_fraction = 0.0;
  double wrong_fraction = 0.0;  // converged to a non-optimal action, over all runs
  ConvergenceStepStats step_stats;
  double mean_final_reward = std::numeric_limits<double>::quiet_NaN();
  double epsilon = std::numeric_limits<double>::quiet_NaN();  // d_opt - mean_final_reward
  double duration_seconds = 0.0;  // in-memory only, never serialized
};

namespace detail {

// Linear interpolation at rank q(n-1) of an ascending sample.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  double pos = q * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace detail

inline ExperimentSummary summarize(std::span<const RunOutcome> outcomes,
                                   const EnvironmentSpec& env) {
  if (outcomes.empty()) {
    throw std::invalid_argument("summarize: no outcomes to aggregate");
  }
  ExperimentSummary s;
  s.num_runs = outcomes.size();

  std::vector<double> steps;
  steps.reserve(outcomes.size());
  std::size_t wrong = 0;
  double reward_sum = 0.0;
  for (const RunOutcome& o : outcomes) {
    if (o.converged()) {
      steps.push_back(static_cast<double>(*o.converged_step));
      if (!o.correct) wrong += 1;
    }
    reward_sum += o.final_expected_reward;
  }
  s.converged_fraction =
      static_cast<double>(steps.size()) / static_cast<double>(s.num_runs);
  s.wrong_fraction =
      static_cast<double>(wrong) / static_cast<double>(s.num_runs);
  s.mean_final_reward = reward_sum / static_cast<double>(s.num_runs);
  s.epsilon = env.opt_reward() - s.mean_final_reward;

  if (!steps.empty()) {
    std::sort(steps.begin(), steps.end());
    s.step_stats.count = steps.size();
    std::size_t n = steps.size();
    s.step_stats.median = n % 2 == 1
                              ? steps[n / 2]
                              : 0.5 * (steps[n / 2 - 1] + steps[n / 2]);
    double sum = 0.0;
    for (double v : steps) sum += v;
    s.step_stats.mean = sum / static_cast<double>(n);
    s.step_stats.percentile_10 = detail::quantile_sorted(steps, 0.10);
    s.step_stats.percentile_90 = detail::quantile_sorted(steps, 0.90);
  }
  return s;
}

}  // namespace lasim
