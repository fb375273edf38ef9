// SPDX-License-Identifier: Apache-2.0
//
// Reinforcement scheme update rules behind one uniform step interface.
//
// Direct linear schemes (state is the probability vector alone):
//
//   LRI   reward:  p_i += a(1-p_i),  p_j *= (1-a)   for j != i
//         penalty: no change
//   LRP   reward:  as LRI with step a
//         penalty: p_i *= (1-b),     p_j = b/(r-1) + (1-b)p_j
//   LREP  identical to LRP with b restricted to be small relative to a
//
// Estimator schemes (state additionally carries per-action statistics; the
// probability vector is pulled a step lambda toward the unit vector of the
// currently-best-looking action):
//
//   Pursuit        best = argmax of sample means  reward_counts/attempts
//   MultiFixed     best = argmax over actions of the grid model with the
//                  highest Bernoulli likelihood  q^n1 (1-q)^(n-n1)
//   MultiAdaptive  a bank of exponentially-weighted estimators per action,
//                  scored by the running predictive log-likelihood of that
//                  action's response sequence; the best-scoring model's value
//                  represents the action
//
// Estimator schemes need every action attempted before their statistics mean
// anything, so scheme_step forces a round-robin warm-up (init_pulls pulls per
// action) during which the probability vector is left untouched.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lasim/environment.hpp"
#include "lasim/probability.hpp"
#include "lasim/rng.hpp"

namespace lasim {

enum class SchemeKind { lri, lrp, lrep, pursuit, multi_fixed, multi_adaptive };

inline bool is_estimator_kind(SchemeKind kind) {
  return kind == SchemeKind::pursuit || kind == SchemeKind::multi_fixed ||
         kind == SchemeKind::multi_adaptive;
}

struct SchemeConfig {
  SchemeKind kind = SchemeKind::lri;
  double a = 0.0;       // reward step, direct schemes
  double b = 0.0;       // penalty step, LRP/LREP
  double lambda = 0.0;  // pursuit step, estimator schemes
  std::vector<double> model_grid;  // MultiFixed: q_1 < ... < q_m in (0,1)
  std::vector<double> gains;       // MultiAdaptive: per-model gains in (0,1]
  std::size_t init_pulls = 1;      // estimator warm-up pulls per action

  static SchemeConfig lri_scheme(double a) {
    SchemeConfig c;
    c.kind = SchemeKind::lri;
    c.a = a;
    c.validate();
    return c;
  }
  static SchemeConfig lrp_scheme(double a, double b) {
    SchemeConfig c;
    c.kind = SchemeKind::lrp;
    c.a = a;
    c.b = b;
    c.validate();
    return c;
  }
  static SchemeConfig lrep_scheme(double a, double b) {
    SchemeConfig c;
    c.kind = SchemeKind::lrep;
    c.a = a;
    c.b = b;
    c.validate();
    return c;
  }
  static SchemeConfig pursuit_scheme(double lambda, std::size_t init_pulls = 1) {
    SchemeConfig c;
    c.kind = SchemeKind::pursuit;
    c.lambda = lambda;
    c.init_pulls = init_pulls;
    c.validate();
    return c;
  }
  static SchemeConfig multi_fixed_scheme(double lambda,
                                         std::vector<double> grid,
                                         std::size_t init_pulls = 1) {
    SchemeConfig c;
    c.kind = SchemeKind::multi_fixed;
    c.lambda = lambda;
    c.model_grid = std::move(grid);
    c.init_pulls = init_pulls;
    c.validate();
    return c;
  }
  static SchemeConfig multi_adaptive_scheme(double lambda,
                                            std::vector<double> gains,
                                            std::size_t init_pulls = 1) {
    SchemeConfig c;
    c.kind = SchemeKind::multi_adaptive;
    c.lambda = lambda;
    c.gains = std::move(gains);
    c.init_pulls = init_pulls;
    c.validate();
    return c;
  }

  void validate() const {
    switch (kind) {
      case SchemeKind::lri:
        require(a > 0.0 && a < 1.0, "a", "must be in (0,1)");
        break;
      case SchemeKind::lrp:
        require(a > 0.0 && a < 1.0, "a", "must be in (0,1)");
        require(b >= 0.0 && b < 1.0, "b", "must be in [0,1)");
        break;
      case SchemeKind::lrep:
        require(a > 0.0 && a < 1.0, "a", "must be in (0,1)");
        require(b >= 0.0 && b < 1.0, "b", "must be in [0,1)");
        require(b < a, "b", "must be smaller than a for LREP");
        break;
      case SchemeKind::pursuit:
        require(lambda > 0.0 && lambda < 1.0, "lambda", "must be in (0,1)");
        require(init_pulls >= 1, "init_pulls", "must be >= 1");
        break;
      case SchemeKind::multi_fixed: {
        require(lambda > 0.0 && lambda < 1.0, "lambda", "must be in (0,1)");
        require(init_pulls >= 1, "init_pulls", "must be >= 1");
        require(!model_grid.empty(), "model_grid", "must be non-empty");
        double prev = 0.0;
        for (double q : model_grid) {
          require(q > 0.0 && q < 1.0, "model_grid",
                  "entries must be in the open interval (0,1)");
          require(q > prev, "model_grid", "must be strictly increasing");
          prev = q;
        }
        break;
      }
      case SchemeKind::multi_adaptive:
        require(lambda > 0.0 && lambda < 1.0, "lambda", "must be in (0,1)");
        require(init_pulls >= 1, "init_pulls", "must be >= 1");
        require(!gains.empty(), "gains", "must be non-empty");
        for (double g : gains) {
          require(g > 0.0 && g <= 1.0, "gains", "entries must be in (0,1]");
        }
        break;
    }
  }

  bool is_estimator() const { return is_estimator_kind(kind); }

 private:
  static void require(bool ok, const char* param, const char* what) {
    if (!ok) {
      throw std::invalid_argument(std::string("SchemeConfig: parameter '") +
                                  param + "' " + what);
    }
  }
};

// Mutable per-run state. attempts/reward_counts are kept for every kind so
// that sum(attempts) == step_index holds globally; estimates/model_loglik are
// allocated for MultiAdaptive only.
struct SchemeState {
  ActionProbabilities p;
  std::vector<std::uint64_t> attempts;
  std::vector<std::uint64_t> reward_counts;
  std::vector<std::vector<double>> estimates;     // [action][model]
  std::vector<std::vector<double>> model_loglik;  // [action][model]
  std::uint64_t step_index = 0;

  static SchemeState initial(const SchemeConfig& config,
                             std::size_t num_actions) {
    config.validate();
    SchemeState s{ActionProbabilities::uniform(num_actions),
                  std::vector<std::uint64_t>(num_actions, 0),
                  std::vector<std::uint64_t>(num_actions, 0),
                  {},
                  {},
                  0};
    if (config.kind == SchemeKind::multi_adaptive) {
      // Estimators start at the uninformative midpoint.
      s.estimates.assign(num_actions,
                         std::vector<double>(config.gains.size(), 0.5));
      s.model_loglik.assign(num_actions,
                            std::vector<double>(config.gains.size(), 0.0));
    }
    return s;
  }

  bool initialized() const {
    for (std::uint64_t n : attempts) {
      if (n == 0) return false;
    }
    return true;
  }
};

struct StepRecord {
  std::uint64_t step;   // the n at which the action was chosen (0-based)
  std::size_t action;
  Response response;
  ActionProbabilities p_after;  // p(n+1)
};

namespace detail {

inline void check_action_index(std::size_t action, std::size_t r) {
  if (action >= r) {
    throw std::out_of_range("schemes: action " + std::to_string(action) +
                            " out of range [0," + std::to_string(r) + ")");
  }
}

inline void check_initialized(const SchemeState& state) {
  if (!state.initialized()) {
    throw std::logic_error(
        "schemes: estimator update before every action was attempted "
        "(warm-up phase incomplete)");
  }
}

inline void record_outcome(SchemeState& state, std::size_t action,
                           Response response) {
  state.attempts[action] += 1;
  state.reward_counts[action] += is_reward(response) ? 1 : 0;
  state.step_index += 1;
}

// p <- (1-lambda) p + lambda e_target. The selected component is written as
// p + lambda(1-p) so the contraction identity holds bit-for-bit.
inline void pursue_toward(ActionProbabilities& p, std::size_t target,
                          double lambda) {
  std::vector<double> next(p.values());
  for (std::size_t j = 0; j < next.size(); ++j) {
    next[j] = (1.0 - lambda) * next[j];
  }
  next[target] = p[target] + lambda * (1.0 - p[target]);
  p = ActionProbabilities(std::move(next));
}

inline std::size_t argmax_lowest(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace detail

// Linear reward-inaction. Penalties are ignored; a reward moves mass from all
// other actions onto the chosen one.
inline ActionProbabilities lri_update(const ActionProbabilities& p,
                                      std::size_t action, Response response,
                                      double a) {
  detail::check_action_index(action, p.size());
  if (!(a > 0.0 && a < 1.0)) {
    throw std::invalid_argument("lri_update: step size a must be in (0,1)");
  }
  if (!is_reward(response)) return p;
  std::vector<double> next(p.values());
  for (std::size_t j = 0; j < next.size(); ++j) {
    next[j] = (1.0 - a) * next[j];
  }
  next[action] = p[action] + a * (1.0 - p[action]);
  return ActionProbabilities(std::move(next));
}

// Linear reward-penalty. Rewards behave exactly like lri_update; a penalty on
// action i takes the fraction b from p_i and spreads it evenly over the other
// r-1 actions: sum = (1-b) sum p + b = 1. With b = 0 the penalty branch is the
// identity, so lrp_update reduces bit-exactly to lri_update.
inline ActionProbabilities lrp_update(const ActionProbabilities& p,
                                      std::size_t action, Response response,
                                      double a, double b) {
  detail::check_action_index(action, p.size());
  if (!(a > 0.0 && a < 1.0)) {
    throw std::invalid_argument("lrp_update: step size a must be in (0,1)");
  }
  if (!(b >= 0.0 && b < 1.0)) {
    throw std::invalid_argument("lrp_update: step size b must be in [0,1)");
  }
  if (is_reward(response)) return lri_update(p, action, response, a);
  std::vector<double> next(p.values());
  double share = b / static_cast<double>(p.size() - 1);
  for (std::size_t j = 0; j < next.size(); ++j) {
    next[j] = share + (1.0 - b) * next[j];
  }
  next[action] = (1.0 - b) * p[action];
  return ActionProbabilities(std::move(next));
}

// Pursuit step: record the response, then pull p toward the unit vector of
// the action with the best sample-mean reward estimate (lowest index on ties).
// lambda is accepted on [0,1] so the degenerate endpoints stay testable;
// SchemeConfig restricts it to (0,1).
inline void pursuit_update(SchemeState& state, std::size_t action,
                           Response response, double lambda) {
  detail::check_action_index(action, state.p.size());
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("pursuit_update: lambda must be in [0,1]");
  }
  detail::check_initialized(state);
  detail::record_outcome(state, action, response);
  std::vector<double> means(state.p.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    means[i] = static_cast<double>(state.reward_counts[i]) /
               static_cast<double>(state.attempts[i]);
  }
  detail::pursue_toward(state.p, detail::argmax_lowest(means), lambda);
}

struct MfmSelection {
  std::vector<double> best_model;  // q-hat per action
  std::size_t action;              // argmax of best_model, lowest index on ties
};

// For each action, picks the grid model maximizing the Bernoulli
// log-likelihood n1 ln q + (n-n1) ln(1-q), then selects the action whose best
// model is largest. Log space avoids the underflow of q^n1 (1-q)^(n-n1) for
// large n; long double keeps near-tie model pairs (e.g. symmetric grids with
// balanced counts, true gaps ~ n ulp) correctly ordered.
inline MfmSelection mfm_select(std::span<const std::uint64_t> attempts,
                               std::span<const std::uint64_t> reward_counts,
                               std::span<const double> grid) {
  if (grid.empty()) {
    throw std::invalid_argument("mfm_select: empty model grid");
  }
  double prev = 0.0;
  for (double q : grid) {
    if (!(q > 0.0 && q < 1.0) || !(q > prev)) {
      throw std::invalid_argument(
          "mfm_select: grid must be strictly increasing within (0,1)");
    }
    prev = q;
  }
  if (attempts.size() != reward_counts.size() || attempts.empty()) {
    throw std::invalid_argument("mfm_select: mismatched count vectors");
  }

  std::vector<long double> log_q(grid.size()), log_1mq(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    log_q[k] = std::log(static_cast<long double>(grid[k]));
    log_1mq[k] = std::log(1.0L - static_cast<long double>(grid[k]));
  }

  MfmSelection sel;
  sel.best_model.resize(attempts.size());
  for (std::size_t i = 0; i < attempts.size(); ++i) {
    if (attempts[i] == 0) {
      throw std::logic_error("mfm_select: action " + std::to_string(i) +
                             " has no attempts yet");
    }
    if (reward_counts[i] > attempts[i]) {
      throw std::invalid_argument("mfm_select: reward count exceeds attempts");
    }
    long double n1 = static_cast<long double>(reward_counts[i]);
    long double n0 = static_cast<long double>(attempts[i] - reward_counts[i]);
    std::size_t best_k = 0;
    long double best_ll = n1 * log_q[0] + n0 * log_1mq[0];
    for (std::size_t k = 1; k < grid.size(); ++k) {
      long double ll = n1 * log_q[k] + n0 * log_1mq[k];
      if (ll > best_ll) {
        best_ll = ll;
        best_k = k;
      }
    }
    sel.best_model[i] = grid[best_k];
  }
  sel.action = detail::argmax_lowest(sel.best_model);
  return sel;
}

// Multiple-fixed-models step: record the response, then pursue the action
// selected by mfm_select.
inline void mfm_update(SchemeState& state, std::size_t action,
                       Response response, double lambda,
                       std::span<const double> grid) {
  detail::check_action_index(action, state.p.size());
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("mfm_update: lambda must be in [0,1]");
  }
  detail::check_initialized(state);
  detail::record_outcome(state, action, response);
  MfmSelection sel = mfm_select(state.attempts, state.reward_counts, grid);
  detail::pursue_toward(state.p, sel.action, lambda);
}

namespace detail {

// Scores the response against each of the chosen action's models
// (predictively, before the estimates see it), then adapts the estimates:
//   loglik  += ln e          on reward     (e clamped away from 0 and 1)
//           += ln (1 - e)    on penalty
//   e       += gain (beta - e)
inline void mam_observe(SchemeState& state, std::size_t action,
                        Response response, std::span<const double> gains) {
  constexpr double clamp_lo = 1e-12;
  constexpr double clamp_hi = 1.0 - 1e-12;
  double beta = is_reward(response) ? 1.0 : 0.0;
  auto& est = state.estimates[action];
  auto& ll = state.model_loglik[action];
  for (std::size_t k = 0; k < gains.size(); ++k) {
    double e = est[k];
    double ce = e < clamp_lo ? clamp_lo : (e > clamp_hi ? clamp_hi : e);
    ll[k] += is_reward(response) ? std::log(ce) : std::log(1.0 - ce);
    est[k] = e + gains[k] * (beta - e);
  }
  record_outcome(state, action, response);
}

}  // namespace detail

// Multiple-adaptive-models step. Each action is represented by the value of
// whichever of its models has predicted that action's response sequence best
// so far; p pursues the action with the largest representative estimate.
inline void mam_update(SchemeState& state, std::size_t action,
                       Response response, double lambda,
                       std::span<const double> gains) {
  detail::check_action_index(action, state.p.size());
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("mam_update: lambda must be in [0,1]");
  }
  if (gains.empty() || state.estimates.size() != state.p.size()) {
    throw std::invalid_argument("mam_update: state has no model bank");
  }
  detail::check_initialized(state);
  detail::mam_observe(state, action, response, gains);
  std::vector<double> representative(state.p.size());
  for (std::size_t i = 0; i < representative.size(); ++i) {
    const auto& ll = state.model_loglik[i];
    std::size_t best_k = 0;
    for (std::size_t k = 1; k < ll.size(); ++k) {
      if (ll[k] > ll[best_k]) best_k = k;
    }
    representative[i] = state.estimates[i][best_k];
  }
  detail::pursue_toward(state.p, detail::argmax_lowest(representative), lambda);
}

// One full automaton step: choose an action, query the environment, apply the
// kind-appropriate update. Estimator schemes spend their first
// init_pulls * r steps in a forced round-robin warm-up that feeds the
// statistics but leaves p untouched.
inline StepRecord scheme_step(SchemeState& state, const SchemeConfig& config,
                              const EnvironmentSpec& env, RngStream& rng) {
  config.validate();
  std::size_t r = env.num_actions();
  if (state.p.size() != r) {
    throw std::invalid_argument(
        "scheme_step: state and environment disagree on the action count");
  }
  if (config.kind == SchemeKind::multi_adaptive &&
      state.estimates.size() != r) {
    throw std::invalid_argument(
        "scheme_step: state was not initialized for MultiAdaptive");
  }

  std::uint64_t n = state.step_index;
  bool warmup = config.is_estimator() &&
                n < static_cast<std::uint64_t>(config.init_pulls) * r;
  std::size_t action =
      warmup ? static_cast<std::size_t>(n % r) : sample_action(state.p, rng);
  Response response = environment_respond(env, action, rng);

  switch (config.kind) {
    case SchemeKind::lri:
      state.p = lri_update(state.p, action, response, config.a);
      detail::record_outcome(state, action, response);
      break;
    case SchemeKind::lrp:
    case SchemeKind::lrep:
      state.p = lrp_update(state.p, action, response, config.a, config.b);
      detail::record_outcome(state, action, response);
      break;
    case SchemeKind::pursuit:
      if (warmup) {
        detail::record_outcome(state, action, response);
      } else {
        pursuit_update(state, action, response, config.lambda);
      }
      break;
    case SchemeKind::multi_fixed:
      if (warmup) {
        detail::record_outcome(state, action, response);
      } else {
        mfm_update(state, action, response, config.lambda, config.model_grid);
      }
      break;
    case SchemeKind::multi_adaptive:
      if (warmup) {
        detail::mam_observe(state, action, response, config.gains);
      } else {
        mam_update(state, action, response, config.lambda, config.gains);
      }
      break;
  }
  return StepRecord{n, action, response, state.p};
}

}  // namespace lasim
