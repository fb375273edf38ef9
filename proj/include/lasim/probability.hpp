// SPDX-License-Identifier: Apache-2.0
//
// Action probability vectors and categorical sampling.
//
// ActionProbabilities is the automaton's state for the direct schemes: a
// distribution over r >= 2 actions that must stay on the probability simplex
// after every update. The linear updates conserve probability mass exactly in
// real arithmetic; in doubles the sum drifts by a few ulps per step, so the
// constructor renormalizes drift above 1e-12 and rejects anything that is off
// by more than the 1e-9 validity tolerance (a genuine logic bug, not drift).

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lasim/rng.hpp"

namespace lasim {

enum class Response : std::uint8_t { penalty = 0, reward = 1 };

inline bool is_reward(Response r) { return r == Response::reward; }

class ActionProbabilities {
 public:
  static constexpr double simplex_tolerance = 1e-9;
  static constexpr double renormalize_drift = 1e-12;

  explicit ActionProbabilities(std::vector<double> values)
      : values_(std::move(values)) {
    double sum = 0.0;
    for (double v : values_) sum += v;
    double drift = std::abs(sum - 1.0);
    if (drift > renormalize_drift && drift <= simplex_tolerance) {
      for (double& v : values_) v /= sum;
    }
    validate();
  }

  static ActionProbabilities uniform(std::size_t num_actions) {
    if (num_actions < 2) {
      throw std::invalid_argument(
          "ActionProbabilities: need at least 2 actions, got " +
          std::to_string(num_actions));
    }
    return ActionProbabilities(std::vector<double>(
        num_actions, 1.0 / static_cast<double>(num_actions)));
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  // Throws if the vector is off the simplex (size, range, or sum).
  void validate() const {
    if (values_.size() < 2) {
      throw std::invalid_argument(
          "ActionProbabilities: need at least 2 actions, got " +
          std::to_string(values_.size()));
    }
    double sum = 0.0;
    for (double v : values_) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument(
            "ActionProbabilities: element " + std::to_string(v) +
            " outside [0,1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > simplex_tolerance) {
      throw std::invalid_argument(
          "ActionProbabilities: elements sum to " + std::to_string(sum) +
          ", not 1 within 1e-9");
    }
  }

  bool operator==(const ActionProbabilities& other) const = default;

 private:
  std::vector<double> values_;
};

// Draws an action index i with probability p_i using cumulative-sum inversion.
// Consumes exactly one uniform draw. The last bucket absorbs any rounding
// slack so a valid sample is returned even when the sum is 1 +- 1e-9.
inline std::size_t sample_action(const ActionProbabilities& p,
                                 RngStream& rng) {
  p.validate();
  double u = rng.next_double();
  double cum = 0.0;
  std::size_t last = p.size() - 1;
  for (std::size_t i = 0; i < last; ++i) {
    cum += p[i];
    if (u < cum) return i;
  }
  return last;
}

}  // namespace lasim
