// SPDX-License-Identifier: Apache-2.0
//
// Stationary random environments with binary feedback. Each action i has a
// fixed reward probability d_i; the environment answers every query with
// reward (probability d_i) or penalty, independently across steps.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lasim/probability.hpp"
#include "lasim/rng.hpp"

namespace lasim {

class EnvironmentSpec {
 public:
  explicit EnvironmentSpec(std::vector<double> rewards)
      : rewards_(std::move(rewards)) {
    if (rewards_.empty()) {
      throw std::invalid_argument("EnvironmentSpec: needs at least one action");
    }
    for (double d : rewards_) {
      if (!(d >= 0.0 && d <= 1.0)) {
        throw std::invalid_argument("EnvironmentSpec: reward probability " +
                                    std::to_string(d) + " outside [0,1]");
      }
    }
    // Ties broken by lowest index.
    opt_index_ = 0;
    for (std::size_t i = 1; i < rewards_.size(); ++i) {
      if (rewards_[i] > rewards_[opt_index_]) opt_index_ = i;
    }
  }

  std::size_t num_actions() const { return rewards_.size(); }
  const std::vector<double>& rewards() const { return rewards_; }
  double reward_probability(std::size_t action) const {
    check_action(action);
    return rewards_[action];
  }
  std::size_t opt_index() const { return opt_index_; }
  double opt_reward() const { return rewards_[opt_index_]; }

  void check_action(std::size_t action) const {
    if (action >= rewards_.size()) {
      throw std::out_of_range("EnvironmentSpec: action " +
                              std::to_string(action) + " out of range [0," +
                              std::to_string(rewards_.size()) + ")");
    }
  }

 private:
  std::vector<double> rewards_;
  std::size_t opt_index_;
};

// One environment query. Consumes one uniform draw; reward iff u < d_action,
// so d=1 always rewards and d=0 never does.
inline Response environment_respond(const EnvironmentSpec& env,
                                    std::size_t action, RngStream& rng) {
  env.check_action(action);
  return rng.next_double() < env.reward_probability(action)
             ? Response::reward
             : Response::penalty;
}

}  // namespace lasim
