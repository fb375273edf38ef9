// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lasim/harness.hpp"
#include "lasim/metrics.hpp"
#include "lasim/rng.hpp"
#include "lasim/schemes.hpp"

using lasim::ActionProbabilities;
using lasim::ConvergenceCriterion;
using lasim::ConvergenceTarget;
using lasim::EnvironmentSpec;
using lasim::Response;
using lasim::RngStream;
using lasim::RunOutcome;
using lasim::SchemeConfig;
using lasim::SchemeKind;
using lasim::StepRecord;

namespace {

StepRecord make_record(std::uint64_t step, std::vector<double> p) {
  return StepRecord{step, 0, Response::penalty,
                    ActionProbabilities(std::move(p))};
}

RunOutcome converged_at(std::uint64_t step, bool correct, double reward) {
  RunOutcome o;
  o.converged_step = step;
  o.converged_action = correct ? 0 : 1;
  o.correct = correct;
  o.final_expected_reward = reward;
  return o;
}

}  // namespace

TEST_CASE("expected_reward is the probability-weighted reward rate") {
  EnvironmentSpec env({0.7, 0.4});
  CHECK(lasim::expected_reward(ActionProbabilities({1.0, 0.0}), env) == 0.7);
  CHECK(lasim::expected_reward(ActionProbabilities::uniform(2), env) ==
        lasim::baseline_reward(env));
  CHECK(lasim::expected_reward(ActionProbabilities::uniform(2), env) ==
        Catch::Approx(0.55).margin(1e-15));

  EnvironmentSpec env3({0.1, 0.5, 0.9});
  CHECK(lasim::expected_reward(ActionProbabilities({0.2, 0.3, 0.5}), env3) ==
        Catch::Approx(0.62).margin(1e-15));

  REQUIRE_THROWS_AS(
      lasim::expected_reward(ActionProbabilities::uniform(3), env),
      std::invalid_argument);
}

TEST_CASE("baseline_reward is the pure-chance rate") {
  CHECK(lasim::baseline_reward(EnvironmentSpec({0.7, 0.4})) ==
        Catch::Approx(0.55).margin(1e-15));
  // Two equal rewards halve and re-double exactly.
  CHECK(lasim::baseline_reward(EnvironmentSpec({0.7, 0.7})) == 0.7);
  CHECK(lasim::baseline_reward(EnvironmentSpec({0.5, 0.5, 0.5, 0.5})) == 0.5);
  CHECK(lasim::baseline_reward(EnvironmentSpec({0.0, 1.0})) == 0.5);
}

TEST_CASE("one_step_expected_reward enumerates the next-step branches") {
  EnvironmentSpec env({0.7, 0.4});

  SECTION("a = 0 leaves the expectation unchanged, bit for bit") {
    RngStream rng = lasim::derive_stream(33, 0);
    SchemeConfig config;
    config.kind = SchemeKind::lri;
    config.a = 0.0;
    for (int i = 0; i < 50; ++i) {
      std::vector<double> v(2);
      v[0] = 0.001 + 0.998 * rng.next_double();
      v[1] = 1.0 - v[0];
      ActionProbabilities p(v);
      REQUIRE(lasim::one_step_expected_reward(config, p, env) ==
              lasim::expected_reward(p, env));
    }
  }

  SECTION("absorbed states return the absorbed reward exactly") {
    SchemeConfig config = SchemeConfig::lri_scheme(0.1);
    ActionProbabilities p({1.0, 0.0});
    CHECK(lasim::one_step_expected_reward(config, p, env) == 0.7);
  }

  SECTION("worked LRI case") {
    // Four branches from p = (0.5, 0.5), a = 0.1:
    //   reward on 0  (weight 0.35): p' = (0.55, 0.45), M = 0.565
    //   penalty on 0 (weight 0.15): p unchanged,       M = 0.55
    //   reward on 1  (weight 0.20): p' = (0.45, 0.55), M = 0.535
    //   penalty on 1 (weight 0.30): p unchanged,       M = 0.55
    SchemeConfig config = SchemeConfig::lri_scheme(0.1);
    ActionProbabilities p({0.5, 0.5});
    const double value = lasim::one_step_expected_reward(config, p, env);
    CHECK(value == Catch::Approx(0.55225).margin(1e-12));
    CHECK(value > lasim::expected_reward(p, env));
  }

  SECTION("worked LRP case") {
    SchemeConfig config = SchemeConfig::lrp_scheme(0.1, 0.1);
    ActionProbabilities p({0.5, 0.5});
    CHECK(lasim::one_step_expected_reward(config, p, env) ==
          Catch::Approx(0.5545).margin(1e-12));
  }

  SECTION("a = b = 0 is exact for every closed-form kind") {
    ActionProbabilities p({0.3, 0.7});
    const double m = lasim::expected_reward(p, env);
    for (SchemeKind kind :
         {SchemeKind::lri, SchemeKind::lrp, SchemeKind::lrep}) {
      SchemeConfig config;
      config.kind = kind;
      config.a = 0.0;
      config.b = 0.0;
      REQUIRE(lasim::one_step_expected_reward(config, p, env) == m);
    }
  }

  SECTION("estimator kinds are rejected") {
    SchemeConfig config = SchemeConfig::pursuit_scheme(0.1);
    REQUIRE_THROWS_AS(lasim::one_step_expected_reward(
                          config, ActionProbabilities::uniform(2), env),
                      std::invalid_argument);
  }

  SECTION("parameter and shape validation") {
    SchemeConfig config;
    config.kind = SchemeKind::lri;
    config.a = 1.0;
    REQUIRE_THROWS_AS(lasim::one_step_expected_reward(
                          config, ActionProbabilities::uniform(2), env),
                      std::invalid_argument);
    config.a = 0.1;
    REQUIRE_THROWS_AS(lasim::one_step_expected_reward(
                          config, ActionProbabilities::uniform(3), env),
                      std::invalid_argument);
  }
}

TEST_CASE("LRI is absolutely expedient on interior states") {
  RngStream rng = lasim::derive_stream(34, 0);
  const std::vector<double> pool = {0.05, 0.1,  0.15, 0.2,  0.25, 0.3, 0.35,
                                    0.4,  0.45, 0.5,  0.55, 0.6,  0.65, 0.7,
                                    0.75, 0.8,  0.85, 0.9,  0.95};
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t r = 2 + static_cast<std::size_t>(rng.next_u64() % 5);

    std::vector<double> pool_copy = pool;
    std::vector<double> d(r);
    for (std::size_t i = 0; i < r; ++i) {
      std::size_t pick =
          static_cast<std::size_t>(rng.next_u64() % pool_copy.size());
      d[i] = pool_copy[pick];
      pool_copy.erase(pool_copy.begin() +
                      static_cast<std::ptrdiff_t>(pick));
    }
    EnvironmentSpec env(d);

    std::vector<double> v(r);
    double sum = 0.0;
    for (double& x : v) {
      x = 0.001 + rng.next_double();
      sum += x;
    }
    for (double& x : v) x /= sum;
    ActionProbabilities p(v);

    SchemeConfig config = SchemeConfig::lri_scheme(
        0.05 + 0.9 * rng.next_double());
    const double before = lasim::expected_reward(p, env);
    const double after = lasim::one_step_expected_reward(config, p, env);
    INFO("r=" << r << " a=" << config.a);
    REQUIRE(after - before > 1e-12);
  }
}

TEST_CASE("detect_convergence reports the first threshold crossing") {
  ConvergenceCriterion criterion;

  SECTION("a trace that starts converged reports step 0") {
    std::vector<StepRecord> trace = {make_record(0, {0.96, 0.04}),
                                     make_record(1, {0.97, 0.03})};
    RunOutcome o = lasim::detect_convergence(trace, criterion, 0);
    REQUIRE(o.converged());
    CHECK(*o.converged_step == 0);
    CHECK(*o.converged_action == 0);
    CHECK(o.correct);
  }

  SECTION("a trace that never crosses reports nothing") {
    std::vector<StepRecord> trace;
    for (std::uint64_t n = 0; n < 50; ++n) {
      trace.push_back(make_record(n, {0.9, 0.1}));
    }
    RunOutcome o = lasim::detect_convergence(trace, criterion, 0);
    CHECK_FALSE(o.converged());
    CHECK_FALSE(o.correct);
    CHECK_FALSE(o.converged_action.has_value());
  }

  SECTION("synthetic geometric approach crosses at the computed step") {
    std::vector<StepRecord> trace;
    for (std::uint64_t n = 0; n <= 400; ++n) {
      const double v =
          1.0 - 0.5 * std::pow(0.99, static_cast<double>(n));
      trace.push_back(make_record(n, {v, 1.0 - v}));
    }
    RunOutcome o = lasim::detect_convergence(trace, criterion, 0);
    REQUIRE(o.converged());
    // 1 - 0.5 * 0.99^n reaches 0.95 once 0.99^n <= 0.1, i.e. at n = 230.
    CHECK(*o.converged_step == 230);
  }

  SECTION("first crossing stands even if the trace later dips") {
    std::vector<StepRecord> trace = {
        make_record(0, {0.5, 0.5}), make_record(5, {0.96, 0.04}),
        make_record(10, {0.6, 0.4}), make_record(20, {0.97, 0.03})};
    RunOutcome o = lasim::detect_convergence(trace, criterion, 0);
    CHECK(*o.converged_step == 5);
  }

  SECTION("wrong-action crossings depend on the target") {
    std::vector<StepRecord> trace = {make_record(0, {0.5, 0.3, 0.2}),
                                     make_record(1, {0.02, 0.96, 0.02})};
    RunOutcome any = lasim::detect_convergence(trace, criterion, 0);
    REQUIRE(any.converged());
    CHECK(*any.converged_action == 1);
    CHECK_FALSE(any.correct);

    ConvergenceCriterion optimal{0.95, ConvergenceTarget::optimal_only};
    RunOutcome opt = lasim::detect_convergence(trace, optimal, 0);
    CHECK_FALSE(opt.converged());
  }

  SECTION("simultaneous crossings resolve to the lowest index") {
    ConvergenceCriterion low{0.4, ConvergenceTarget::any_action};
    std::vector<StepRecord> trace = {make_record(0, {0.45, 0.45, 0.1})};
    RunOutcome o = lasim::detect_convergence(trace, low, 1);
    CHECK(*o.converged_action == 0);
  }

  SECTION("input validation") {
    std::vector<StepRecord> trace = {make_record(0, {0.5, 0.5})};
    REQUIRE_THROWS_AS(
        lasim::detect_convergence(std::span<const StepRecord>{}, criterion, 0),
        std::invalid_argument);
    REQUIRE_THROWS_AS(lasim::detect_convergence(trace, criterion, 2),
                      std::out_of_range);
    ConvergenceCriterion bad{1.0, ConvergenceTarget::any_action};
    REQUIRE_THROWS_AS(lasim::detect_convergence(trace, bad, 0),
                      std::invalid_argument);
  }
}

TEST_CASE("convergence step is monotone in the threshold") {
  std::vector<StepRecord> trace;
  for (std::uint64_t n = 0; n <= 400; ++n) {
    const double v = 1.0 - 0.5 * std::pow(0.99, static_cast<double>(n));
    trace.push_back(make_record(n, {v, 1.0 - v}));
  }
  std::uint64_t prev = 0;
  for (double threshold : {0.55, 0.7, 0.8, 0.9, 0.95}) {
    ConvergenceCriterion criterion{threshold, ConvergenceTarget::any_action};
    RunOutcome o = lasim::detect_convergence(trace, criterion, 0);
    REQUIRE(o.converged());
    REQUIRE(*o.converged_step >= prev);
    prev = *o.converged_step;
  }
}

TEST_CASE("summarize aggregates run outcomes") {
  EnvironmentSpec env({0.7, 0.4});

  SECTION("uniform converged runs") {
    std::vector<RunOutcome> outcomes(10, converged_at(100, true, 0.7));
    lasim::ExperimentSummary s = lasim::summarize(outcomes, env);
    CHECK(s.num_runs == 10);
    CHECK(s.converged_fraction == 1.0);
    CHECK(s.wrong_fraction == 0.0);
    CHECK(s.step_stats.count == 10);
    CHECK(s.step_stats.median == 100.0);
    CHECK(s.step_stats.mean == 100.0);
    CHECK(s.step_stats.percentile_10 == 100.0);
    CHECK(s.step_stats.percentile_90 == 100.0);
    CHECK(s.mean_final_reward == Catch::Approx(0.7).margin(1e-15));
    CHECK(s.epsilon == Catch::Approx(0.0).margin(1e-15));
  }

  SECTION("even sample count takes the midpoint median") {
    std::vector<RunOutcome> outcomes = {converged_at(100, true, 0.7),
                                        converged_at(300, true, 0.7)};
    CHECK(lasim::summarize(outcomes, env).step_stats.median == 200.0);
  }

  SECTION("non-converged runs dilute the fractions, not the quantiles") {
    std::vector<RunOutcome> outcomes = {
        converged_at(100, true, 0.7), converged_at(100, true, 0.7),
        converged_at(50, false, 0.4), RunOutcome{}};
    outcomes[3].final_expected_reward = 0.5;
    lasim::ExperimentSummary s = lasim::summarize(outcomes, env);
    CHECK(s.converged_fraction == 0.75);
    CHECK(s.wrong_fraction == 0.25);
    CHECK(s.step_stats.count == 3);
    CHECK(s.step_stats.median == 100.0);
  }

  SECTION("interpolated percentiles") {
    std::vector<RunOutcome> outcomes;
    for (int i = 0; i < 10; ++i) {
      outcomes.push_back(
          converged_at(static_cast<std::uint64_t>(10 * i), true, 0.7));
    }
    lasim::ExperimentSummary s = lasim::summarize(outcomes, env);
    CHECK(s.step_stats.percentile_10 == Catch::Approx(9.0).margin(1e-12));
    CHECK(s.step_stats.percentile_90 == Catch::Approx(81.0).margin(1e-12));
    CHECK(s.step_stats.median == 45.0);
  }

  SECTION("nothing converged leaves the step stats empty") {
    std::vector<RunOutcome> outcomes(3);
    for (auto& o : outcomes) o.final_expected_reward = 0.55;
    lasim::ExperimentSummary s = lasim::summarize(outcomes, env);
    CHECK(s.converged_fraction == 0.0);
    CHECK(s.step_stats.count == 0);
    CHECK(std::isnan(s.step_stats.median));
    CHECK(s.epsilon == Catch::Approx(0.15).margin(1e-15));
  }

  SECTION("empty input is rejected") {
    REQUIRE_THROWS_AS(lasim::summarize(std::span<const RunOutcome>{}, env),
                      std::invalid_argument);
  }
}

TEST_CASE("LRI wrong-convergence rate grows with the step size") {
  // Shared seeds across step sizes. On d = (0.7, 0.4) the wrong rate is
  // still zero for every a up to 0.05 at this horizon; the strict increase
  // only becomes visible around a = 0.2.
  auto wrong_rate = [](double a) {
    lasim::ExperimentConfig config(EnvironmentSpec({0.7, 0.4}),
                                   SchemeConfig::lri_scheme(a));
    config.steps = 5000;
    config.runs = 400;
    config.master_seed = 42;
    config.record_stride = 5000;
    lasim::ExperimentResult result = lasim::run_experiment(config);
    return result.summary.wrong_fraction;
  };

  double prev = 0.0;
  for (double a : {0.005, 0.015, 0.05}) {
    const double rate = wrong_rate(a);
    REQUIRE(rate >= prev);
    prev = rate;
  }
  CHECK(wrong_rate(0.2) > wrong_rate(0.005));
}
