// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "lasim/probability.hpp"
#include "lasim/rng.hpp"

using lasim::ActionProbabilities;
using lasim::RngStream;

TEST_CASE("ActionProbabilities rejects malformed vectors") {
  REQUIRE_THROWS_AS(ActionProbabilities({1.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(ActionProbabilities({}), std::invalid_argument);
  REQUIRE_THROWS_AS(ActionProbabilities({-0.1, 1.1}), std::invalid_argument);
  REQUIRE_THROWS_AS(ActionProbabilities({0.5, 1.5}), std::invalid_argument);
  REQUIRE_THROWS_AS(ActionProbabilities({0.3, 0.3}), std::invalid_argument);
  REQUIRE_THROWS_MATCHES(
      ActionProbabilities({0.5, 0.5 + 2e-9}), std::invalid_argument,
      Catch::Matchers::MessageMatches(
          Catch::Matchers::ContainsSubstring("sum")));
}

TEST_CASE("ActionProbabilities renormalizes small drift only") {
  SECTION("drift within a few ulps is left untouched") {
    const double nudged = 0.5 + 1e-13;
    ActionProbabilities p({0.5, nudged});
    CHECK(p[0] == 0.5);
    CHECK(p[1] == nudged);
  }

  SECTION("drift between 1e-12 and 1e-9 is scaled back onto the simplex") {
    const double nudged = 0.5 + 5e-10;
    ActionProbabilities p({0.5, nudged});
    const double sum = 0.5 + nudged;
    CHECK(p[0] == 0.5 / sum);
    CHECK(p[1] == nudged / sum);
    CHECK(std::abs(p[0] + p[1] - 1.0) <= 1e-15);
    p.validate();
  }
}

TEST_CASE("uniform spreads mass evenly") {
  ActionProbabilities p = ActionProbabilities::uniform(4);
  REQUIRE(p.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(p[i] == 0.25);
  REQUIRE_THROWS_AS(ActionProbabilities::uniform(1), std::invalid_argument);
  REQUIRE_THROWS_AS(ActionProbabilities::uniform(0), std::invalid_argument);
}

TEST_CASE("sample_action is deterministic on degenerate distributions") {
  RngStream rng = lasim::derive_stream(1, 0);
  ActionProbabilities first({1.0, 0.0});
  for (int i = 0; i < 1000; ++i) REQUIRE(lasim::sample_action(first, rng) == 0);

  ActionProbabilities last({0.0, 0.0, 1.0});
  for (int i = 0; i < 1000; ++i) REQUIRE(lasim::sample_action(last, rng) == 2);
}

TEST_CASE("sample_action matches probabilities on a two-action split") {
  ActionProbabilities p({0.25, 0.75});
  RngStream rng = lasim::derive_stream(42, 0);
  const int draws = 1000000;
  int zeros = 0;
  for (int i = 0; i < draws; ++i) {
    if (lasim::sample_action(p, rng) == 0) ++zeros;
  }
  const double frequency = static_cast<double>(zeros) / draws;
  CHECK(frequency >= 0.248);
  CHECK(frequency <= 0.252);
}

TEST_CASE("sample_action frequencies stay within four sigma") {
  RngStream setup = lasim::derive_stream(7, 1);
  for (std::size_t r : {std::size_t{2}, std::size_t{5}, std::size_t{10}}) {
    std::vector<double> raw(r);
    double sum = 0.0;
    for (double& v : raw) {
      v = 0.05 + setup.next_double();
      sum += v;
    }
    for (double& v : raw) v /= sum;
    ActionProbabilities p(raw);

    const int draws = 100000;
    std::vector<int> counts(r, 0);
    RngStream rng = lasim::derive_stream(7, 100 + r);
    for (int i = 0; i < draws; ++i) ++counts[lasim::sample_action(p, rng)];

    for (std::size_t i = 0; i < r; ++i) {
      const double freq = static_cast<double>(counts[i]) / draws;
      const double sigma = std::sqrt(p[i] * (1.0 - p[i]) / draws);
      INFO("r=" << r << " action=" << i << " p=" << p[i] << " freq=" << freq);
      CHECK(std::abs(freq - p[i]) <= 4.0 * sigma);
    }
  }
}

TEST_CASE("sample_action consumes exactly one draw") {
  ActionProbabilities p({0.3, 0.3, 0.4});
  RngStream sampled = lasim::derive_stream(11, 2);
  RngStream mirror = lasim::derive_stream(11, 2);
  for (int i = 0; i < 1000; ++i) {
    lasim::sample_action(p, sampled);
    mirror.next_double();
  }
  // Streams must still agree after the same number of consumed values.
  REQUIRE(sampled.next_u64() == mirror.next_u64());
}
