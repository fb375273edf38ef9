// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "lasim/rng.hpp"

namespace {

std::vector<std::uint64_t> draw_u64(lasim::RngStream stream, int count) {
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(stream.next_u64());
  return out;
}

}  // namespace

TEST_CASE("derive_stream is deterministic for a fixed (seed, index) pair") {
  auto first = draw_u64(lasim::derive_stream(42, 0), 1000);
  auto second = draw_u64(lasim::derive_stream(42, 0), 1000);
  REQUIRE(first == second);
}

TEST_CASE("derive_stream separates run indices") {
  auto run0 = draw_u64(lasim::derive_stream(42, 0), 100);
  auto run1 = draw_u64(lasim::derive_stream(42, 1), 100);
  REQUIRE(run0 != run1);
}

TEST_CASE("derive_stream separates master seeds") {
  auto seed42 = draw_u64(lasim::derive_stream(42, 7), 100);
  auto seed43 = draw_u64(lasim::derive_stream(43, 7), 100);
  REQUIRE(seed42 != seed43);
}

TEST_CASE("engine output matches the value pinned by the standard") {
  // [rand.predef]: the 10000th consecutive invocation of a default-seeded
  // mt19937_64 must produce 9981545732273789042. This anchors the raw engine
  // across platforms and standard library implementations.
  lasim::RngStream stream(5489);
  std::uint64_t value = 0;
  for (int i = 0; i < 10000; ++i) value = stream.next_u64();
  REQUIRE(value == 9981545732273789042ull);
}

TEST_CASE("derived stream output is frozen across platforms") {
  // Golden values recorded from the reference build. Any change here breaks
  // reproducibility of archived traces, so a failure is a release blocker,
  // not a test to update casually.
  lasim::RngStream stream = lasim::derive_stream(42, 0);
  CHECK(stream.next_u64() == 13822782178720226203ull);
  CHECK(stream.next_u64() == 1634691259193778157ull);
  CHECK(stream.next_u64() == 1997811027723131870ull);
  CHECK(stream.next_u64() == 3414537914955251213ull);

  lasim::RngStream again = lasim::derive_stream(42, 0);
  CHECK(again.next_double() == 0.74933452339811912);
  CHECK(again.next_double() == 0.088616790728047845);
}

TEST_CASE("next_double uses the 53-bit construction and stays in [0, 1)") {
  lasim::RngStream bits = lasim::derive_stream(9001, 3);
  lasim::RngStream doubles = lasim::derive_stream(9001, 3);
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t u = bits.next_u64();
    const double x = doubles.next_double();
    REQUIRE(x == static_cast<double>(u >> 11) * 0x1.0p-53);
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
}

TEST_CASE("next_double has 53-bit granularity") {
  lasim::RngStream stream = lasim::derive_stream(5, 5);
  for (int i = 0; i < 1000; ++i) {
    const double x = stream.next_double();
    const double scaled = x * 0x1.0p53;
    REQUIRE(scaled == std::floor(scaled));
  }
}
