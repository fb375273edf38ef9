// SPDX-License-Identifier: Apache-2.0
//
// Deterministic pseudorandom streams. Every random draw in the library goes
// through RngStream so that a (master_seed, run_index) pair reproduces a run
// bit-for-bit on any platform. std::mt19937_64 is used as the engine because
// its output sequence is fully specified by the standard; uniform doubles are
// produced by the 53-bit shift construction instead of
// std::uniform_real_distribution, whose output is implementation-defined.

#pragma once

#include <cstdint>
#include <random>

namespace lasim {

// splitmix64 step: advances the state and returns a well-mixed 64-bit value.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform draw in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

// Hash-derives an independent stream for one replication. The mapping is pure:
// the same (master_seed, run_index) always yields the same stream, and streams
// for different indices can be created in any order (or in parallel) without
// affecting each other.
inline RngStream derive_stream(std::uint64_t master_seed,
                               std::uint64_t run_index) {
  std::uint64_t s = master_seed;
  std::uint64_t a = splitmix64(s);
  s = run_index ^ 0xD1B54A32D192ED03ull;
  std::uint64_t b = splitmix64(s);
  s = a ^ b;
  return RngStream(splitmix64(s));
}

}  // namespace lasim
