// Deterministic, position-keyed random streams.
//
// A stream is identified by a tuple of integers (master seed, run index,
// generation, circuit, ...). The tuple is hashed with splitmix64 into the
// seed of a private engine, so any experiment replays bit-for-bit no matter
// how runs are scheduled across threads.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rpe {

/// One splitmix64 output step.
std::uint64_t splitmix64(std::uint64_t x);

/// Order-sensitive hash of a key tuple.
std::uint64_t stream_key(std::initializer_list<std::uint64_t> parts);

class RandomStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RandomStream(std::uint64_t key) : engine_(key) {}
  RandomStream(std::initializer_list<std::uint64_t> parts)
      : engine_(stream_key(parts)) {}

  engine_type& engine() { return engine_; }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

 private:
  engine_type engine_;
};

}  // namespace rpe
