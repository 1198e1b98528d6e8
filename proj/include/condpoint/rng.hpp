#pragma once

#include <cstdint>

namespace condpoint::rng {

/// SplitMix64 step; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of the independent sub-stream `stream` of a master seed. Stream 0 is
/// the stream a single estimate uses.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Small portable generator (xoshiro256**) so that draws are bit-identical
/// across standard libraries.
class Engine {
 public:
  explicit Engine(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal by the polar Box-Muller method.
  double normal();

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace condpoint::rng
