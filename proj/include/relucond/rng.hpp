#pragma once

#include <array>
#include <cstdint>

#include "relucond/types.hpp"

namespace relucond {

// Philox4x32-10 counter-based generator.  Output block i of a stream is a
// pure function of (seed, stream, i), so substreams can be handed to workers
// in any order without changing a single bit of the result.
namespace philox {

std::array<std::uint32_t, 4> block(std::uint64_t key, std::uint64_t tick, std::uint64_t stream);

}  // namespace philox

std::uint64_t splitmix64(std::uint64_t x);

/// Derives an effectively unique child stream for substream index i.
RngSeed substream(const RngSeed& parent, std::uint64_t i);

/// Sequential draw cursor over one Philox stream.  Value-like; copying it
/// forks the cursor.  Normal pairs come from Box-Muller, one tick each.
class Sampler {
 public:
  explicit Sampler(const RngSeed& s) : key_(s.seed), stream_(s.stream) {}

  double uniform01();  // strictly inside (0, 1)
  double normal();

  /// Uniform over {0, 1, ..., bound-1} by rejection-free 64-bit scaling.
  std::uint64_t next_index(std::uint64_t bound);

 private:
  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t tick_ = 0;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

Matrix gaussian_matrix(std::size_t m, std::size_t n, const RngSeed& seed);
Vector gaussian_vector(std::size_t n, Sampler& s);
Vector sample_unit_sphere(std::size_t n, const RngSeed& seed);
Vector sample_unit_sphere(std::size_t n, Sampler& s);

}  // namespace relucond
