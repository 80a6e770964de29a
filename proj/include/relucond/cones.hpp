#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relucond/rng.hpp"
#include "relucond/types.hpp"

namespace relucond {

/// A cone S (scale-invariant set) with the operations the experiments need:
/// membership, uniform sampling of S on the sphere, and the maximizer of a
/// linear functional over (S - S) intersected with the unit ball.
struct ConeSpec {
  enum class Kind { full_space, sparse, custom_halfspaces };

  Kind kind = Kind::full_space;
  std::size_t n = 0;
  std::size_t k = 0;                  // sparsity (sparse kind)
  std::vector<Vector> normals;        // halfspace normals <v, x> >= 0 (custom kind)

  static ConeSpec full(std::size_t n);
  static ConeSpec sparse_cone(std::size_t n, std::size_t k);
  static ConeSpec halfspaces(std::size_t n, std::vector<Vector> normals);

  bool member(const Vector& x) const;

  /// Uniform point of S on the unit sphere.  Custom cones use rejection
  /// sampling; throws InputError after too many rejections (flagging an
  /// empty or negligible interior).
  Vector sample_sphere(Sampler& s) const;

  /// sup over (S - S) n B^n of <g, x>.  Closed form for full and sparse
  /// cones; projected-gradient lower bound for custom cones.
  double width_max(const Vector& g) const;

  /// Whether -x in S whenever x in S (safe to inject antipodal pairs).
  bool symmetric() const { return kind != Kind::custom_halfspaces; }

  std::string describe() const;
};

struct WidthEstimate {
  double mean = 0;
  double se = 0;
  std::uint64_t draws = 0;
};

WidthEstimate gaussian_width_mc(const ConeSpec& spec, std::uint64_t draws,
                                const RngSeed& seed, int workers = 1);

struct EpsilonNet {
  std::vector<Vector> net;
  bool verified = false;
  Vector uncovered_witness;  // populated when verification fails
  double sudakov_quantity = 0;  // eps * sqrt(log #net)
};

/// Greedy farthest-point net of the unit sphere at scale eps, verified
/// against `probes` fresh random points.
EpsilonNet epsilon_net_sphere(std::size_t n, double eps, const RngSeed& seed,
                              std::uint64_t probes);

}  // namespace relucond
