#pragma once

#include "relucond/geometry.hpp"
#include "relucond/rng.hpp"
#include "relucond/types.hpp"

namespace relucond {

/// Constructive certificate from the antipodal-pair argument: U_lb is a
/// witnessed lower bound on U, L_ub a witnessed upper bound on L through the
/// pair (x2, -x2), and cert_ratio = U_lb / L_ub >= sqrt(2) - 1e-9 for every
/// nonzero matrix because <relu(z), relu(-z)> = 0.
struct Sqrt2Certificate {
  Vector probe;       // x2, the probe with the smallest origin ratio
  double r_plus = 0;  // ratio against the origin at x2
  double r_minus = 0; // same at -x2
  double U_lb = 0;
  double L_ub = 0;
  double cert_ratio = 0;  // kInf when L_ub == 0 but U_lb > 0
};

enum class Direction { min, max };

/// Pair categories used by the sampling mixture (40% sphere x sphere, then
/// 20% each antipodal, near-coincident, against-origin when structured
/// pairs are enabled).
struct PairSample {
  Vector x, y;
};

PairSample sample_pair(std::size_t n, const RngSeed& seed, std::uint64_t index,
                       bool include_structured);

BiLipBracket sampled_bilip(const LayerMap& layer, std::uint64_t pair_count,
                           const RngSeed& seed, bool include_structured,
                           int workers = 1);

/// Greedy coordinate polish of pairwise_ratio from (x, y); the result never
/// crosses the starting value in the wrong direction.  iters counts full
/// sweeps over the 2n coordinates.
struct RefinedPair {
  Vector x, y;
  double ratio = 0;
};
RefinedPair refine_extreme(const LayerMap& layer, const Vector& x, const Vector& y,
                           Direction direction, int iters);

Sqrt2Certificate sqrt2_certificate(const Matrix& a, std::uint64_t probe_count,
                                   const RngSeed& seed);

struct ScaleInvarianceReport {
  double max_rel_ratio_dev = 0;  // per-pair ratio deviation / expected value
  double beta_rel_dev = 0;       // deviation of beta_lo across the two scales
  std::size_t pairs = 0;
};

ScaleInvarianceReport scale_invariance_check(const LayerMap& layer, double c,
                                             const std::vector<PairSample>& pairs);

}  // namespace relucond
