#include "relucond/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "relucond/parallel.hpp"

namespace relucond {

namespace {

constexpr double kNearEps = 1e-3;

enum PairKind { kSphereSphere, kAntipodal, kNearCoincident, kAgainstOrigin };

PairKind kind_of(std::uint64_t index, bool include_structured) {
  if (!include_structured) return kSphereSphere;
  switch (index % 5) {
    case 0:
    case 1:
      return kSphereSphere;
    case 2:
      return kAntipodal;
    case 3:
      return kNearCoincident;
    default:
      return kAgainstOrigin;
  }
}

}  // namespace

PairSample sample_pair(std::size_t n, const RngSeed& seed, std::uint64_t index,
                       bool include_structured) {
  Sampler s(substream(seed, index));
  PairSample p;
  p.x = sample_unit_sphere(n, s);
  switch (kind_of(index, include_structured)) {
    case kSphereSphere:
      // x == y is excluded (relevant at n = 1 where the sphere is {-1, +1}).
      do {
        p.y = sample_unit_sphere(n, s);
      } while (std::equal(p.x.begin(), p.x.end(), p.y.begin()));
      break;
    case kAntipodal:
      p.y = p.x;
      for (double& v : p.y) v = -v;
      break;
    case kNearCoincident: {
      Vector u = sample_unit_sphere(n, s);
      p.y = p.x;
      for (std::size_t j = 0; j < n; ++j) p.y[j] += kNearEps * u[j];
      break;
    }
    case kAgainstOrigin:
      p.y.assign(n, 0.0);
      break;
  }
  return p;
}

BiLipBracket sampled_bilip(const LayerMap& layer, std::uint64_t pair_count,
                           const RngSeed& seed, bool include_structured, int workers) {
  if (pair_count < 1) throw InputError("sampled_bilip: pair_count must be >= 1");
  const std::size_t n = layer.A.cols;
  PreparedLayer prep(layer);

  const std::size_t blocks = block_count(pair_count);
  std::vector<ExtremeSlot> max_slots(blocks), min_slots(blocks);
  parallel_blocks(pair_count, workers, [&](std::size_t b, std::size_t begin, std::size_t end) {
    ExtremeSlot mx, mn;
    for (std::size_t i = begin; i < end; ++i) {
      PairSample p = sample_pair(n, seed, i, include_structured);
      double r = prep.pairwise_ratio(p.x, p.y);
      mx.consider_max(r, i);
      mn.consider_min(r, i);
    }
    max_slots[b] = mx;
    min_slots[b] = mn;
  });

  ExtremeSlot mx, mn;
  for (std::size_t b = 0; b < blocks; ++b) {
    if (max_slots[b].set) mx.consider_max(max_slots[b].value, max_slots[b].index);
    if (min_slots[b].set) mn.consider_min(min_slots[b].value, min_slots[b].index);
  }

  BiLipBracket bracket;
  bracket.U_lo = mx.value;
  bracket.L_hi = mn.value;
  bracket.sample_count = pair_count;
  bracket.seed = seed;
  PairSample pmax = sample_pair(n, seed, mx.index, include_structured);
  PairSample pmin = sample_pair(n, seed, mn.index, include_structured);
  bracket.max_x = std::move(pmax.x);
  bracket.max_y = std::move(pmax.y);
  bracket.min_x = std::move(pmin.x);
  bracket.min_y = std::move(pmin.y);
  finalize_beta(bracket);
  return bracket;
}

RefinedPair refine_extreme(const LayerMap& layer, const Vector& x, const Vector& y,
                           Direction direction, int iters) {
  PreparedLayer prep(layer);
  RefinedPair best{x, y, 0.0};
  best.ratio = prep.pairwise_ratio(x, y);
  if (iters <= 0) return best;

  const bool maximize = direction == Direction::max;
  double scale = std::max({norm2(x), norm2(y), 1.0});
  double step = 0.25 * scale;
  const std::size_t n = x.size();

  for (int it = 0; it < iters; ++it) {
    bool improved = false;
    for (std::size_t side = 0; side < 2; ++side) {
      for (std::size_t j = 0; j < n; ++j) {
        for (double dir : {1.0, -1.0}) {
          RefinedPair trial = best;
          Vector& target = side == 0 ? trial.x : trial.y;
          target[j] += dir * step;
          if (std::equal(trial.x.begin(), trial.x.end(), trial.y.begin())) continue;
          double r = prep.pairwise_ratio(trial.x, trial.y);
          if ((maximize && r > best.ratio) || (!maximize && r < best.ratio)) {
            best = trial;
            best.ratio = r;
            improved = true;
          }
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

Sqrt2Certificate sqrt2_certificate(const Matrix& a, std::uint64_t probe_count,
                                   const RngSeed& seed) {
  if (probe_count < 1) throw InputError("sqrt2_certificate: probe_count must be >= 1");
  PreparedLayer prep(LayerMap{a});
  const std::size_t n = a.cols;

  Sqrt2Certificate cert;
  double best_min = kInf;
  Vector best_probe;
  for (std::uint64_t i = 0; i < probe_count; ++i) {
    Vector u = sample_unit_sphere(n, substream(seed, i));
    Vector nu = u;
    for (double& v : nu) v = -v;
    double rp = prep.origin_ratio(u);
    double rm = prep.origin_ratio(nu);
    cert.U_lb = std::max({cert.U_lb, rp, rm});
    if (rp < best_min) {
      best_min = rp;
      best_probe = u;
    }
    if (rm < best_min) {
      best_min = rm;
      best_probe = nu;
    }
  }
  if (cert.U_lb == 0.0)
    throw InputError("sqrt2_certificate: every probe collapsed; zero matrix");

  cert.probe = std::move(best_probe);
  Vector neg = cert.probe;
  for (double& v : neg) v = -v;
  cert.r_plus = prep.origin_ratio(cert.probe);
  cert.r_minus = prep.origin_ratio(neg);
  cert.L_ub = std::sqrt((cert.r_plus * cert.r_plus + cert.r_minus * cert.r_minus) / 4.0);
  cert.cert_ratio = cert.L_ub > 0.0 ? cert.U_lb / cert.L_ub : kInf;
  return cert;
}

ScaleInvarianceReport scale_invariance_check(const LayerMap& layer, double c,
                                             const std::vector<PairSample>& pairs) {
  if (!(c > 0.0)) throw InputError("scale_invariance_check: c must be positive");
  LayerMap scaled = layer;
  for (double& v : scaled.A.data) v *= c;
  for (double& v : scaled.b) v *= c;
  PreparedLayer base(layer), big(scaled);

  ScaleInvarianceReport rep;
  rep.pairs = pairs.size();
  double u1 = 0, u2 = 0, l1 = kInf, l2 = kInf;
  for (const PairSample& p : pairs) {
    double r1 = base.pairwise_ratio(p.x, p.y);
    double r2 = big.pairwise_ratio(p.x, p.y);
    double expected = c * r1;
    double dev = expected > 0.0 ? std::abs(r2 - expected) / expected : std::abs(r2);
    rep.max_rel_ratio_dev = std::max(rep.max_rel_ratio_dev, dev);
    u1 = std::max(u1, r1);
    u2 = std::max(u2, r2);
    l1 = std::min(l1, r1);
    l2 = std::min(l2, r2);
  }
  if (l1 < 1e-13 || l2 < 1e-13) {
    rep.beta_rel_dev = (l1 < 1e-13) == (l2 < 1e-13) ? 0.0 : kInf;
  } else {
    double b1 = u1 / l1;
    double b2 = u2 / l2;
    rep.beta_rel_dev = std::abs(b2 - b1) / b1;
  }
  return rep;
}

}  // namespace relucond
