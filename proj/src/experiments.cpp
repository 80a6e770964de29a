#include "relucond/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "relucond/geometry.hpp"
#include "relucond/kernels.hpp"
#include "relucond/parallel.hpp"

namespace relucond {

namespace {

constexpr double kRadialEps = 1e-3;

// Substream offsets; disjoint purposes get disjoint bases.
constexpr std::uint64_t kMatrixStream = 0x10;
constexpr std::uint64_t kTrialStream = 0x1000;
constexpr std::uint64_t kPairStream = 0x100000;

double pass_flag(bool ok) { return ok ? 1.0 : 0.0; }

// Cone pair after the sphere x ball reduction, with every 5th pair replaced
// by a structured antipodal (when the cone allows it) or radial
// near-coincident pair.
PairSample cone_pair(const ConeSpec& cone, const RngSeed& seed, std::uint64_t index) {
  Sampler s(substream(seed, kPairStream + index));
  PairSample p;
  p.x = cone.sample_sphere(s);
  std::uint64_t slot = index % 10;
  if (slot == 8 && cone.symmetric()) {
    p.y = p.x;
    for (double& v : p.y) v = -v;
  } else if (slot == 9) {
    p.y = p.x;
    for (double& v : p.y) v *= 1.0 - kRadialEps;
  } else {
    double r = s.uniform01();
    Vector dir = cone.sample_sphere(s);
    p.y.resize(cone.n);
    for (std::size_t j = 0; j < cone.n; ++j) p.y[j] = r * dir[j];
  }
  return p;
}

}  // namespace

double ReportRow::get(const std::string& key) const {
  for (const auto& [k, v] : values)
    if (k == key) return v;
  throw InputError("report row has no key '" + key + "'");
}

bool ReportRow::has(const std::string& key) const {
  for (const auto& [k, v] : values)
    if (k == key) return true;
  return false;
}

bool ExperimentReport::all_pass() const {
  for (const ReportRow& r : rows)
    if (r.has("pass") && r.get("pass") == 0.0) return false;
  return true;
}

ExperimentReport mc_lemma_checks(const ExperimentConfig& cfg, int workers) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw InputError("mc_lemma_checks: alpha must lie in (0, 1)");
  if (!(cfg.beta_param >= 10.0))
    throw InputError("mc_lemma_checks: beta_param must be >= 10");
  if (cfg.pair_count < 2) throw InputError("mc_lemma_checks: need at least 2 rows");

  const double alpha = cfg.alpha;
  const double beta = cfg.beta_param;
  const double tail_bound = std::exp(-beta * beta / 4.0);

  ExperimentReport rep;
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    RngSeed trial = substream(cfg.seed, kTrialStream + t);
    Vector x = sample_unit_sphere(cfg.n, substream(trial, 0));
    Vector y = sample_unit_sphere(cfg.n, substream(trial, 1));

    enum { kE1, kE2, kTail, kLower, kUpper, kStats };
    const std::size_t blocks = block_count(cfg.pair_count);
    std::vector<std::array<MeanAccumulator, kStats>> slots(blocks);
    parallel_blocks(cfg.pair_count, workers,
                    [&](std::size_t b, std::size_t begin, std::size_t end) {
                      std::array<MeanAccumulator, kStats> acc;
                      for (std::size_t i = begin; i < end; ++i) {
                        Sampler s(substream(trial, 2 + i));
                        Vector a = gaussian_vector(cfg.n, s);
                        double dx = kernels::active().dot(a.data(), x.data(), cfg.n);
                        double dy = kernels::active().dot(a.data(), y.data(), cfg.n);
                        double dy2 = dy * dy;
                        acc[kE1].add(dx >= 0.0 ? dy2 : 0.0);
                        acc[kE2].add(dx > 0.0 && dx <= alpha ? dy2 : 0.0);
                        acc[kTail].add(std::abs(dy) >= beta ? dy2 : 0.0);
                        acc[kLower].add(dx > alpha && std::abs(dy) < beta ? dy2 : 0.0);
                        acc[kUpper].add(dx >= -alpha ? dy2 : 0.0);
                      }
                      slots[b] = acc;
                    });
    std::array<MeanAccumulator, kStats> total;
    for (const auto& s : slots)
      for (std::size_t q = 0; q < kStats; ++q) total[q].merge(s[q]);

    // E1 is an equality, the rest are one-sided bounds.
    struct Quantity {
      const char* name;
      int idx;
      double bound;
      int mode;
    };
    const Quantity quantities[] = {
        {"E1_half", kE1, 0.5, 0},
        {"E2_window", kE2, 2.0 * alpha, 1},
        {"tail", kTail, tail_bound, 1},
        {"L63_lower", kLower, 0.5 - 2.0 * alpha - tail_bound, 2},
        {"L63_upper", kUpper, 0.5 + 2.0 * alpha, 1},
    };
    for (const Quantity& q : quantities) {
      double est = total[q.idx].mean();
      double se = total[q.idx].se();
      bool ok = q.mode == 0   ? std::abs(est - q.bound) <= 4.0 * se
                : q.mode == 1 ? est <= q.bound + 4.0 * se
                              : est >= q.bound - 4.0 * se;
      ReportRow row;
      row.label = q.name;
      row.add("trial", static_cast<double>(t))
          .add("n", static_cast<double>(cfg.n))
          .add("rows", static_cast<double>(cfg.pair_count))
          .add("alpha", alpha)
          .add("beta", beta)
          .add("estimate", est)
          .add("se", se)
          .add("bound", q.bound)
          .add("pass", pass_flag(ok));
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

ExperimentReport expectation_identity_check(const ExperimentConfig& cfg, int workers) {
  if (cfg.pair_count < 2) throw InputError("expectation_identity_check: need >= 2 rows");
  ExperimentReport rep;
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    RngSeed trial = substream(cfg.seed, kTrialStream + t);
    PairSample p = sample_pair(cfg.n, substream(trial, 0), t, /*include_structured=*/true);
    double exact = expected_sq_distance(p.x, p.y);

    const std::size_t blocks = block_count(cfg.pair_count);
    std::vector<MeanAccumulator> slots(blocks);
    parallel_blocks(cfg.pair_count, workers,
                    [&](std::size_t b, std::size_t begin, std::size_t end) {
                      MeanAccumulator acc;
                      for (std::size_t i = begin; i < end; ++i) {
                        Sampler s(substream(trial, 2 + i));
                        Vector a = gaussian_vector(cfg.n, s);
                        double dx = kernels::active().dot(a.data(), p.x.data(), cfg.n);
                        double dy = kernels::active().dot(a.data(), p.y.data(), cfg.n);
                        double d = std::max(0.0, dx) - std::max(0.0, dy);
                        acc.add(d * d);
                      }
                      slots[b] = acc;
                    });
    MeanAccumulator total;
    for (const MeanAccumulator& a : slots) total.merge(a);

    double mc = total.mean();
    double se = total.se();
    double z = se > 0.0 ? (mc - exact) / se : (mc == exact ? 0.0 : kInf);
    ReportRow row;
    row.add("pair", static_cast<double>(t))
        .add("n", static_cast<double>(cfg.n))
        .add("rows", static_cast<double>(cfg.pair_count))
        .add("exact", exact)
        .add("mc", mc)
        .add("se", se)
        .add("z", z)
        .add("pass", pass_flag(std::abs(z) <= 4.0));
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

ExperimentReport theorem_band_check(const ExperimentConfig& cfg, int workers) {
  if (!(cfg.delta > 0.0 && cfg.delta <= 0.5))
    throw InputError("theorem_band_check: delta must lie in (0, 0.5]");
  if (!(cfg.C > 0.0 && cfg.C < 1.0))
    throw InputError("theorem_band_check: C must lie in (0, 1)");
  Matrix a = gaussian_matrix(cfg.m, cfg.n, substream(cfg.seed, kMatrixStream));
  PreparedLayer prep{LayerMap{std::move(a)}};
  const double half_delta = 0.5 * cfg.delta;
  const double inv_m = 1.0 / static_cast<double>(cfg.m);

  struct Partial {
    std::uint64_t pairs[2] = {0, 0};       // [large, small]
    std::uint64_t violations[2] = {0, 0};
    double worst = kInf;  // min relative margin; negative = violation size
    MeanAccumulator ratio;  // stat / |x-y|^2 across pairs
  };
  const std::size_t blocks = block_count(cfg.pair_count);
  std::vector<Partial> slots(blocks);
  parallel_blocks(cfg.pair_count, workers, [&](std::size_t b, std::size_t begin, std::size_t end) {
    Partial part;
    for (std::size_t i = begin; i < end; ++i) {
      PairSample p = cone_pair(cfg.cone, cfg.seed, i);
      double d2 = sq_dist(p.x, p.y);
      if (d2 == 0.0) continue;
      double f = phi(p.x, p.y);
      double stat = inv_m * prep.relu_sqdiff(p.x, p.y);
      double lower = (0.5 - f - half_delta) * d2;
      double upper = (0.5 - f + half_delta) * d2;
      double rel_margin = std::min(stat - lower, upper - stat) / d2;
      double nx = norm2(p.x), ny = norm2(p.y);
      int regime = std::sqrt(d2) >= cfg.C * std::max(nx, ny) ? 0 : 1;
      part.pairs[regime]++;
      if (rel_margin < 0.0) part.violations[regime]++;
      part.worst = std::min(part.worst, rel_margin);
      part.ratio.add(stat / d2);
    }
    slots[b] = part;
  });

  Partial total;
  for (const Partial& p : slots) {
    for (int r = 0; r < 2; ++r) {
      total.pairs[r] += p.pairs[r];
      total.violations[r] += p.violations[r];
    }
    total.worst = std::min(total.worst, p.worst);
    total.ratio.merge(p.ratio);
  }

  ExperimentReport rep;
  const char* names[2] = {"large_distance", "small_distance"};
  for (int r = 0; r < 2; ++r) {
    ReportRow row;
    row.label = names[r];
    row.add("n", static_cast<double>(cfg.n))
        .add("m", static_cast<double>(cfg.m))
        .add("delta", cfg.delta)
        .add("C", cfg.C)
        .add("pairs", static_cast<double>(total.pairs[r]))
        .add("violations", static_cast<double>(total.violations[r]));
    rep.rows.push_back(std::move(row));
  }
  ReportRow sum;
  sum.label = "all";
  sum.add("n", static_cast<double>(cfg.n))
      .add("m", static_cast<double>(cfg.m))
      .add("delta", cfg.delta)
      .add("C", cfg.C)
      .add("pairs", static_cast<double>(total.pairs[0] + total.pairs[1]))
      .add("violations", static_cast<double>(total.violations[0] + total.violations[1]))
      .add("worst_rel_margin", total.worst)
      // per-pair expectations obey 1/4 |x-y|^2 <= E <= 1/2 |x-y|^2, so the
      // mean normalized statistic must sit inside the same bracket
      .add("mean_ratio", total.ratio.mean())
      .add("pass", pass_flag(total.violations[0] + total.violations[1] == 0));
  rep.rows.push_back(std::move(sum));
  return rep;
}

ExperimentReport small_distance_profile(const ExperimentConfig& cfg,
                                        const std::vector<double>& eps_list, int workers) {
  Matrix a = gaussian_matrix(cfg.m, cfg.n, substream(cfg.seed, kMatrixStream));
  PreparedLayer prep{LayerMap{std::move(a)}};
  const double inv_m = 1.0 / static_cast<double>(cfg.m);

  ExperimentReport rep;
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    double eps = eps_list[e];
    if (!(eps > 0.0)) throw InputError("small_distance_profile: eps must be positive");
    struct Partial {
      MeanAccumulator acc;
      double lo = kInf, hi = -kInf;
    };
    const std::size_t blocks = block_count(cfg.pair_count);
    std::vector<Partial> slots(blocks);
    RngSeed eps_seed = substream(cfg.seed, kTrialStream + e);
    parallel_blocks(cfg.pair_count, workers,
                    [&](std::size_t b, std::size_t begin, std::size_t end) {
                      Partial part;
                      for (std::size_t i = begin; i < end; ++i) {
                        Sampler s(substream(eps_seed, i));
                        Vector x = sample_unit_sphere(cfg.n, s);
                        Vector u = sample_unit_sphere(cfg.n, s);
                        Vector y = x;
                        for (std::size_t j = 0; j < cfg.n; ++j) y[j] += eps * u[j];
                        double d2 = sq_dist(x, y);
                        double q = inv_m * prep.relu_sqdiff(x, y) / d2;
                        part.acc.add(q);
                        part.lo = std::min(part.lo, q);
                        part.hi = std::max(part.hi, q);
                      }
                      slots[b] = part;
                    });
    Partial total;
    for (const Partial& p : slots) {
      total.acc.merge(p.acc);
      total.lo = std::min(total.lo, p.lo);
      total.hi = std::max(total.hi, p.hi);
    }
    ReportRow row;
    row.add("eps", eps)
        .add("n", static_cast<double>(cfg.n))
        .add("m", static_cast<double>(cfg.m))
        .add("pairs", static_cast<double>(cfg.pair_count))
        .add("mean", total.acc.mean())
        .add("se", total.acc.se())
        .add("min", total.lo)
        .add("max", total.hi);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

ExperimentReport beta_sweep(std::size_t n, const std::vector<std::size_t>& m_list,
                            const RngSeed& seed, std::uint64_t pair_count,
                            std::uint64_t probe_count, int workers) {
  if (m_list.empty()) throw InputError("beta_sweep: empty m list");
  for (std::size_t i = 1; i < m_list.size(); ++i)
    if (m_list[i] <= m_list[i - 1]) throw InputError("beta_sweep: m list must be increasing");

  constexpr double kSqrt2 = 1.4142135623730951;
  ExperimentReport rep;
  for (std::size_t mi = 0; mi < m_list.size(); ++mi) {
    std::size_t m = m_list[mi];
    Matrix a = gaussian_matrix(m, n, substream(seed, kMatrixStream + mi));
    LayerMap layer{a};
    BiLipBracket bracket = sampled_bilip(layer, pair_count, substream(seed, kTrialStream + mi),
                                         /*include_structured=*/true, workers);
    Sqrt2Certificate cert =
        sqrt2_certificate(a, probe_count, substream(seed, kPairStream + mi));
    ReportRow row;
    row.add("m", static_cast<double>(m))
        .add("n", static_cast<double>(n))
        .add("pairs", static_cast<double>(pair_count))
        .add("U_lo", bracket.U_lo)
        .add("L_hi", bracket.L_hi)
        .add("beta_lo", bracket.beta_lo)
        .add("cert_ratio", cert.cert_ratio)
        .add("pass", pass_flag(cert.cert_ratio >= kSqrt2 - 1e-9));
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

ExperimentReport angle_preservation_check(const ExperimentConfig& cfg, int workers) {
  if (cfg.pair_count < 1) throw InputError("angle_preservation_check: need pairs");
  Matrix a = gaussian_matrix(cfg.m, cfg.n, substream(cfg.seed, kMatrixStream));
  PreparedLayer prep{LayerMap{std::move(a)}};

  struct Partial {
    double worst = 0.0;
    MeanAccumulator dev;
    std::uint64_t skipped = 0;
  };
  const std::size_t blocks = block_count(cfg.pair_count);
  std::vector<Partial> slots(blocks);
  parallel_blocks(cfg.pair_count, workers, [&](std::size_t b, std::size_t begin, std::size_t end) {
    Partial part;
    for (std::size_t i = begin; i < end; ++i) {
      Sampler s(substream(cfg.seed, kPairStream + i));
      Vector x = cfg.cone.sample_sphere(s);
      Vector y = cfg.cone.sample_sphere(s);
      double sx = prep.relu_sq(x);
      double sy = prep.relu_sq(y);
      if (sx == 0.0 || sy == 0.0) {
        part.skipped++;
        continue;
      }
      double cos_out = prep.relu_dot(x, y) / std::sqrt(sx * sy);
      double predicted = predicted_cos_angle(angle_theta(x, y));
      double dev = std::abs(cos_out - predicted);
      part.worst = std::max(part.worst, dev);
      part.dev.add(dev);
    }
    slots[b] = part;
  });
  Partial total;
  for (const Partial& p : slots) {
    total.worst = std::max(total.worst, p.worst);
    total.dev.merge(p.dev);
    total.skipped += p.skipped;
  }

  ExperimentReport rep;
  ReportRow row;
  row.add("n", static_cast<double>(cfg.n))
      .add("m", static_cast<double>(cfg.m))
      .add("pairs", static_cast<double>(cfg.pair_count))
      .add("skipped", static_cast<double>(total.skipped))
      .add("mean_dev", total.dev.mean())
      .add("max_dev", total.worst);
  rep.rows.push_back(std::move(row));
  return rep;
}

ExperimentReport rip_check(const ExperimentConfig& cfg, int workers) {
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw InputError("rip_check: delta must lie in (0, 1)");
  Matrix a = gaussian_matrix(cfg.m, cfg.n, substream(cfg.seed, kMatrixStream));
  PreparedLayer prep{LayerMap{std::move(a)}};
  const double inv_m = 1.0 / static_cast<double>(cfg.m);

  struct Partial {
    std::uint64_t violations = 0;
    double worst = kInf;
    MeanAccumulator stat;
  };
  const std::size_t blocks = block_count(cfg.pair_count);
  std::vector<Partial> slots(blocks);
  parallel_blocks(cfg.pair_count, workers, [&](std::size_t b, std::size_t begin, std::size_t end) {
    Partial part;
    for (std::size_t i = begin; i < end; ++i) {
      PairSample p = cone_pair(cfg.cone, cfg.seed, i);
      double d2 = sq_dist(p.x, p.y);
      if (d2 == 0.0) continue;
      Vector d(cfg.n);
      for (std::size_t j = 0; j < cfg.n; ++j) d[j] = p.x[j] - p.y[j];
      double q = inv_m * prep.matvec_sq(d) / d2;
      part.stat.add(q);
      double margin = std::min(q - (1.0 - cfg.delta), (1.0 + cfg.delta) - q);
      if (margin < 0.0) part.violations++;
      part.worst = std::min(part.worst, margin);
    }
    slots[b] = part;
  });
  Partial total;
  for (const Partial& p : slots) {
    total.violations += p.violations;
    total.worst = std::min(total.worst, p.worst);
    total.stat.merge(p.stat);
  }

  // The pairs share one A, so the mean of the statistic estimates
  // tr(A^T A)/(n m), a chi-square(nm)/nm quantity: its own concentration
  // band must be added to the per-pair standard error.
  double chi_band = 4.0 * std::sqrt(2.0 / (static_cast<double>(cfg.n) * cfg.m)) +
                    4.0 * total.stat.se();
  double chi_dev = std::abs(total.stat.mean() - 1.0);
  bool mean_ok = cfg.cone.kind != ConeSpec::Kind::full_space || chi_dev <= chi_band;

  ExperimentReport rep;
  ReportRow row;
  row.add("n", static_cast<double>(cfg.n))
      .add("m", static_cast<double>(cfg.m))
      .add("delta", cfg.delta)
      .add("pairs", static_cast<double>(total.stat.count))
      .add("violations", static_cast<double>(total.violations))
      .add("worst_margin", total.worst)
      .add("mean_stat", total.stat.mean())
      .add("se", total.stat.se())
      .add("chi_dev", chi_dev)
      .add("chi_band", chi_band)
      .add("pass", pass_flag(total.violations == 0 && mean_ok));
  rep.rows.push_back(std::move(row));
  return rep;
}

}  // namespace relucond
