#include "relucond/exact.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "relucond/geometry.hpp"
#include "relucond/linalg.hpp"
#include "relucond/rng.hpp"

namespace relucond {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_exact_limits(const Matrix& a) {
  if (a.cols > kMaxExactCols || a.rows > kMaxExactRows)
    throw InputError("exact analysis limited to n <= 4, m <= 24");
  if (!a.all_finite()) throw InputError("exact analysis requires finite entries");
}

struct RowInfo {
  std::vector<double> row_norm;          // 0.0 marks an all-zero row
  std::vector<Vector> unit;              // unit normals of nonzero rows (original index)
  std::vector<std::size_t> nonzero_idx;  // original indices of nonzero rows
};

RowInfo row_info(const Matrix& a) {
  RowInfo info;
  info.row_norm.resize(a.rows);
  info.unit.resize(a.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    Vector r(a.row(i), a.row(i) + a.cols);
    double nrm = norm2(r);
    info.row_norm[i] = nrm;
    if (nrm > 0.0) {
      for (double& v : r) v /= nrm;
      info.unit[i] = std::move(r);
      info.nonzero_idx.push_back(i);
    }
  }
  return info;
}

// Distinct undirected normals; sets the degeneracy flag when two distinct
// rows share a hyperplane within 1e-10.
std::vector<Vector> dedup_normals(const RowInfo& info, bool* degenerate) {
  std::vector<Vector> reps;
  for (std::size_t i : info.nonzero_idx) {
    const Vector& u = info.unit[i];
    bool dup = false;
    for (const Vector& r : reps) {
      double dplus = 0.0, dminus = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) {
        dplus += (u[k] - r[k]) * (u[k] - r[k]);
        dminus += (u[k] + r[k]) * (u[k] + r[k]);
      }
      if (std::sqrt(std::min(dplus, dminus)) <= 1e-10) {
        dup = true;
        break;
      }
    }
    if (dup)
      *degenerate = true;
    else
      reps.push_back(u);
  }
  return reps;
}

// Sign pattern of a candidate direction, or nullopt-like failure when some
// nonzero row sits within the margin.
bool pattern_of(const Matrix& a, const RowInfo& info, const Vector& x,
                std::uint32_t* mask, double* min_margin) {
  std::uint32_t result = 0;
  double worst = kInf;
  for (std::size_t i = 0; i < a.rows; ++i) {
    if (info.row_norm[i] == 0.0) continue;  // zero rows are never active
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) s = std::fma(a(i, j), x[j], s);
    double margin = std::abs(s) / info.row_norm[i];
    if (margin < kPatternTol) return false;
    worst = std::min(worst, margin);
    if (s > 0.0) result |= (1u << i);
  }
  *mask = result;
  *min_margin = worst;
  return true;
}

void normalize(Vector& v) {
  double nrm = norm2(v);
  if (nrm > 0.0)
    for (double& x : v) x /= nrm;
}

std::vector<Vector> candidates_1d() { return {Vector{1.0}, Vector{-1.0}}; }

// Exact construction for central line arrangements: boundary directions are
// the normals rotated by pi/2; cells are the sectors between consecutive
// boundaries.
std::vector<Vector> candidates_2d(const std::vector<Vector>& normals) {
  std::vector<double> bounds;
  for (const Vector& u : normals) {
    double base = std::atan2(u[1], u[0]);
    for (double shift : {0.5 * kTwoPi / 2.0, -0.5 * kTwoPi / 2.0}) {
      double ang = std::fmod(base + shift, kTwoPi);
      if (ang < 0.0) ang += kTwoPi;
      bounds.push_back(ang);
    }
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end(),
                           [](double p, double q) { return std::abs(p - q) < 1e-12; }),
               bounds.end());
  std::vector<Vector> cands;
  if (bounds.empty()) {
    cands.push_back(Vector{1.0, 0.0});
    return cands;
  }
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    double next = (k + 1 < bounds.size()) ? bounds[k + 1] : bounds[0] + kTwoPi;
    double mid = 0.5 * (bounds[k] + next);
    cands.push_back(Vector{std::cos(mid), std::sin(mid)});
  }
  return cands;
}

// n = 3, 4: spine directions from null spaces of normal subsets, pushed off
// every hyperplane through them by signed perturbations, plus seeded random
// probes.  Margin checking discards anything that landed badly.
std::vector<Vector> candidates_nd(const std::vector<Vector>& normals, std::size_t n) {
  std::vector<Vector> cands;
  Sampler probe(RngSeed{0x9E3779B97F4A7C15ull, 0});

  // Around a spine direction v, target every sign combination of the
  // hyperplanes through v exactly: solve N d = s in the least-squares sense
  // so correlated normals cannot flip an intended sign.
  auto add_perturbed = [&](const Vector& spine) {
    for (double sign : {1.0, -1.0}) {
      Vector v = spine;
      for (double& x : v) x *= sign;
      std::vector<std::size_t> through;
      for (std::size_t i = 0; i < normals.size(); ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j) d += normals[i][j] * v[j];
        if (std::abs(d) <= 1e-8) through.push_back(i);
      }
      if (through.empty() || through.size() > 14) continue;
      Eigen::MatrixXd nt(through.size(), n);
      for (std::size_t r = 0; r < through.size(); ++r)
        for (std::size_t j = 0; j < n; ++j) nt(r, j) = normals[through[r]][j];
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(nt);
      std::uint32_t combos = 1u << through.size();
      for (std::uint32_t c = 0; c < combos; ++c) {
        Eigen::VectorXd target(through.size());
        for (std::size_t t = 0; t < through.size(); ++t)
          target(t) = ((c >> t) & 1u) ? 1.0 : -1.0;
        Eigen::VectorXd d = cod.solve(target);
        if ((nt * d - target).norm() > 1e-8) continue;  // unreachable combo
        double dn = d.norm();
        if (dn == 0.0) continue;
        for (double eps : {1e-3, 1e-5, 1e-7}) {
          Vector w = v;
          for (std::size_t j = 0; j < n; ++j) w[j] += eps * d(j) / dn;
          normalize(w);
          cands.push_back(std::move(w));
        }
      }
    }
  };

  std::size_t k = normals.size();
  std::vector<std::size_t> idx;
  auto process_subset = [&](const std::vector<std::size_t>& subset) {
    Eigen::MatrixXd stack(subset.size(), n);
    for (std::size_t r = 0; r < subset.size(); ++r)
      for (std::size_t j = 0; j < n; ++j) stack(r, j) = normals[subset[r]][j];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(stack);
    lu.setThreshold(1e-10);
    Eigen::MatrixXd null_basis = lu.kernel();
    if (null_basis.cols() == 0) return;
    for (Eigen::Index c = 0; c < null_basis.cols(); ++c) {
      Vector spine(n);
      for (std::size_t j = 0; j < n; ++j) spine[j] = null_basis(j, c);
      normalize(spine);
      add_perturbed(spine);
    }
    // A generic direction inside higher-dimensional null spaces.
    if (null_basis.cols() > 1) {
      Vector spine(n, 0.0);
      for (Eigen::Index c = 0; c < null_basis.cols(); ++c) {
        double w = probe.normal();
        for (std::size_t j = 0; j < n; ++j) spine[j] += w * null_basis(j, c);
      }
      normalize(spine);
      add_perturbed(spine);
    }
  };

  // Subsets of size 1 .. n-1 (m <= 24, n <= 4: a few thousand at most).
  for (std::size_t s1 = 0; s1 < k; ++s1) {
    process_subset({s1});
    if (n < 3) continue;
    for (std::size_t s2 = s1 + 1; s2 < k; ++s2) {
      process_subset({s1, s2});
      if (n < 4) continue;
      for (std::size_t s3 = s2 + 1; s3 < k; ++s3) process_subset({s1, s2, s3});
    }
  }

  for (int r = 0; r < 4096; ++r) cands.push_back(sample_unit_sphere(n, probe));
  return cands;
}

Matrix submatrix(const Matrix& a, std::uint32_t mask) {
  std::size_t count = static_cast<std::size_t>(__builtin_popcount(mask));
  Matrix s(count, a.cols);
  std::size_t r = 0;
  for (std::size_t i = 0; i < a.rows; ++i)
    if ((mask >> i) & 1u) {
      for (std::size_t j = 0; j < a.cols; ++j) s(r, j) = a(i, j);
      ++r;
    }
  return s;
}

}  // namespace

CellEnumeration enumerate_cells(const Matrix& a) {
  check_exact_limits(a);
  CellEnumeration out;
  RowInfo info = row_info(a);
  std::vector<Vector> normals = dedup_normals(info, &out.degenerate_warning);
  out.distinct_normals = normals.size();

  std::vector<Vector> cands;
  if (normals.empty()) {
    Vector e1(a.cols, 0.0);
    e1[0] = 1.0;
    cands.push_back(e1);
  } else if (a.cols == 1) {
    cands = candidates_1d();
  } else if (a.cols == 2) {
    cands = candidates_2d(normals);
  } else {
    cands = candidates_nd(normals, a.cols);
  }

  std::map<std::uint32_t, std::pair<Vector, double>> best;  // mask -> (witness, margin)
  for (Vector& c : cands) {
    normalize(c);
    std::uint32_t mask = 0;
    double margin = 0.0;
    if (!pattern_of(a, info, c, &mask, &margin)) continue;
    auto it = best.find(mask);
    if (it == best.end() || margin > it->second.second) best[mask] = {c, margin};
  }

  for (auto& [mask, wit] : best)
    out.patterns.push_back(ActivationPattern{mask, std::move(wit.first)});
  out.has_empty_cell =
      !out.patterns.empty() && out.patterns.front().active_rows == 0u;

  // Central line arrangements in the plane have exactly 2m' open sectors.
  if (a.cols == 2 && !normals.empty() &&
      out.patterns.size() != 2 * normals.size())
    throw NumericError("cell enumeration incomplete for a planar arrangement");

  return out;
}

double lambda_of_A(const Matrix& a) {
  CellEnumeration cells = enumerate_cells(a);
  double lambda = kInf;
  bool any = false;
  for (const ActivationPattern& p : cells.patterns) {
    if (p.active_rows == 0) continue;
    any = true;
    if (p.count() < a.cols) return 0.0;
    Matrix sub = submatrix(a, p.active_rows);
    lambda = std::min(lambda, singular_extremes(sub).sigma_min_n);
  }
  return any ? lambda : 0.0;
}

double exact_upper_lipschitz(const Matrix& a) {
  CellEnumeration cells = enumerate_cells(a);
  double top = 0.0;
  for (const ActivationPattern& p : cells.patterns) {
    if (p.active_rows == 0) continue;
    Matrix sub = submatrix(a, p.active_rows);
    top = std::max(top, singular_extremes(sub).sigma_max);
  }
  return top / std::sqrt(static_cast<double>(a.rows));
}

BoundsReport related_bounds(const Matrix& a) {
  CellEnumeration cells = enumerate_cells(a);
  BoundsReport rep;
  rep.has_empty_cell = cells.has_empty_cell;
  rep.degenerate_warning = cells.degenerate_warning;
  rep.lambda_max = singular_extremes(a).sigma_max;

  double lambda = kInf;
  bool any = false;
  for (const ActivationPattern& p : cells.patterns) {
    if (p.active_rows == 0) continue;
    any = true;
    if (p.count() < a.cols) {
      lambda = 0.0;
      break;
    }
    Matrix sub = submatrix(a, p.active_rows);
    lambda = std::min(lambda, singular_extremes(sub).sigma_min_n);
  }
  rep.lambda_A = any ? lambda : 0.0;

  double m = static_cast<double>(a.rows);
  rep.L_lower_reading1 = std::sqrt(rep.lambda_A / (2.0 * m));
  rep.L_reading2_lo = 0.5 * std::sqrt(rep.lambda_A);
  rep.L_reading2_hi = std::sqrt(rep.lambda_A);
  rep.beta_upper = rep.lambda_A > 0.0 ? 2.0 * std::sqrt(rep.lambda_max / rep.lambda_A) : kInf;
  return rep;
}

namespace {

struct GridExtremes {
  double max_ratio = 0.0;
  double min_ratio = kInf;
  Vector max_x, max_y, min_x, min_y;
  std::uint64_t pairs = 0;

  void feed(double r, const Vector& x, const Vector& y) {
    ++pairs;
    if (r > max_ratio || max_x.empty()) {
      max_ratio = r;
      max_x = x;
      max_y = y;
    }
    if (r < min_ratio || min_x.empty()) {
      min_ratio = r;
      min_x = x;
      min_y = y;
    }
  }
};

double safe_ratio(const PreparedLayer& prep, const Vector& x, const Vector& y,
                  bool* ok) {
  double d2 = sq_dist(x, y);
  if (d2 == 0.0) {
    *ok = false;
    return 0.0;
  }
  *ok = true;
  return std::sqrt(prep.relu_sqdiff(x, y) / (static_cast<double>(prep.m()) * d2));
}

// Greedy coordinate descent over an angle/radius parametrization; step
// halves after any full sweep without improvement.
template <class Decode>
double polish(const PreparedLayer& prep, std::vector<double> params,
              std::vector<double> steps, bool maximize, int iters, Decode decode) {
  auto eval = [&](const std::vector<double>& p, bool* ok) {
    Vector x, y;
    decode(p, &x, &y);
    return safe_ratio(prep, x, y, ok);
  };
  bool ok = false;
  double best = eval(params, &ok);
  if (!ok) return maximize ? 0.0 : kInf;
  for (int it = 0; it < iters; ++it) {
    bool improved = false;
    for (std::size_t v = 0; v < params.size(); ++v) {
      for (double dir : {1.0, -1.0}) {
        std::vector<double> trial = params;
        trial[v] += dir * steps[v];
        bool cok = false;
        double r = eval(trial, &cok);
        if (!cok) continue;
        if ((maximize && r > best) || (!maximize && r < best)) {
          best = r;
          params = trial;
          improved = true;
        }
      }
    }
    if (!improved)
      for (double& s : steps) s *= 0.5;
  }
  return best;
}

}  // namespace

BiLipBracket brute_force_bilip(const Matrix& a, std::size_t resolution) {
  if (a.cols > 2) throw InputError("brute_force_bilip supports n in {1, 2} only");
  if (resolution < 8) throw InputError("brute_force_bilip: resolution too small");
  PreparedLayer prep(LayerMap{a});
  GridExtremes ext;

  if (a.cols == 1) {
    for (double xs : {-1.0, 1.0}) {
      Vector x{xs};
      for (std::size_t k = 0; k <= resolution; ++k) {
        Vector y{-1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(resolution)};
        bool ok = false;
        double r = safe_ratio(prep, x, y, &ok);
        if (ok) ext.feed(r, x, y);
      }
    }
    // Polish y with x pinned to each half of the 0-sphere.
    for (bool maximize : {true, false}) {
      const Vector& sx = maximize ? ext.max_x : ext.min_x;
      const Vector& sy = maximize ? ext.max_y : ext.min_y;
      double xs = sx[0];
      double r = polish(
          prep, {sy[0]}, {2.0 / static_cast<double>(resolution)}, maximize, 40,
          [&](const std::vector<double>& p, Vector* x, Vector* y) {
            *x = Vector{xs};
            *y = Vector{std::clamp(p[0], -1.0, 1.0)};
          });
      if (maximize)
        ext.max_ratio = std::max(ext.max_ratio, r);
      else
        ext.min_ratio = std::min(ext.min_ratio, r);
    }
  } else {
    std::size_t radial = std::max<std::size_t>(resolution / 10, 1);
    std::vector<Vector> xs(resolution);
    std::vector<double> xang(resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
      double ang = kTwoPi * static_cast<double>(i) / static_cast<double>(resolution);
      xang[i] = ang;
      xs[i] = Vector{std::cos(ang), std::sin(ang)};
    }
    struct BallPoint {
      Vector y;
      double ang, rad;
    };
    std::vector<BallPoint> ys;
    ys.push_back({Vector{0.0, 0.0}, 0.0, 0.0});
    for (std::size_t j = 0; j < resolution; ++j) {
      double ang = kTwoPi * static_cast<double>(j) / static_cast<double>(resolution);
      for (std::size_t q = 1; q <= radial; ++q) {
        double rad = static_cast<double>(q) / static_cast<double>(radial);
        ys.push_back({Vector{rad * std::cos(ang), rad * std::sin(ang)}, ang, rad});
      }
    }
    double best_max = -1.0, best_min = kInf;
    std::array<double, 3> max_par{0, 0, 0}, min_par{0, 0, 0};
    for (std::size_t i = 0; i < resolution; ++i) {
      for (const BallPoint& bp : ys) {
        bool ok = false;
        double r = safe_ratio(prep, xs[i], bp.y, &ok);
        if (!ok) continue;
        ext.feed(r, xs[i], bp.y);
        if (r > best_max) {
          best_max = r;
          max_par = {xang[i], bp.ang, bp.rad};
        }
        if (r < best_min) {
          best_min = r;
          min_par = {xang[i], bp.ang, bp.rad};
        }
      }
    }
    double astep = kTwoPi / static_cast<double>(resolution);
    double rstep = 1.0 / static_cast<double>(radial);
    for (bool maximize : {true, false}) {
      const auto& par = maximize ? max_par : min_par;
      double r = polish(
          prep, {par[0], par[1], par[2]}, {astep, astep, rstep}, maximize, 40,
          [&](const std::vector<double>& p, Vector* x, Vector* y) {
            double rad = std::clamp(p[2], 0.0, 1.0);
            *x = Vector{std::cos(p[0]), std::sin(p[0])};
            *y = Vector{rad * std::cos(p[1]), rad * std::sin(p[1])};
          });
      if (maximize)
        ext.max_ratio = std::max(ext.max_ratio, r);
      else
        ext.min_ratio = std::min(ext.min_ratio, r);
    }
  }

  BiLipBracket bracket;
  bracket.U_lo = ext.max_ratio;
  bracket.L_hi = ext.min_ratio;
  bracket.max_x = ext.max_x;
  bracket.max_y = ext.max_y;
  bracket.min_x = ext.min_x;
  bracket.min_y = ext.min_y;
  bracket.sample_count = ext.pairs;
  if (a.rows <= kMaxExactRows && a.cols <= kMaxExactCols) {
    bracket.U_hi = exact_upper_lipschitz(a);
    double lambda = lambda_of_A(a);
    if (lambda > 0.0)
      bracket.L_lo = std::sqrt(lambda / (2.0 * static_cast<double>(a.rows)));
  } else {
    bracket.U_hi = singular_extremes(a).sigma_max / std::sqrt(static_cast<double>(a.rows));
  }
  finalize_beta(bracket);
  return bracket;
}

}  // namespace relucond
