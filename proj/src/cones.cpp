#include "relucond/cones.hpp"

#include <algorithm>
#include <cmath>

#include "relucond/geometry.hpp"
#include "relucond/kernels.hpp"
#include "relucond/parallel.hpp"

namespace relucond {

namespace {

constexpr int kRejectionLimit = 100000;
constexpr int kPgdIterations = 200;

void project_cone(const ConeSpec& spec, Vector& v) {
  switch (spec.kind) {
    case ConeSpec::Kind::full_space:
      return;
    case ConeSpec::Kind::sparse: {
      // Keep the k largest-magnitude coordinates.
      if (spec.k >= spec.n) return;
      std::vector<std::size_t> idx(spec.n);
      for (std::size_t i = 0; i < spec.n; ++i) idx[i] = i;
      std::nth_element(idx.begin(), idx.begin() + spec.k, idx.end(),
                       [&](std::size_t a, std::size_t b) {
                         return std::abs(v[a]) > std::abs(v[b]) ||
                                (std::abs(v[a]) == std::abs(v[b]) && a < b);
                       });
      for (std::size_t i = spec.k; i < spec.n; ++i) v[idx[i]] = 0.0;
      return;
    }
    case ConeSpec::Kind::custom_halfspaces: {
      // Cyclic projections; adequate as an inner lower-bound step.
      for (int pass = 0; pass < 4; ++pass) {
        for (const Vector& nv : spec.normals) {
          double d = kernels::active().dot(nv.data(), v.data(), v.size());
          if (d < 0.0) {
            double nn = kernels::active().sum_sq(nv.data(), nv.size());
            if (nn == 0.0) continue;
            double c = d / nn;
            for (std::size_t j = 0; j < v.size(); ++j) v[j] -= c * nv[j];
          }
        }
      }
      return;
    }
  }
}

}  // namespace

ConeSpec ConeSpec::full(std::size_t n) {
  if (n < 1) throw InputError("cone dimension must be >= 1");
  ConeSpec s;
  s.kind = Kind::full_space;
  s.n = n;
  return s;
}

ConeSpec ConeSpec::sparse_cone(std::size_t n, std::size_t k) {
  if (n < 1 || k < 1 || k > n) throw InputError("sparse cone requires 1 <= k <= n");
  ConeSpec s;
  s.kind = Kind::sparse;
  s.n = n;
  s.k = k;
  return s;
}

ConeSpec ConeSpec::halfspaces(std::size_t n, std::vector<Vector> normals) {
  if (n < 1) throw InputError("cone dimension must be >= 1");
  for (const Vector& v : normals)
    if (v.size() != n) throw InputError("halfspace normal has wrong dimension");
  ConeSpec s;
  s.kind = Kind::custom_halfspaces;
  s.n = n;
  s.normals = std::move(normals);
  return s;
}

bool ConeSpec::member(const Vector& x) const {
  if (x.size() != n) return false;
  switch (kind) {
    case Kind::full_space:
      return true;
    case Kind::sparse: {
      std::size_t nnz = 0;
      for (double v : x)
        if (v != 0.0) ++nnz;
      return nnz <= k;
    }
    case Kind::custom_halfspaces: {
      double nx = norm2(x);
      for (const Vector& nv : normals) {
        double d = kernels::active().dot(nv.data(), x.data(), n);
        if (d < -1e-12 * norm2(nv) * nx) return false;
      }
      return true;
    }
  }
  return false;
}

Vector ConeSpec::sample_sphere(Sampler& s) const {
  switch (kind) {
    case Kind::full_space:
      return sample_unit_sphere(n, s);
    case Kind::sparse: {
      // Seeded support choice, Gaussian coordinates on it, normalized.
      std::vector<std::size_t> pool(n);
      for (std::size_t i = 0; i < n; ++i) pool[i] = i;
      Vector x(n, 0.0);
      for (std::size_t pick = 0; pick < k; ++pick) {
        std::size_t j = pick + static_cast<std::size_t>(s.next_index(n - pick));
        std::swap(pool[pick], pool[j]);
      }
      double nrm = 0.0;
      while (nrm == 0.0) {
        for (std::size_t pick = 0; pick < k; ++pick) x[pool[pick]] = s.normal();
        nrm = norm2(x);
      }
      for (std::size_t pick = 0; pick < k; ++pick) x[pool[pick]] /= nrm;
      return x;
    }
    case Kind::custom_halfspaces: {
      for (int tries = 0; tries < kRejectionLimit; ++tries) {
        Vector x = sample_unit_sphere(n, s);
        if (member(x)) return x;
      }
      throw InputError("custom cone appears to have empty interior (rejection limit)");
    }
  }
  throw InputError("unknown cone kind");
}

double ConeSpec::width_max(const Vector& g) const {
  if (g.size() != n) throw InputError("width_max: dimension mismatch");
  switch (kind) {
    case Kind::full_space:
      return norm2(g);
    case Kind::sparse: {
      // Differences of k-sparse vectors are 2k-sparse: the maximizer picks
      // the 2k largest-magnitude coordinates of g.
      std::size_t take = std::min(2 * k, n);
      Vector mags(n);
      for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(g[i]);
      std::nth_element(mags.begin(), mags.begin() + (take - 1), mags.end(),
                       std::greater<double>());
      double s = 0.0;
      for (std::size_t i = 0; i < take; ++i) s += mags[i] * mags[i];
      return std::sqrt(s);
    }
    case Kind::custom_halfspaces: {
      // Projected gradient over u, v in S with ||u - v|| <= 1; any feasible
      // iterate is a valid lower bound, so report the best one seen.
      Vector u(n, 0.0), v(n, 0.0);
      double gn = norm2(g);
      if (gn == 0.0) return 0.0;
      double step = 0.25 / gn;
      double best = 0.0;
      for (int it = 0; it < kPgdIterations; ++it) {
        for (std::size_t j = 0; j < n; ++j) {
          u[j] += step * g[j];
          v[j] -= step * g[j];
        }
        project_cone(*this, u);
        project_cone(*this, v);
        Vector d(n);
        for (std::size_t j = 0; j < n; ++j) d[j] = u[j] - v[j];
        double dn = norm2(d);
        if (dn > 1.0) {
          for (std::size_t j = 0; j < n; ++j) {
            u[j] /= dn;
            v[j] /= dn;
          }
          for (std::size_t j = 0; j < n; ++j) d[j] = u[j] - v[j];
        }
        if (member(u) && member(v) && norm2(d) <= 1.0 + 1e-12)
          best = std::max(best, kernels::active().dot(g.data(), d.data(), n));
      }
      return best;
    }
  }
  throw InputError("unknown cone kind");
}

std::string ConeSpec::describe() const {
  switch (kind) {
    case Kind::full_space:
      return "full";
    case Kind::sparse:
      return "sparse:" + std::to_string(k);
    case Kind::custom_halfspaces:
      return "halfspaces:" + std::to_string(normals.size());
  }
  return "?";
}

WidthEstimate gaussian_width_mc(const ConeSpec& spec, std::uint64_t draws,
                                const RngSeed& seed, int workers) {
  if (draws < 2) throw InputError("gaussian_width_mc: draws must be >= 2");
  const std::size_t blocks = block_count(draws);
  std::vector<MeanAccumulator> slots(blocks);
  parallel_blocks(draws, workers, [&](std::size_t b, std::size_t begin, std::size_t end) {
    MeanAccumulator acc;
    for (std::size_t i = begin; i < end; ++i) {
      Sampler s(substream(seed, i));
      Vector g = gaussian_vector(spec.n, s);
      acc.add(spec.width_max(g));
    }
    slots[b] = acc;
  });
  MeanAccumulator total;
  for (const MeanAccumulator& a : slots) total.merge(a);
  return WidthEstimate{total.mean(), total.se(), draws};
}

EpsilonNet epsilon_net_sphere(std::size_t n, double eps, const RngSeed& seed,
                              std::uint64_t probes) {
  if (!(eps > 0.0 && eps < 2.0)) throw InputError("epsilon_net_sphere: eps must be in (0, 2)");
  if (n < 1 || n > 6) throw InputError("epsilon_net_sphere: n limited to 1..6");

  EpsilonNet out;
  if (n == 1) {
    out.net = {Vector{-1.0}, Vector{1.0}};
  } else {
    // Farthest-point greedy over a seeded candidate pool: repeatedly add the
    // pool point farthest from the net until everything is covered.
    const std::size_t pool_size = 50000;
    Sampler s(substream(seed, 0));
    std::vector<Vector> pool(pool_size);
    for (Vector& p : pool) p = sample_unit_sphere(n, s);
    std::vector<double> dist(pool_size, kInf);
    out.net.push_back(pool[0]);
    for (;;) {
      double far = -1.0;
      std::size_t far_i = 0;
      const Vector& last = out.net.back();
      for (std::size_t i = 0; i < pool_size; ++i) {
        double d = std::sqrt(sq_dist(pool[i], last));
        if (d < dist[i]) dist[i] = d;
        if (dist[i] > far) {
          far = dist[i];
          far_i = i;
        }
      }
      if (far <= eps) break;
      out.net.push_back(pool[far_i]);
    }
  }

  out.verified = true;
  Sampler ps(substream(seed, 1));
  for (std::uint64_t p = 0; p < probes; ++p) {
    Vector q = sample_unit_sphere(n, ps);
    double best = kInf;
    for (const Vector& c : out.net) best = std::min(best, std::sqrt(sq_dist(q, c)));
    if (best > eps) {
      out.verified = false;
      out.uncovered_witness = q;
      break;
    }
  }
  out.sudakov_quantity = eps * std::sqrt(std::log(static_cast<double>(out.net.size())));
  return out;
}

}  // namespace relucond
