#pragma once

#include "relucond/kernels.hpp"
#include "relucond/types.hpp"

namespace relucond {

/// One ReLU layer x -> relu(A x + b).  Callers apply the 1/sqrt(m)
/// normalization; pairwise_ratio does so internally.
struct LayerMap {
  Matrix A;
  Vector b;  // length A.rows; empty means zero

  LayerMap() = default;
  LayerMap(Matrix a, Vector bias) : A(std::move(a)), b(std::move(bias)) {
    if (!b.empty() && b.size() != A.rows)
      throw InputError("layer bias length must equal the row count");
  }
  explicit LayerMap(Matrix a) : A(std::move(a)) {}

  bool zero_bias() const;
};

/// Column-major copy of a layer for the reduction kernels.  Build once per
/// layer, then evaluate many pairs against it.
class PreparedLayer {
 public:
  explicit PreparedLayer(const LayerMap& layer);

  std::size_t m() const { return m_; }
  std::size_t n() const { return n_; }

  double relu_sqdiff(const Vector& x, const Vector& y) const;
  double relu_sq(const Vector& x) const;
  double relu_dot(const Vector& x, const Vector& y) const;
  double matvec_sq(const Vector& d) const;  // ignores the bias

  /// (1/sqrt(m)) * ||relu(Ax+b) - relu(Ay+b)|| / ||x-y||
  double pairwise_ratio(const Vector& x, const Vector& y) const;

  /// (1/sqrt(m)) * ||relu(Ax+b)|| / ||x||, the ratio against the origin.
  double origin_ratio(const Vector& x) const;

 private:
  std::size_t m_ = 0, n_ = 0;
  std::vector<double> acol_;
  std::vector<double> bias_;  // empty = zero
  const double* bias_ptr() const { return bias_.empty() ? nullptr : bias_.data(); }
};

Vector relu(const Vector& v);
Vector layer_apply(const LayerMap& layer, const Vector& x);
double pairwise_ratio(const LayerMap& layer, const Vector& x, const Vector& y);

double norm2(const Vector& v);
double sq_dist(const Vector& x, const Vector& y);

/// Angle in [0, pi]; arccos argument clamped to [-1, 1].
double angle_theta(const Vector& x, const Vector& y);

/// (sin t - t cos t)/pi * |x||y| / |x-y|^2, in [0, 1/4]; zero when x or y
/// is the zero vector.
double phi(const Vector& x, const Vector& y);

/// phi(x,y) * |x-y|^2.
double psi(const Vector& x, const Vector& y);

/// Exact E[(relu(<a,x>) - relu(<a,y>))^2] for a standard Gaussian row a:
/// |x-y|^2 / 2 - psi(x,y).  Zero when x = y.
double expected_sq_distance(const Vector& x, const Vector& y);

/// cos t + (sin t - t cos t)/pi: the predicted cosine of the angle between
/// relu(Ax) and relu(Ay) for a wide Gaussian layer.
double predicted_cos_angle(double theta);

enum class RampKind { tail_beta, relaxed_alpha, strict_alpha };

/// Piecewise-quadratic indicator surrogates; values in [0, 1], continuous.
///   tail_beta:     0 below 0.9b, quadratic on [0.9b, b), 1 from b
///   relaxed_alpha: 0 below -1.1a, quadratic on [-1.1a, -a), 1 from -a
///   strict_alpha:  0 below a, quadratic on [a, 1.1a), 1 from 1.1a
double smoothing_ramp(double t, RampKind kind, double param);

}  // namespace relucond
