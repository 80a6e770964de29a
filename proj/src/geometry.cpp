#include "relucond/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace relucond {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

// (sin t - t cos t) / pi, with a series branch near zero where the direct
// form cancels.
double angular_factor(double t) {
  if (t < 0.01) {
    double t2 = t * t;
    return t * t2 * (1.0 / 3.0 - t2 / 30.0 + t2 * t2 / 840.0) / kPi;
  }
  return (std::sin(t) - t * std::cos(t)) / kPi;
}

bool is_antipodal(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (y[i] != -x[i]) return false;
  return true;
}

bool bit_equal(const Vector& x, const Vector& y) {
  return x.size() == y.size() && std::equal(x.begin(), x.end(), y.begin());
}

void check_dims(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw InputError("vector dimensions do not match");
}

}  // namespace

bool LayerMap::zero_bias() const {
  for (double v : b)
    if (v != 0.0) return false;
  return true;
}

PreparedLayer::PreparedLayer(const LayerMap& layer)
    : m_(layer.A.rows), n_(layer.A.cols), acol_(m_ * n_) {
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t j = 0; j < n_; ++j) acol_[j * m_ + i] = layer.A(i, j);
  if (!layer.b.empty() && !layer.zero_bias()) bias_ = layer.b;
}

double PreparedLayer::relu_sqdiff(const Vector& x, const Vector& y) const {
  return kernels::active().relu_sqdiff_sum(acol_.data(), bias_ptr(), m_, n_, x.data(), y.data());
}

double PreparedLayer::relu_sq(const Vector& x) const {
  return kernels::active().relu_sq_sum(acol_.data(), bias_ptr(), m_, n_, x.data());
}

double PreparedLayer::relu_dot(const Vector& x, const Vector& y) const {
  return kernels::active().relu_dot_sum(acol_.data(), bias_ptr(), m_, n_, x.data(), y.data());
}

double PreparedLayer::matvec_sq(const Vector& d) const {
  return kernels::active().matvec_sq_sum(acol_.data(), m_, n_, d.data());
}

double PreparedLayer::pairwise_ratio(const Vector& x, const Vector& y) const {
  check_dims(x, y);
  if (x.size() != n_) throw InputError("pairwise_ratio: vector dimension != layer columns");
  if (bit_equal(x, y)) throw InputError("pairwise_ratio: degenerate pair x == y");
  double num = relu_sqdiff(x, y);
  double den = kernels::active().sum_sq_diff(x.data(), y.data(), x.size());
  return std::sqrt(num / (static_cast<double>(m_) * den));
}

double PreparedLayer::origin_ratio(const Vector& x) const {
  double nx = kernels::active().sum_sq(x.data(), x.size());
  if (nx == 0.0) throw InputError("origin ratio of the zero vector");
  return std::sqrt(relu_sq(x) / (static_cast<double>(m_) * nx));
}

Vector relu(const Vector& v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(0.0, v[i]);
  return out;
}

Vector layer_apply(const LayerMap& layer, const Vector& x) {
  if (x.size() != layer.A.cols) throw InputError("layer_apply: dimension mismatch");
  Vector out(layer.A.rows);
  for (std::size_t i = 0; i < layer.A.rows; ++i) {
    double d = layer.b.empty() ? 0.0 : layer.b[i];
    const double* row = layer.A.row(i);
    for (std::size_t j = 0; j < layer.A.cols; ++j) d = std::fma(row[j], x[j], d);
    out[i] = std::max(0.0, d);
  }
  return out;
}

double pairwise_ratio(const LayerMap& layer, const Vector& x, const Vector& y) {
  return PreparedLayer(layer).pairwise_ratio(x, y);
}

double norm2(const Vector& v) {
  return std::sqrt(kernels::active().sum_sq(v.data(), v.size()));
}

double sq_dist(const Vector& x, const Vector& y) {
  check_dims(x, y);
  return kernels::active().sum_sq_diff(x.data(), y.data(), x.size());
}

double angle_theta(const Vector& x, const Vector& y) {
  check_dims(x, y);
  double nx = norm2(x);
  double ny = norm2(y);
  if (nx == 0.0 || ny == 0.0) throw InputError("angle_theta: undefined angle for the zero vector");
  double c = kernels::active().dot(x.data(), y.data(), x.size()) / (nx * ny);
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c);
}

double phi(const Vector& x, const Vector& y) {
  check_dims(x, y);
  if (bit_equal(x, y)) throw InputError("phi: degenerate pair x == y");
  double nx = norm2(x);
  double ny = norm2(y);
  if (nx == 0.0 || ny == 0.0) return 0.0;
  // Antipodal pairs sit at the extreme value, algebraically exactly 1/4.
  if (is_antipodal(x, y)) return 0.25;
  double d2 = sq_dist(x, y);
  if (d2 < 1e-26 * std::max(nx, ny) * std::max(nx, ny))
    throw InputError("phi: pair closer than 1e-13 relative, 0/0 regime");
  return angular_factor(angle_theta(x, y)) * nx * ny / d2;
}

double psi(const Vector& x, const Vector& y) {
  check_dims(x, y);
  if (bit_equal(x, y)) throw InputError("psi: degenerate pair x == y");
  double nx = norm2(x);
  double ny = norm2(y);
  if (nx == 0.0 || ny == 0.0) return 0.0;
  if (is_antipodal(x, y)) return 0.25 * sq_dist(x, y);
  double d2 = sq_dist(x, y);
  if (d2 < 1e-26 * std::max(nx, ny) * std::max(nx, ny))
    throw InputError("psi: pair closer than 1e-13 relative, 0/0 regime");
  // phi * |x-y|^2 with the |x-y|^2 factors cancelled analytically.
  return angular_factor(angle_theta(x, y)) * nx * ny;
}

double expected_sq_distance(const Vector& x, const Vector& y) {
  check_dims(x, y);
  if (bit_equal(x, y)) return 0.0;
  double nx = norm2(x);
  double ny = norm2(y);
  double deficit =
      (nx == 0.0 || ny == 0.0) ? 0.0 : angular_factor(angle_theta(x, y)) * nx * ny;
  return 0.5 * sq_dist(x, y) - deficit;
}

double predicted_cos_angle(double theta) {
  if (!(theta >= 0.0 && theta <= kPi))
    throw InputError("predicted_cos_angle: theta outside [0, pi]");
  return std::cos(theta) + angular_factor(theta);
}

double smoothing_ramp(double t, RampKind kind, double param) {
  if (!(param > 0.0)) throw InputError("smoothing_ramp: param must be positive");
  auto quad = [](double num, double den) {
    double q = num / den;
    return q * q;
  };
  switch (kind) {
    case RampKind::tail_beta: {
      double b = param;
      if (t >= b) return 1.0;
      if (t >= 0.9 * b) return quad(t - 0.9 * b, 0.1 * b);
      return 0.0;
    }
    case RampKind::relaxed_alpha: {
      double a = param;
      if (t >= -a) return 1.0;
      if (t >= -1.1 * a) return quad(t + 1.1 * a, 0.1 * a);
      return 0.0;
    }
    case RampKind::strict_alpha: {
      double a = param;
      if (t >= 1.1 * a) return 1.0;
      if (t >= a) return quad(t - a, 0.1 * a);
      return 0.0;
    }
  }
  throw InputError("smoothing_ramp: unknown kind");
}

}  // namespace relucond
