#include "relucond/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace relucond {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EMat> map_of(const Matrix& a) {
  return Eigen::Map<const EMat>(a.data.data(), static_cast<Eigen::Index>(a.rows),
                                static_cast<Eigen::Index>(a.cols));
}

}  // namespace

Vector singular_values_padded(const Matrix& a) {
  if (!a.all_finite()) throw NumericError("singular values of a non-finite matrix");
  Vector out(a.cols, 0.0);
  if (a.rows * a.cols <= 64 * 64) {
    Eigen::JacobiSVD<EMat> svd(map_of(a));
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size() && i < static_cast<Eigen::Index>(a.cols); ++i)
      out[static_cast<std::size_t>(i)] = sv(i);
    return out;
  }
  // Tall matrices: eigenvalues of the n x n Gram matrix suffice at the
  // accuracy the estimator paths need.
  EMat g = map_of(a).transpose() * map_of(a);
  Eigen::SelfAdjointEigenSolver<EMat> es(g);
  const auto& ev = es.eigenvalues();  // ascending
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double v = ev(ev.size() - 1 - i);
    out[static_cast<std::size_t>(i)] = v > 0.0 ? std::sqrt(v) : 0.0;
  }
  return out;
}

SingularExtremes singular_extremes(const Matrix& a) {
  Vector sv = singular_values_padded(a);
  SingularExtremes se;
  se.sigma_max = sv.front();
  se.sigma_min_n = sv.back();
  return se;
}

}  // namespace relucond
