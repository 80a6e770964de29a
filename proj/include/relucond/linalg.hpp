#pragma once

#include <utility>

#include "relucond/types.hpp"

namespace relucond {

struct SingularExtremes {
  double sigma_max = 0.0;
  /// n-th largest singular value of A viewed as a map R^n -> R^m: zero
  /// whenever rank(A) < n, in particular whenever m < n.
  double sigma_min_n = 0.0;
};

SingularExtremes singular_extremes(const Matrix& a);

/// All singular values, largest first, padded with zeros to length n.
Vector singular_values_padded(const Matrix& a);

}  // namespace relucond
