#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace relucond {

using Vector = std::vector<double>;

/// Thrown on invalid user input (bad dimensions, parameter windows,
/// degenerate pairs).  The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on internal numeric failure.  The CLI maps this to exit code 2.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Dense row-major matrix.  Sizes here are desk scale; nothing is tuned for
/// large m beyond the column-major kernel copies made by PreparedLayer.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major, rows*cols entries

  Matrix() = default;
  Matrix(std::size_t m, std::size_t n) : rows(m), cols(n), data(m * n, 0.0) {
    if (m == 0 || n == 0) throw InputError("matrix dimensions must be >= 1");
  }

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  const double* row(std::size_t i) const { return data.data() + i * cols; }
  double* row(std::size_t i) { return data.data() + i * cols; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows_init) {
    std::size_t m = rows_init.size();
    std::size_t n = rows_init.begin()->size();
    Matrix a(m, n);
    std::size_t i = 0;
    for (const auto& r : rows_init) {
      if (r.size() != n) throw InputError("ragged row in matrix literal");
      std::size_t j = 0;
      for (double v : r) a(i, j++) = v;
      ++i;
    }
    return a;
  }
};

/// Seed plus substream id.  Identical (seed, stream) always reproduces the
/// same sample sequence, independent of worker count.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

/// One-sided bi-Lipschitz bracket.  U_lo is the largest witnessed ratio
/// (lower bound on the true U), L_hi the smallest (upper bound on the true
/// L); beta_lo = U_lo / L_hi is therefore a certified lower bound on beta.
struct BiLipBracket {
  double U_lo = 0.0;
  double L_hi = kInf;
  double U_hi = std::numeric_limits<double>::quiet_NaN();  // optional, NaN = absent
  double L_lo = std::numeric_limits<double>::quiet_NaN();  // optional, NaN = absent
  double beta_lo = 0.0;           // kInf when the collapsed flag is set
  bool collapsed = false;         // L_hi below the sentinel threshold
  std::uint64_t sample_count = 0;
  RngSeed seed;

  // Witness pairs for the extremes, kept for refinement and reporting.
  Vector max_x, max_y;
  Vector min_x, min_y;

  bool has_U_hi() const { return !std::isnan(U_hi); }
  bool has_L_lo() const { return !std::isnan(L_lo); }
};

inline void finalize_beta(BiLipBracket& b) {
  if (b.L_hi < 1e-13) {
    b.collapsed = true;
    b.beta_lo = kInf;
  } else {
    b.collapsed = false;
    b.beta_lo = b.U_lo / b.L_hi;
  }
}

}  // namespace relucond
