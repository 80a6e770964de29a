#pragma once

#include <cstdint>
#include <vector>

#include "relucond/types.hpp"

namespace relucond {

// Exact combinatorial analysis of x -> relu(Ax) for desk-scale layers
// (n <= 4, m <= 24).  Patterns index the open cells of the central
// hyperplane arrangement {<a_j, x> = 0}.

constexpr std::size_t kMaxExactCols = 4;
constexpr std::size_t kMaxExactRows = 24;
constexpr double kPatternTol = 1e-9;

struct ActivationPattern {
  std::uint32_t active_rows = 0;  // bit j set <=> row j strictly positive
  Vector witness;                 // unit vector with margin >= kPatternTol on every row

  std::size_t count() const { return static_cast<std::size_t>(__builtin_popcount(active_rows)); }
  bool contains(std::size_t j) const { return (active_rows >> j) & 1u; }
};

struct CellEnumeration {
  std::vector<ActivationPattern> patterns;  // canonical bitmask order
  bool degenerate_warning = false;          // rows parallel within 1e-10
  bool has_empty_cell = false;
  std::size_t distinct_normals = 0;         // nonzero undirected normals after dedup
};

CellEnumeration enumerate_cells(const Matrix& a);

/// min over realizable nonempty patterns S of the n-padded smallest singular
/// value of A_S; 0 when some reachable pattern has |S| < n or a
/// rank-deficient submatrix, and 0 when no nonempty pattern exists.
double lambda_of_A(const Matrix& a);

/// max over realizable patterns S of sigma_max(A_S), divided by sqrt(m).
/// Equals U_{A,0} because the map is continuous piecewise linear with
/// Jacobian D_S A on each cell.
double exact_upper_lipschitz(const Matrix& a);

struct BoundsReport {
  double lambda_max = 0.0;  // largest singular value of A
  double lambda_A = 0.0;
  double L_lower_reading1 = 0.0;   // sqrt(lambda / (2m))
  double L_reading2_lo = 0.0;      // 0.5 * sqrt(lambda), no 1/sqrt(m)
  double L_reading2_hi = 0.0;      // sqrt(lambda)
  double beta_upper = kInf;        // 2 sqrt(lambda_max / lambda), inf if lambda = 0
  bool has_empty_cell = false;
  bool degenerate_warning = false;
};

BoundsReport related_bounds(const Matrix& a);

/// Grid-plus-polish oracle for L and U at n <= 2, b = 0.  One-sided by
/// construction: U_lo <= U <= U_hi and L <= L_hi.
BiLipBracket brute_force_bilip(const Matrix& a, std::size_t resolution);

}  // namespace relucond
