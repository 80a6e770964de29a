#pragma once

#include <cstddef>

namespace relucond::kernels {

// Data-parallel reduction kernels behind the sampling and experiment loops.
//
// Every kernel follows one accumulation contract so that the scalar
// reference and the SIMD variants return bit-identical doubles:
//
//   * element/row lanes run in blocks of 4; lane l covers index 4*k + l
//   * all multiply-adds are fused (std::fma / vfmadd)
//   * lane accumulators combine as (acc0 + acc2) + (acc1 + acc3)
//   * the tail (count % 4) is summed sequentially and added last
//
// Layer kernels take the matrix in column-major order (column j starts at
// acol + j*m) so that four consecutive rows of one column are contiguous.
// `bias` may be null, meaning a zero bias.

struct Ops {
  const char* name;

  double (*dot)(const double* x, const double* y, std::size_t len);
  double (*sum_sq)(const double* x, std::size_t len);
  double (*sum_sq_diff)(const double* x, const double* y, std::size_t len);

  // sum_i (relu(<a_i,x> + b_i) - relu(<a_i,y> + b_i))^2
  double (*relu_sqdiff_sum)(const double* acol, const double* bias, std::size_t m,
                            std::size_t n, const double* x, const double* y);
  // sum_i relu(<a_i,x> + b_i)^2
  double (*relu_sq_sum)(const double* acol, const double* bias, std::size_t m,
                        std::size_t n, const double* x);
  // sum_i relu(<a_i,x> + b_i) * relu(<a_i,y> + b_i)
  double (*relu_dot_sum)(const double* acol, const double* bias, std::size_t m,
                         std::size_t n, const double* x, const double* y);
  // sum_i <a_i,x>^2
  double (*matvec_sq_sum)(const double* acol, std::size_t m, std::size_t n,
                          const double* x);
};

enum class Backend { auto_detect, scalar, simd };

const Ops& scalar_ops();
const Ops* simd_ops();  // null when this build or CPU has no SIMD variant

/// Currently selected kernel set (auto-detected at first use).
const Ops& active();

/// Force a backend; throws InputError if `simd` is unavailable.
void set_backend(Backend b);

bool simd_available();

}  // namespace relucond::kernels
