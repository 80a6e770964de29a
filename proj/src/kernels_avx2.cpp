#include "relucond/kernels.hpp"

// AVX2+FMA variants.  This translation unit is the only one compiled with
// -mavx2 -mfma; callers reach it through the dispatch table after a runtime
// CPU check.  Each kernel mirrors the scalar reference operation for
// operation, so results are bit-identical (equivalence-tested).

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace relucond::kernels {
namespace {

inline double relu(double v) { return std::max(0.0, v); }

// (acc0 + acc2) + (acc1 + acc3)
inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

inline double row_dot(const double* acol, const double* bias, std::size_t m,
                      std::size_t n, const double* v, std::size_t r) {
  double d = bias ? bias[r] : 0.0;
  for (std::size_t j = 0; j < n; ++j) d = std::fma(acol[j * m + r], v[j], d);
  return d;
}

double dot_avx2(const double* x, const double* y, std::size_t len) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t main = len - len % 4;
  for (std::size_t i = 0; i < main; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  double tail = 0.0;
  for (std::size_t i = main; i < len; ++i) tail = std::fma(x[i], y[i], tail);
  return hsum(acc) + tail;
}

double sum_sq_avx2(const double* x, std::size_t len) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t main = len - len % 4;
  for (std::size_t i = 0; i < main; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double tail = 0.0;
  for (std::size_t i = main; i < len; ++i) tail = std::fma(x[i], x[i], tail);
  return hsum(acc) + tail;
}

double sum_sq_diff_avx2(const double* x, const double* y, std::size_t len) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t main = len - len % 4;
  for (std::size_t i = 0; i < main; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double tail = 0.0;
  for (std::size_t i = main; i < len; ++i) {
    double d = x[i] - y[i];
    tail = std::fma(d, d, tail);
  }
  return hsum(acc) + tail;
}

double relu_sqdiff_sum_avx2(const double* acol, const double* bias, std::size_t m,
                            std::size_t n, const double* x, const double* y) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t main = m - m % 4;
  for (std::size_t r = 0; r < main; r += 4) {
    __m256d d1 = bias ? _mm256_loadu_pd(bias + r) : zero;
    __m256d d2 = d1;
    for (std::size_t j = 0; j < n; ++j) {
      __m256d col = _mm256_loadu_pd(acol + j * m + r);
      d1 = _mm256_fmadd_pd(col, _mm256_set1_pd(x[j]), d1);
      d2 = _mm256_fmadd_pd(col, _mm256_set1_pd(y[j]), d2);
    }
    __m256d t = _mm256_sub_pd(_mm256_max_pd(zero, d1), _mm256_max_pd(zero, d2));
    acc = _mm256_fmadd_pd(t, t, acc);
  }
  double tail = 0.0;
  for (std::size_t r = main; r < m; ++r) {
    double t = relu(row_dot(acol, bias, m, n, x, r)) - relu(row_dot(acol, bias, m, n, y, r));
    tail = std::fma(t, t, tail);
  }
  return hsum(acc) + tail;
}

double relu_sq_sum_avx2(const double* acol, const double* bias, std::size_t m,
                        std::size_t n, const double* x) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t main = m - m % 4;
  for (std::size_t r = 0; r < main; r += 4) {
    __m256d d = bias ? _mm256_loadu_pd(bias + r) : zero;
    for (std::size_t j = 0; j < n; ++j)
      d = _mm256_fmadd_pd(_mm256_loadu_pd(acol + j * m + r), _mm256_set1_pd(x[j]), d);
    __m256d t = _mm256_max_pd(zero, d);
    acc = _mm256_fmadd_pd(t, t, acc);
  }
  double tail = 0.0;
  for (std::size_t r = main; r < m; ++r) {
    double t = relu(row_dot(acol, bias, m, n, x, r));
    tail = std::fma(t, t, tail);
  }
  return hsum(acc) + tail;
}

double relu_dot_sum_avx2(const double* acol, const double* bias, std::size_t m,
                         std::size_t n, const double* x, const double* y) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t main = m - m % 4;
  for (std::size_t r = 0; r < main; r += 4) {
    __m256d d1 = bias ? _mm256_loadu_pd(bias + r) : zero;
    __m256d d2 = d1;
    for (std::size_t j = 0; j < n; ++j) {
      __m256d col = _mm256_loadu_pd(acol + j * m + r);
      d1 = _mm256_fmadd_pd(col, _mm256_set1_pd(x[j]), d1);
      d2 = _mm256_fmadd_pd(col, _mm256_set1_pd(y[j]), d2);
    }
    acc = _mm256_fmadd_pd(_mm256_max_pd(zero, d1), _mm256_max_pd(zero, d2), acc);
  }
  double tail = 0.0;
  for (std::size_t r = main; r < m; ++r) {
    double t1 = relu(row_dot(acol, bias, m, n, x, r));
    double t2 = relu(row_dot(acol, bias, m, n, y, r));
    tail = std::fma(t1, t2, tail);
  }
  return hsum(acc) + tail;
}

double matvec_sq_sum_avx2(const double* acol, std::size_t m, std::size_t n,
                          const double* x) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t main = m - m % 4;
  for (std::size_t r = 0; r < main; r += 4) {
    __m256d d = zero;
    for (std::size_t j = 0; j < n; ++j)
      d = _mm256_fmadd_pd(_mm256_loadu_pd(acol + j * m + r), _mm256_set1_pd(x[j]), d);
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double tail = 0.0;
  for (std::size_t r = main; r < m; ++r) {
    double d = row_dot(acol, nullptr, m, n, x, r);
    tail = std::fma(d, d, tail);
  }
  return hsum(acc) + tail;
}

}  // namespace

const Ops* avx2_ops() {
  static const Ops ops = {
      "avx2",               dot_avx2,         sum_sq_avx2,       sum_sq_diff_avx2,
      relu_sqdiff_sum_avx2, relu_sq_sum_avx2, relu_dot_sum_avx2, matvec_sq_sum_avx2,
  };
  return &ops;
}

}  // namespace relucond::kernels

#else

namespace relucond::kernels {
const Ops* avx2_ops() { return nullptr; }
}  // namespace relucond::kernels

#endif
