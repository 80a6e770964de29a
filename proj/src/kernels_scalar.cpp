#include <algorithm>
#include <cmath>

#include "relucond/kernels.hpp"

// Reference kernels.  These spell out the exact operation order the SIMD
// variants must reproduce; see the contract in kernels.hpp.

namespace relucond::kernels {
namespace {

inline double relu(double v) { return std::max(0.0, v); }

inline double combine4(const double acc[4]) {
  return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

double dot_scalar(const double* x, const double* y, std::size_t len) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t main = len - len % 4;
  for (std::size_t i = 0; i < main; i += 4)
    for (std::size_t l = 0; l < 4; ++l) acc[l] = std::fma(x[i + l], y[i + l], acc[l]);
  double tail = 0.0;
  for (std::size_t i = main; i < len; ++i) tail = std::fma(x[i], y[i], tail);
  return combine4(acc) + tail;
}

double sum_sq_scalar(const double* x, std::size_t len) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t main = len - len % 4;
  for (std::size_t i = 0; i < main; i += 4)
    for (std::size_t l = 0; l < 4; ++l) acc[l] = std::fma(x[i + l], x[i + l], acc[l]);
  double tail = 0.0;
  for (std::size_t i = main; i < len; ++i) tail = std::fma(x[i], x[i], tail);
  return combine4(acc) + tail;
}

double sum_sq_diff_scalar(const double* x, const double* y, std::size_t len) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t main = len - len % 4;
  for (std::size_t i = 0; i < main; i += 4)
    for (std::size_t l = 0; l < 4; ++l) {
      double d = x[i + l] - y[i + l];
      acc[l] = std::fma(d, d, acc[l]);
    }
  double tail = 0.0;
  for (std::size_t i = main; i < len; ++i) {
    double d = x[i] - y[i];
    tail = std::fma(d, d, tail);
  }
  return combine4(acc) + tail;
}

// Row r dot product against v, bias included, ascending column order.
inline double row_dot(const double* acol, const double* bias, std::size_t m,
                      std::size_t n, const double* v, std::size_t r) {
  double d = bias ? bias[r] : 0.0;
  for (std::size_t j = 0; j < n; ++j) d = std::fma(acol[j * m + r], v[j], d);
  return d;
}

double relu_sqdiff_sum_scalar(const double* acol, const double* bias, std::size_t m,
                              std::size_t n, const double* x, const double* y) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t main = m - m % 4;
  for (std::size_t r = 0; r < main; r += 4) {
    double d1[4], d2[4];
    for (std::size_t l = 0; l < 4; ++l) {
      d1[l] = bias ? bias[r + l] : 0.0;
      d2[l] = bias ? bias[r + l] : 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double* col = acol + j * m + r;
      for (std::size_t l = 0; l < 4; ++l) {
        d1[l] = std::fma(col[l], x[j], d1[l]);
        d2[l] = std::fma(col[l], y[j], d2[l]);
      }
    }
    for (std::size_t l = 0; l < 4; ++l) {
      double t = relu(d1[l]) - relu(d2[l]);
      acc[l] = std::fma(t, t, acc[l]);
    }
  }
  double tail = 0.0;
  for (std::size_t r = main; r < m; ++r) {
    double t = relu(row_dot(acol, bias, m, n, x, r)) - relu(row_dot(acol, bias, m, n, y, r));
    tail = std::fma(t, t, tail);
  }
  return combine4(acc) + tail;
}

double relu_sq_sum_scalar(const double* acol, const double* bias, std::size_t m,
                          std::size_t n, const double* x) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t main = m - m % 4;
  for (std::size_t r = 0; r < main; r += 4) {
    double d[4];
    for (std::size_t l = 0; l < 4; ++l) d[l] = bias ? bias[r + l] : 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double* col = acol + j * m + r;
      for (std::size_t l = 0; l < 4; ++l) d[l] = std::fma(col[l], x[j], d[l]);
    }
    for (std::size_t l = 0; l < 4; ++l) {
      double t = relu(d[l]);
      acc[l] = std::fma(t, t, acc[l]);
    }
  }
  double tail = 0.0;
  for (std::size_t r = main; r < m; ++r) {
    double t = relu(row_dot(acol, bias, m, n, x, r));
    tail = std::fma(t, t, tail);
  }
  return combine4(acc) + tail;
}

double relu_dot_sum_scalar(const double* acol, const double* bias, std::size_t m,
                           std::size_t n, const double* x, const double* y) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t main = m - m % 4;
  for (std::size_t r = 0; r < main; r += 4) {
    double d1[4], d2[4];
    for (std::size_t l = 0; l < 4; ++l) {
      d1[l] = bias ? bias[r + l] : 0.0;
      d2[l] = bias ? bias[r + l] : 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double* col = acol + j * m + r;
      for (std::size_t l = 0; l < 4; ++l) {
        d1[l] = std::fma(col[l], x[j], d1[l]);
        d2[l] = std::fma(col[l], y[j], d2[l]);
      }
    }
    for (std::size_t l = 0; l < 4; ++l) acc[l] = std::fma(relu(d1[l]), relu(d2[l]), acc[l]);
  }
  double tail = 0.0;
  for (std::size_t r = main; r < m; ++r) {
    double t1 = relu(row_dot(acol, bias, m, n, x, r));
    double t2 = relu(row_dot(acol, bias, m, n, y, r));
    tail = std::fma(t1, t2, tail);
  }
  return combine4(acc) + tail;
}

double matvec_sq_sum_scalar(const double* acol, std::size_t m, std::size_t n,
                            const double* x) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t main = m - m % 4;
  for (std::size_t r = 0; r < main; r += 4) {
    double d[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      const double* col = acol + j * m + r;
      for (std::size_t l = 0; l < 4; ++l) d[l] = std::fma(col[l], x[j], d[l]);
    }
    for (std::size_t l = 0; l < 4; ++l) acc[l] = std::fma(d[l], d[l], acc[l]);
  }
  double tail = 0.0;
  for (std::size_t r = main; r < m; ++r) {
    double d = row_dot(acol, nullptr, m, n, x, r);
    tail = std::fma(d, d, tail);
  }
  return combine4(acc) + tail;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      "scalar",           dot_scalar,           sum_sq_scalar,       sum_sq_diff_scalar,
      relu_sqdiff_sum_scalar, relu_sq_sum_scalar, relu_dot_sum_scalar, matvec_sq_sum_scalar,
  };
  return ops;
}

}  // namespace relucond::kernels
