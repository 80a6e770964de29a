#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "relucond/kernels.hpp"
#include "relucond/rng.hpp"

using namespace relucond;

namespace {

bool bits_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::vector<double> make_data(std::size_t count, std::uint64_t stream,
                                bool sprinkle_zeros = false) {
  Sampler s(RngSeed{0xC0FFEE, stream});
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    v[i] = s.normal();
    if (sprinkle_zeros && i % 7 == 0) v[i] = 0.0;
  }
  return v;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("dot matches long-double reference") {
    const auto& ops = kernels::scalar_ops();
    auto x = make_data(257, 1);
    auto y = make_data(257, 2);
    long double ref = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) ref += (long double)x[i] * y[i];
    CHECK(ops.dot(x.data(), y.data(), x.size()) ==
          doctest::Approx((double)ref).epsilon(1e-14));
  }

  TEST_CASE("scalar and simd kernels are bit-identical") {
    const kernels::Ops* simd = kernels::simd_ops();
    if (simd == nullptr) return;  // nothing to compare on this machine
    const kernels::Ops& ref = kernels::scalar_ops();

    for (std::size_t len : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 16u, 17u, 63u, 1000u, 4097u}) {
      auto x = make_data(len, len, true);
      auto y = make_data(len, len + 100, true);
      CHECK(bits_equal(ref.dot(x.data(), y.data(), len), simd->dot(x.data(), y.data(), len)));
      CHECK(bits_equal(ref.sum_sq(x.data(), len), simd->sum_sq(x.data(), len)));
      CHECK(bits_equal(ref.sum_sq_diff(x.data(), y.data(), len),
                       simd->sum_sq_diff(x.data(), y.data(), len)));
    }

    struct Shape {
      std::size_t m, n;
    };
    for (Shape sh : {Shape{1, 1}, Shape{3, 2}, Shape{4, 4}, Shape{5, 3}, Shape{8, 8},
                     Shape{1003, 7}, Shape{20000, 8}}) {
      auto acol = make_data(sh.m * sh.n, sh.m * 31 + sh.n, true);
      auto bias = make_data(sh.m, sh.m * 17, true);
      auto x = make_data(sh.n, 5);
      auto y = make_data(sh.n, 6);
      for (const double* b : {(const double*)nullptr, (const double*)bias.data()}) {
        CHECK(bits_equal(
            ref.relu_sqdiff_sum(acol.data(), b, sh.m, sh.n, x.data(), y.data()),
            simd->relu_sqdiff_sum(acol.data(), b, sh.m, sh.n, x.data(), y.data())));
        CHECK(bits_equal(ref.relu_sq_sum(acol.data(), b, sh.m, sh.n, x.data()),
                         simd->relu_sq_sum(acol.data(), b, sh.m, sh.n, x.data())));
        CHECK(bits_equal(
            ref.relu_dot_sum(acol.data(), b, sh.m, sh.n, x.data(), y.data()),
            simd->relu_dot_sum(acol.data(), b, sh.m, sh.n, x.data(), y.data())));
      }
      CHECK(bits_equal(ref.matvec_sq_sum(acol.data(), sh.m, sh.n, x.data()),
                       simd->matvec_sq_sum(acol.data(), sh.m, sh.n, x.data())));
    }
  }

  TEST_CASE("layer kernels agree with naive evaluation") {
    const auto& ops = kernels::active();
    const std::size_t m = 37, n = 5;
    auto acol = make_data(m * n, 9);
    auto bias = make_data(m, 10);
    auto x = make_data(n, 11);
    auto y = make_data(n, 12);

    double want = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double d1 = bias[i], d2 = bias[i];
      for (std::size_t j = 0; j < n; ++j) {
        d1 += acol[j * m + i] * x[j];
        d2 += acol[j * m + i] * y[j];
      }
      double t = std::max(0.0, d1) - std::max(0.0, d2);
      want += t * t;
    }
    double got = ops.relu_sqdiff_sum(acol.data(), bias.data(), m, n, x.data(), y.data());
    CHECK(got == doctest::Approx(want).epsilon(1e-13));
  }

  TEST_CASE("backend can be forced and restored") {
    kernels::set_backend(kernels::Backend::scalar);
    CHECK(std::string(kernels::active().name) == "scalar");
    kernels::set_backend(kernels::Backend::auto_detect);
    if (kernels::simd_available()) {
      kernels::set_backend(kernels::Backend::simd);
      CHECK(std::string(kernels::active().name) != "scalar");
      kernels::set_backend(kernels::Backend::auto_detect);
    }
  }
}
