#include <doctest.h>

#include <cmath>

#include "relucond/geometry.hpp"
#include "relucond/kernels.hpp"
#include "relucond/rng.hpp"

using namespace relucond;

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

TEST_SUITE("geometry") {
  TEST_CASE("relu basics") {
    CHECK(relu({1.0, -2.0, 0.0}) == Vector{1.0, 0.0, 0.0});
    CHECK(relu({-3.0, -0.5}) == Vector{0.0, 0.0});
    Vector v = {0.3, -4.0, 2.0, -0.1};
    CHECK(relu(relu(v)) == relu(v));
  }

  TEST_CASE("relu is 1-Lipschitz on random pairs") {
    for (int t = 0; t < 200; ++t) {
      Sampler s(substream(RngSeed{51, 0}, t));
      Vector u = gaussian_vector(6, s), v = gaussian_vector(6, s);
      CHECK(std::sqrt(sq_dist(relu(u), relu(v))) <= std::sqrt(sq_dist(u, v)) + 1e-15);
    }
  }

  TEST_CASE("layer_apply") {
    LayerMap id2{Matrix::identity(2)};
    CHECK(layer_apply(id2, {1.0, -1.0}) == Vector{1.0, 0.0});

    LayerMap biased{Matrix::from_rows({{1.0}}), Vector{1.0}};
    CHECK(layer_apply(biased, {-2.0}) == Vector{0.0});

    CHECK_THROWS_AS(layer_apply(id2, {1.0, 2.0, 3.0}), InputError);

    // positive homogeneity of relu: scaling (A, b) scales the output
    Sampler s(RngSeed{52, 0});
    Matrix a = gaussian_matrix(5, 3, RngSeed{52, 1});
    Vector b = gaussian_vector(5, s), x = gaussian_vector(3, s);
    const double c = 1.75;
    LayerMap base{a, b};
    Matrix ca = a;
    Vector cb = b;
    for (double& v : ca.data) v *= c;
    for (double& v : cb) v *= c;
    Vector lhs = layer_apply(LayerMap{ca, cb}, x);
    Vector rhs = layer_apply(base, x);
    for (std::size_t i = 0; i < lhs.size(); ++i)
      CHECK(lhs[i] == doctest::Approx(c * rhs[i]).epsilon(1e-12));
  }

  TEST_CASE("pairwise_ratio spot values") {
    LayerMap id2{Matrix::identity(2)};
    CHECK(pairwise_ratio(id2, {1.0, 0.0}, {0.0, 0.0}) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(pairwise_ratio(id2, {1.0, 0.0}, {-1.0, 0.0}) ==
          doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-12));

    LayerMap biased{Matrix::from_rows({{1.0}}), Vector{1.0}};
    CHECK(pairwise_ratio(biased, {0.0}, {-2.0}) == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(pairwise_ratio(id2, {1.0, 2.0}, {1.0, 2.0}), InputError);
  }

  TEST_CASE("pairwise_ratio scaling invariances") {
    Matrix a = gaussian_matrix(7, 4, RngSeed{53, 0});
    Sampler s(RngSeed{53, 1});
    Vector b = gaussian_vector(7, s);
    LayerMap layer{a, b};
    LayerMap unbiased{a};

    for (int t = 0; t < 50; ++t) {
      Sampler ps(substream(RngSeed{53, 2}, t));
      Vector x = gaussian_vector(4, ps), y = gaussian_vector(4, ps);
      const double c = 3.5;
      Matrix ca = a;
      Vector cb = b;
      for (double& v : ca.data) v *= c;
      for (double& v : cb) v *= c;
      double r = pairwise_ratio(layer, x, y);
      double rc = pairwise_ratio(LayerMap{ca, cb}, x, y);
      CHECK(std::abs(rc - c * r) <= 1e-12 * c * r);

      // positive homogeneity in the arguments at b = 0
      const double tt = 2.25;
      Vector tx = x, ty = y;
      for (double& v : tx) v *= tt;
      for (double& v : ty) v *= tt;
      double r0 = pairwise_ratio(unbiased, x, y);
      double rt = pairwise_ratio(unbiased, tx, ty);
      CHECK(std::abs(rt - r0) <= 1e-12 * r0);
    }
  }

  TEST_CASE("angle_theta") {
    Vector x = {0.3, -0.4};
    CHECK(angle_theta(x, x) == 0.0);
    CHECK(angle_theta({1.0, 0.0}, {0.0, 2.0}) == doctest::Approx(kPi / 2).epsilon(1e-14));
    Vector nx = {-0.3, 0.4};
    CHECK(angle_theta(x, nx) == doctest::Approx(kPi).epsilon(1e-14));
    CHECK_THROWS_AS(angle_theta({0.0, 0.0}, {1.0, 0.0}), InputError);
  }

  TEST_CASE("phi spot values") {
    CHECK(phi({1.0, 0.0}, {-1.0, 0.0}) == 0.25);  // antipodal: exact
    CHECK(phi({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-13));
    CHECK(phi({2.0, 0.0}, {1.0, 0.0}) == 0.0);
    CHECK(phi({1.0, 0.0}, {0.0, 0.0}) == 0.0);  // zero-vector convention
    CHECK_THROWS_AS(phi({1.0, 0.0}, {1.0, 0.0}), InputError);
    // near-degenerate pairs are rejected rather than returning 0/0 noise
    CHECK_THROWS_AS(phi({1.0, 0.0}, {1.0 + 1e-15, 0.0}), InputError);
  }

  TEST_CASE("phi bounded in [0, 1/4] over random pairs") {
    for (int t = 0; t < 100000; ++t) {
      Sampler s(substream(RngSeed{54, 0}, t));
      Vector x = gaussian_vector(3, s), y;
      if (t % 5 == 1) {
        y = x;  // near-parallel
        for (double& v : y) v *= 1.0 + 1e-6;
        y[0] += 1e-7;
      } else if (t % 5 == 2) {
        y = x;  // antipodal
        for (double& v : y) v = -v;
      } else {
        y = gaussian_vector(3, s);
      }
      double f = phi(x, y);
      CHECK(f >= 0.0);
      CHECK(f <= 0.25 + 1e-12);
    }
  }

  TEST_CASE("psi spot values and homogeneity") {
    CHECK(psi({1.0, 0.0}, {-1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(psi({1.0, 0.0}, {0.0, 0.0}) == 0.0);
    Sampler s(RngSeed{55, 0});
    for (int t = 0; t < 100; ++t) {
      Vector x = gaussian_vector(4, s), y = gaussian_vector(4, s);
      const double tt = 1.6;
      Vector tx = x, ty = y;
      for (double& v : tx) v *= tt;
      for (double& v : ty) v *= tt;
      CHECK(psi(tx, ty) == doctest::Approx(tt * tt * psi(x, y)).epsilon(1e-11));
    }
  }

  TEST_CASE("expected_sq_distance spot values") {
    Vector x = {0.6, 0.8};
    CHECK(expected_sq_distance(x, x) == 0.0);
    CHECK(expected_sq_distance({1.0, 0.0}, {0.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(expected_sq_distance({1.0, 0.0}, {-1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-13));
  }

  TEST_CASE("expected_sq_distance brackets [1/4, 1/2] |x-y|^2") {
    for (int t = 0; t < 20000; ++t) {
      Sampler s(substream(RngSeed{56, 0}, t));
      Vector x = gaussian_vector(5, s), y = gaussian_vector(5, s);
      double d2 = sq_dist(x, y);
      double e = expected_sq_distance(x, y);
      CHECK(e >= 0.25 * d2 - 1e-12 * d2);
      CHECK(e <= 0.50 * d2 + 1e-12 * d2);
    }
  }

  TEST_CASE("expected_sq_distance matches a Monte-Carlo oracle") {
    // Independent oracle: 10^6 Gaussian rows, frozen seed.
    Sampler ps(RngSeed{57, 0});
    Vector x = gaussian_vector(5, ps), y = gaussian_vector(5, ps);
    double exact = expected_sq_distance(x, y);

    const std::size_t rows = 1000000;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      Sampler s(substream(RngSeed{57, 1}, i));
      Vector a = gaussian_vector(5, s);
      double dx = kernels::active().dot(a.data(), x.data(), 5);
      double dy = kernels::active().dot(a.data(), y.data(), 5);
      double d = std::max(0.0, dx) - std::max(0.0, dy);
      sum += d * d;
      sum_sq += d * d * d * d;
    }
    double mean = sum / rows;
    double var = (sum_sq - sum * sum / rows) / (rows - 1.0);
    double se = std::sqrt(var / rows);
    CHECK(std::abs(mean - exact) <= 4.0 * se);
  }

  TEST_CASE("predicted_cos_angle") {
    CHECK(predicted_cos_angle(0.0) == 1.0);
    CHECK(predicted_cos_angle(kPi) == 0.0);  // antipodal inputs -> orthogonal outputs
    CHECK(predicted_cos_angle(kPi / 2) == doctest::Approx(1.0 / kPi).epsilon(1e-14));
    CHECK_THROWS_AS(predicted_cos_angle(-0.1), InputError);
    CHECK_THROWS_AS(predicted_cos_angle(3.2), InputError);
  }

  TEST_CASE("smoothing_ramp spot values") {
    CHECK(smoothing_ramp(9.5, RampKind::tail_beta, 10.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(smoothing_ramp(-0.5, RampKind::relaxed_alpha, 0.5) == 1.0);
    CHECK(smoothing_ramp(0.5, RampKind::strict_alpha, 0.5) == 0.0);
    CHECK(smoothing_ramp(10.0, RampKind::tail_beta, 10.0) == 1.0);
    CHECK(smoothing_ramp(8.9, RampKind::tail_beta, 10.0) == 0.0);
    CHECK_THROWS_AS(smoothing_ramp(1.0, RampKind::tail_beta, 0.0), InputError);
    CHECK_THROWS_AS(smoothing_ramp(1.0, RampKind::strict_alpha, -1.0), InputError);
  }

  TEST_CASE("smoothing_ramp stays in [0,1] and is continuous") {
    for (RampKind kind : {RampKind::tail_beta, RampKind::relaxed_alpha, RampKind::strict_alpha}) {
      double p = kind == RampKind::tail_beta ? 10.0 : 0.4;
      double lo = kind == RampKind::tail_beta ? -2.0 * p : -3.0 * p;
      double hi = kind == RampKind::tail_beta ? 2.0 * p : 3.0 * p;
      double prev = smoothing_ramp(lo, kind, p);
      const int steps = 20000;
      double dt = (hi - lo) / steps;
      for (int i = 1; i <= steps; ++i) {
        double g = smoothing_ramp(lo + i * dt, kind, p);
        CHECK(g >= 0.0);
        CHECK(g <= 1.0);
        CHECK(std::abs(g - prev) <= 25.0 / p * dt + 1e-12);  // g is (20/p)-Lipschitz
        prev = g;
      }
    }
  }

  TEST_CASE("h = sqrt(ramp) is (10/param)-Lipschitz on a dense grid") {
    for (RampKind kind : {RampKind::relaxed_alpha, RampKind::strict_alpha, RampKind::tail_beta}) {
      double p = kind == RampKind::tail_beta ? 10.0 : 0.7;
      double lo = kind == RampKind::tail_beta ? 0.0 : -3.0 * p;
      double hi = kind == RampKind::tail_beta ? 2.0 * p : 3.0 * p;
      const int steps = 10000;
      double dt = (hi - lo) / steps;
      double prev = std::sqrt(smoothing_ramp(lo, kind, p));
      for (int i = 1; i <= steps; ++i) {
        double h = std::sqrt(smoothing_ramp(lo + i * dt, kind, p));
        CHECK(std::abs(h - prev) <= (10.0 / p) * dt + 1e-12);
        prev = h;
      }
    }
  }

  TEST_CASE("t^2 g_beta(|t|) difference bound") {
    const double beta = 10.0;
    auto f = [&](double t) { return t * t * smoothing_ramp(std::abs(t), RampKind::tail_beta, beta); };
    const int steps = 10000;
    double lo = -2.0 * beta, hi = 2.0 * beta;
    double dt = (hi - lo) / steps;
    Sampler s(RngSeed{58, 0});
    for (int i = 0; i < steps; ++i) {
      double t1 = lo + i * dt;
      double t2 = t1 + dt;  // adjacent grid pair
      CHECK(std::abs(f(t1) - f(t2)) <=
            11.0 * std::abs(t1 - t2) * (std::abs(t1) + std::abs(t2)) + 1e-12);
      // plus a random long-range pair
      double u1 = lo + (hi - lo) * s.uniform01();
      double u2 = lo + (hi - lo) * s.uniform01();
      CHECK(std::abs(f(u1) - f(u2)) <=
            11.0 * std::abs(u1 - u2) * (std::abs(u1) + std::abs(u2)) + 1e-12);
    }
  }
}
