#include <doctest.h>

#include <cmath>

#include "relucond/cones.hpp"
#include "relucond/geometry.hpp"

using namespace relucond;

TEST_SUITE("cones") {
  TEST_CASE("width_max closed forms") {
    ConeSpec full = ConeSpec::full(2);
    CHECK(full.width_max({3.0, 4.0}) == doctest::Approx(5.0).epsilon(1e-14));

    ConeSpec s1 = ConeSpec::sparse_cone(3, 1);
    CHECK(s1.width_max({1.0, -2.0, 0.5}) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  }

  TEST_CASE("sparse cone with 2k >= n degenerates to full space") {
    ConeSpec sp = ConeSpec::sparse_cone(5, 3);
    ConeSpec full = ConeSpec::full(5);
    Sampler s(RngSeed{121, 0});
    for (int t = 0; t < 200; ++t) {
      Vector g = gaussian_vector(5, s);
      CHECK(sp.width_max(g) == doctest::Approx(full.width_max(g)).epsilon(1e-13));
    }
  }

  TEST_CASE("membership") {
    ConeSpec sp = ConeSpec::sparse_cone(4, 2);
    CHECK(sp.member({1.0, 0.0, -2.0, 0.0}));
    CHECK_FALSE(sp.member({1.0, 1.0, 1.0, 0.0}));
    CHECK(sp.member({0.0, 0.0, 0.0, 0.0}));

    ConeSpec orthant = ConeSpec::halfspaces(2, {{1.0, 0.0}, {0.0, 1.0}});
    CHECK(orthant.member({0.5, 2.0}));
    CHECK_FALSE(orthant.member({-0.5, 2.0}));
  }

  TEST_CASE("cone sphere samples are members of unit norm") {
    for (auto spec : {ConeSpec::full(4), ConeSpec::sparse_cone(6, 2),
                      ConeSpec::halfspaces(3, {{1, 0, 0}, {0, 1, 0}})}) {
      Sampler s(RngSeed{122, 0});
      for (int t = 0; t < 100; ++t) {
        Vector x = spec.sample_sphere(s);
        CHECK(spec.member(x));
        CHECK(norm2(x) == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("membership is scale-invariant") {
    for (auto spec : {ConeSpec::sparse_cone(5, 2),
                      ConeSpec::halfspaces(3, {{1, 0, 0}, {0, 1, 1}})}) {
      Sampler s(RngSeed{123, 0});
      for (int t = 0; t < 100; ++t) {
        Vector x = spec.sample_sphere(s);
        Vector tx = x;
        for (double& v : tx) v *= 37.5;
        CHECK(spec.member(tx));
      }
    }
  }

  TEST_CASE("empty-interior custom cone is flagged") {
    ConeSpec dead = ConeSpec::halfspaces(
        2, {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}});
    Sampler s(RngSeed{124, 0});
    CHECK_THROWS_AS(dead.sample_sphere(s), InputError);
  }

  TEST_CASE("halfspace width is a valid lower bound") {
    // On the positive orthant of R^2 the true width over (S-S) n B is |g|:
    // differences of orthant points reach every direction.
    ConeSpec orthant = ConeSpec::halfspaces(2, {{1.0, 0.0}, {0.0, 1.0}});
    Sampler s(RngSeed{125, 0});
    for (int t = 0; t < 50; ++t) {
      Vector g = gaussian_vector(2, s);
      double w = orthant.width_max(g);
      CHECK(w <= norm2(g) + 1e-9);
      CHECK(w >= 0.9 * norm2(g));  // the PGD bound is not far off here
    }
  }

  TEST_CASE("gaussian width spot values") {
    WidthEstimate w1 = gaussian_width_mc(ConeSpec::full(1), 200000, RngSeed{126, 0});
    CHECK(std::abs(w1.mean - std::sqrt(2.0 / 3.141592653589793)) <= 4.0 * w1.se);

    WidthEstimate w2 = gaussian_width_mc(ConeSpec::full(2), 200000, RngSeed{126, 1});
    CHECK(std::abs(w2.mean - std::sqrt(3.141592653589793 / 2.0)) <= 4.0 * w2.se);
  }

  TEST_CASE("gaussian width determinism and workers") {
    ConeSpec sp = ConeSpec::sparse_cone(20, 3);
    WidthEstimate a = gaussian_width_mc(sp, 20000, RngSeed{127, 0}, 1);
    WidthEstimate b = gaussian_width_mc(sp, 20000, RngSeed{127, 0}, 4);
    CHECK(a.mean == b.mean);
    CHECK(a.se == b.se);
    CHECK_THROWS_AS(gaussian_width_mc(sp, 1, RngSeed{127, 1}), InputError);
  }

  TEST_CASE("net on the 0-sphere") {
    EpsilonNet net = epsilon_net_sphere(1, 1.0, RngSeed{128, 0}, 1000);
    CHECK(net.net.size() == 2);
    CHECK(net.verified);
    CHECK(((net.net[0][0] == -1.0 && net.net[1][0] == 1.0) ||
           (net.net[0][0] == 1.0 && net.net[1][0] == -1.0)));
  }

  TEST_CASE("circle net at eps = 0.1 lands in the covering window") {
    EpsilonNet net = epsilon_net_sphere(2, 0.1, RngSeed{128, 1}, 20000);
    CHECK(net.verified);
    CHECK(net.net.size() >= 16);  // ceil(2 pi / 0.2) / 2
    CHECK(net.net.size() <= 64);  // ceil(2 pi / 0.2) * 2
    CHECK(net.sudakov_quantity ==
          doctest::Approx(0.1 * std::sqrt(std::log((double)net.net.size()))).epsilon(1e-12));
  }

  TEST_CASE("net parameter validation") {
    CHECK_THROWS_AS(epsilon_net_sphere(2, 0.0, RngSeed{1, 0}, 10), InputError);
    CHECK_THROWS_AS(epsilon_net_sphere(2, 2.0, RngSeed{1, 0}, 10), InputError);
    CHECK_THROWS_AS(epsilon_net_sphere(7, 0.5, RngSeed{1, 0}, 10), InputError);
  }

  TEST_CASE("3-sphere net verifies at a coarse scale") {
    EpsilonNet net = epsilon_net_sphere(3, 0.5, RngSeed{129, 0}, 5000);
    CHECK(net.verified);
    CHECK(net.net.size() >= 4);
  }
}
