#include <doctest.h>

#include <cmath>

#include "relucond/experiments.hpp"

using namespace relucond;

namespace {

ExperimentConfig lemma_cfg(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.n = 8;
  cfg.seed = RngSeed{seed, 0};
  cfg.pair_count = 200000;
  cfg.alpha = 0.2;
  cfg.beta_param = 10.0;
  cfg.trials = 2;
  cfg.cone = ConeSpec::full(8);
  return cfg;
}

bool rows_equal(const ExperimentReport& a, const ExperimentReport& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].label != b.rows[i].label) return false;
    if (a.rows[i].values != b.rows[i].values) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("lemma checks pass at desk scale") {
    ExperimentReport rep = mc_lemma_checks(lemma_cfg(131));
    CHECK(rep.rows.size() == 10);  // 5 quantities x 2 trials
    CHECK(rep.all_pass());
    for (const auto& row : rep.rows) {
      if (row.label == "E1_half") CHECK(std::abs(row.get("estimate") - 0.5) <= 4.0 * row.get("se"));
      if (row.label == "tail") CHECK(row.get("estimate") <= std::exp(-25.0) + 4.0 * row.get("se"));
    }
  }

  TEST_CASE("lemma parameter windows") {
    ExperimentConfig cfg = lemma_cfg(132);
    cfg.alpha = 1.0;
    CHECK_THROWS_AS(mc_lemma_checks(cfg), InputError);
    cfg.alpha = 0.1;
    cfg.beta_param = 9.0;
    CHECK_THROWS_AS(mc_lemma_checks(cfg), InputError);
  }

  TEST_CASE("expectation identity z-scores stay within 4") {
    ExperimentConfig cfg;
    cfg.n = 5;
    cfg.seed = RngSeed{133, 0};
    cfg.pair_count = 200000;
    cfg.trials = 5;
    cfg.cone = ConeSpec::full(5);
    ExperimentReport rep = expectation_identity_check(cfg);
    CHECK(rep.rows.size() == 5);
    CHECK(rep.all_pass());
  }

  TEST_CASE("doubling the row count shrinks SE by about sqrt(2)") {
    ExperimentConfig cfg = lemma_cfg(134);
    cfg.trials = 1;
    cfg.pair_count = 100000;
    double se1 = mc_lemma_checks(cfg).rows[0].get("se");
    cfg.pair_count = 200000;
    double se2 = mc_lemma_checks(cfg).rows[0].get("se");
    double shrink = se1 / se2;
    CHECK(shrink >= std::sqrt(2.0) * 0.9);
    CHECK(shrink <= std::sqrt(2.0) * 1.1);
  }

  TEST_CASE("band check: no violations at delta = 0.5 desk config") {
    ExperimentConfig cfg;
    cfg.n = 4;
    cfg.m = 4000;
    cfg.seed = RngSeed{135, 0};
    cfg.pair_count = 4000;
    cfg.delta = 0.5;
    cfg.C = 0.5;
    cfg.cone = ConeSpec::full(4);
    ExperimentReport rep = theorem_band_check(cfg);
    CHECK(rep.all_pass());
    const ReportRow& all = rep.rows.back();
    CHECK(all.get("violations") == 0.0);
    CHECK(all.get("pairs") == 4000.0);
    CHECK(all.get("worst_rel_margin") > 0.0);
    CHECK(all.get("mean_ratio") >= 0.25 - 0.01);
    CHECK(all.get("mean_ratio") <= 0.50 + 0.01);
  }

  TEST_CASE("band check parameter windows") {
    ExperimentConfig cfg;
    cfg.n = 3;
    cfg.m = 100;
    cfg.seed = RngSeed{136, 0};
    cfg.pair_count = 10;
    cfg.cone = ConeSpec::full(3);
    cfg.delta = 0.6;
    CHECK_THROWS_AS(theorem_band_check(cfg), InputError);
    cfg.delta = 0.0;
    CHECK_THROWS_AS(theorem_band_check(cfg), InputError);
    cfg.delta = 0.5;
    cfg.C = 1.0;
    CHECK_THROWS_AS(theorem_band_check(cfg), InputError);
  }

  TEST_CASE("band check is deterministic across worker counts") {
    ExperimentConfig cfg;
    cfg.n = 3;
    cfg.m = 500;
    cfg.seed = RngSeed{137, 0};
    cfg.pair_count = 3000;
    cfg.delta = 0.5;
    cfg.C = 0.4;
    cfg.cone = ConeSpec::full(3);
    CHECK(rows_equal(theorem_band_check(cfg, 1), theorem_band_check(cfg, 4)));
  }

  TEST_CASE("small-distance profile concentrates near one half") {
    ExperimentConfig cfg;
    cfg.n = 6;
    cfg.m = 4000;
    cfg.seed = RngSeed{138, 0};
    cfg.pair_count = 60;
    cfg.cone = ConeSpec::full(6);
    ExperimentReport rep = small_distance_profile(cfg, {1e-1, 1e-2, 1e-3, 1e-4});
    CHECK(rep.rows.size() == 4);
    for (const auto& row : rep.rows) {
      CHECK(row.get("min") >= 0.35);
      CHECK(row.get("max") <= 0.65);
    }
    // flat in eps: no blow-up of the band as eps -> 0
    double spread_small = rep.rows.back().get("max") - rep.rows.back().get("min");
    CHECK(spread_small <= 0.3);
  }

  TEST_CASE("beta sweep trends and certificate floor") {
    ExperimentReport rep = beta_sweep(4, {50, 500}, RngSeed{139, 0}, 20000, 32);
    CHECK(rep.rows.size() == 2);
    CHECK(rep.all_pass());
    double b_small = rep.rows[0].get("beta_lo");
    double b_large = rep.rows[1].get("beta_lo");
    CHECK(b_large <= b_small + 0.02);
    for (const auto& row : rep.rows) CHECK(row.get("cert_ratio") >= 1.4142135623730951 - 1e-9);
  }

  TEST_CASE("beta sweep requires an increasing m list") {
    CHECK_THROWS_AS(beta_sweep(4, {500, 50}, RngSeed{140, 0}, 100, 8), InputError);
    CHECK_THROWS_AS(beta_sweep(4, {}, RngSeed{140, 0}, 100, 8), InputError);
  }

  TEST_CASE("angle preservation at desk scale") {
    ExperimentConfig cfg;
    cfg.n = 6;
    cfg.m = 5000;
    cfg.seed = RngSeed{141, 0};
    cfg.pair_count = 200;
    cfg.cone = ConeSpec::full(6);
    ExperimentReport rep = angle_preservation_check(cfg);
    CHECK(rep.rows.size() == 1);
    CHECK(rep.rows[0].get("max_dev") <= 0.08);
    CHECK(rep.rows[0].get("skipped") == 0.0);
  }

  TEST_CASE("rip holds and the full-space statistic concentrates at 1") {
    ExperimentConfig cfg;
    cfg.n = 6;
    cfg.m = 2000;
    cfg.seed = RngSeed{142, 0};
    cfg.pair_count = 2000;
    cfg.delta = 0.3;
    cfg.cone = ConeSpec::full(6);
    ExperimentReport rep = rip_check(cfg);
    CHECK(rep.all_pass());
    const ReportRow& row = rep.rows[0];
    CHECK(row.get("violations") == 0.0);
    // chi-square(nm)/nm concentration of the shared matrix plus MC error
    CHECK(row.get("chi_dev") <= row.get("chi_band"));

    cfg.delta = 1.0;
    CHECK_THROWS_AS(rip_check(cfg), InputError);
  }

  TEST_CASE("rip on a sparse cone") {
    ExperimentConfig cfg;
    cfg.n = 20;
    cfg.m = 3000;
    cfg.seed = RngSeed{143, 0};
    cfg.pair_count = 1000;
    cfg.delta = 0.3;
    cfg.cone = ConeSpec::sparse_cone(20, 2);
    ExperimentReport rep = rip_check(cfg);
    CHECK(rep.rows[0].get("violations") == 0.0);
  }

  TEST_CASE("reports are bit-identical across reruns and workers") {
    ExperimentConfig cfg = lemma_cfg(144);
    cfg.pair_count = 50000;
    CHECK(rows_equal(mc_lemma_checks(cfg, 1), mc_lemma_checks(cfg, 4)));
    ExperimentReport a = expectation_identity_check(cfg, 1);
    ExperimentReport b = expectation_identity_check(cfg, 3);
    CHECK(rows_equal(a, b));
  }
}
