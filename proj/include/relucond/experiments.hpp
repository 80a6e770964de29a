#pragma once

#include <string>
#include <utility>
#include <vector>

#include "relucond/cones.hpp"
#include "relucond/estimators.hpp"
#include "relucond/types.hpp"

namespace relucond {

/// Seeded experiment parameters.  `workers` is passed separately by the CLI
/// because it must never influence a single output number.
struct ExperimentConfig {
  std::size_t n = 0;
  std::size_t m = 0;
  RngSeed seed;
  std::uint64_t pair_count = 0;
  double delta = 0.5;
  double alpha = 0.1;
  double beta_param = 10.0;
  double C = 0.5;
  std::uint64_t trials = 10;
  std::uint64_t probe_count = 64;
  ConeSpec cone;
};

struct ReportRow {
  std::string label;  // optional row tag ("certificate", "E1_half", ...)
  std::vector<std::pair<std::string, double>> values;

  ReportRow& add(const std::string& key, double v) {
    values.emplace_back(key, v);
    return *this;
  }
  double get(const std::string& key) const;
  bool has(const std::string& key) const;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;

  /// False if any row carries pass = 0.
  bool all_pass() const;
};

// Lemma expectation checks: E[<a,y>^2 1{<a,x> >= 0}] = 1/2, the 2*alpha
// window bound, the Gaussian tail bound, and the two-sided truncated bounds.
ExperimentReport mc_lemma_checks(const ExperimentConfig& cfg, int workers = 1);

// MC mean of (relu<a,x> - relu<a,y>)^2 against the closed form
// |x-y|^2/2 - psi(x,y), reported as z-scores over mixture pairs.
ExperimentReport expectation_identity_check(const ExperimentConfig& cfg, int workers = 1);

// Two-sided band (1/2 - phi -+ delta/2)|x-y|^2 for one Gaussian layer over
// cone pairs, segmented into the large/small distance regimes by C.
ExperimentReport theorem_band_check(const ExperimentConfig& cfg, int workers = 1);

// Distribution of the m-normalized squared ratio at |x-y| = eps |x|,
// for eps in `eps_list`; concentrates near 1/2.
ExperimentReport small_distance_profile(const ExperimentConfig& cfg,
                                        const std::vector<double>& eps_list,
                                        int workers = 1);

// Per m: sampled bracket plus sqrt2 certificate for a fresh Gaussian layer.
ExperimentReport beta_sweep(std::size_t n, const std::vector<std::size_t>& m_list,
                            const RngSeed& seed, std::uint64_t pair_count,
                            std::uint64_t probe_count, int workers = 1);

// Deviation of the post-layer angle cosine from
// cos(theta) + (sin(theta) - theta cos(theta))/pi.
ExperimentReport angle_preservation_check(const ExperimentConfig& cfg, int workers = 1);

// (1 -+ delta) restricted isometry of (1/sqrt(m)) A on cone differences.
ExperimentReport rip_check(const ExperimentConfig& cfg, int workers = 1);

}  // namespace relucond
