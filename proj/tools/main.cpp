#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relucond/estimators.hpp"
#include "relucond/exact.hpp"
#include "relucond/experiments.hpp"
#include "relucond/geometry.hpp"
#include "relucond/linalg.hpp"
#include "relucond/report.hpp"

using namespace relucond;

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

struct CommonOpts {
  std::string out;
  std::string format = "json";
  int workers = 1;
  bool check = false;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  RngSeed rng() const { return RngSeed{seed, stream}; }
};

void add_common(CLI::App* cmd, CommonOpts* o, bool needs_seed = true) {
  cmd->add_option("--out", o->out, "output path (default: stdout)");
  cmd->add_option("--format", o->format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--workers", o->workers, "worker threads; never changes output numbers")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--check", o->check, "exit 3 unless every built-in check passes");
  auto* seed = cmd->add_option("--seed", o->seed, "RNG seed (mandatory; no wall-clock default)");
  if (needs_seed) seed->required();
  cmd->add_option("--stream", o->stream, "RNG substream id");
}

ConeSpec parse_cone(const std::string& text, std::size_t n) {
  if (text == "full") return ConeSpec::full(n);
  if (text.rfind("sparse:", 0) == 0) {
    std::size_t k = std::stoull(text.substr(7));
    return ConeSpec::sparse_cone(n, k);
  }
  if (text.rfind("halfspaces:", 0) == 0) {
    Matrix m = read_matrix_file(text.substr(11));
    if (m.cols != n) throw InputError("halfspace normals have wrong dimension");
    std::vector<Vector> normals;
    for (std::size_t i = 0; i < m.rows; ++i)
      normals.emplace_back(m.row(i), m.row(i) + m.cols);
    return ConeSpec::halfspaces(n, std::move(normals));
  }
  throw InputError("cone must be full, sparse:<k> or halfspaces:<file>");
}

int emit(RunReport report, const CommonOpts& o,
         std::chrono::steady_clock::time_point start) {
  report.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  std::string text = o.format == "csv" ? to_csv(report) : to_json(report);
  if (o.out.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream f(o.out);
    if (!f) throw InputError("cannot write output file: " + o.out);
    f << text;
  }
  if (o.check && !report.results.all_pass()) return 3;
  return 0;
}

std::string join_u64(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

std::string join_d(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += fmt_double(v[i]);
  }
  return s;
}

void push_seed(RunReport* rep, const CommonOpts& o) {
  rep->config.emplace_back("seed", std::to_string(o.seed));
  rep->config.emplace_back("stream", std::to_string(o.stream));
  rep->config.emplace_back("format", o.format);
}

void add_bracket_row(ExperimentReport* results, const std::string& label,
                     const BiLipBracket& b) {
  ReportRow row;
  row.label = label;
  row.add("U_lo", b.U_lo).add("L_hi", b.L_hi);
  if (b.has_U_hi()) row.add("U_hi", b.U_hi);
  if (b.has_L_lo()) row.add("L_lo", b.L_lo);
  row.add("beta_lo", b.beta_lo)
      .add("collapsed", b.collapsed ? 1.0 : 0.0)
      .add("pairs", static_cast<double>(b.sample_count));
  results->rows.push_back(std::move(row));
}

void add_cert_row(ExperimentReport* results, const Sqrt2Certificate& cert) {
  ReportRow row;
  row.label = "certificate";
  row.add("r_plus", cert.r_plus)
      .add("r_minus", cert.r_minus)
      .add("U_lb", cert.U_lb)
      .add("L_ub", cert.L_ub)
      .add("cert_ratio", cert.cert_ratio)
      .add("pass", cert.cert_ratio >= kSqrt2 - 1e-9 ? 1.0 : 0.0);
  results->rows.push_back(std::move(row));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bi-Lipschitz constants and condition number of ReLU layers"};
  app.require_subcommand(1);

  // ---- analyze ----
  auto* analyze = app.add_subcommand("analyze", "exact bounds + sampled bracket for a matrix");
  CommonOpts a_o;
  std::string a_matrix, a_bias;
  std::uint64_t a_pairs = 100000, a_probes = 64;
  std::size_t a_resolution = 512;
  analyze->add_option("--matrix", a_matrix)->required();
  analyze->add_option("--bias", a_bias, "optional bias vector (m x 1 matrix file)");
  analyze->add_option("--pairs", a_pairs);
  analyze->add_option("--probes", a_probes);
  analyze->add_option("--resolution", a_resolution, "brute-force grid (n <= 2); 0 disables");
  add_common(analyze, &a_o);

  // ---- certify ----
  auto* certify = app.add_subcommand("certify", "sqrt(2) condition-number certificate");
  CommonOpts c_o;
  std::string c_matrix;
  std::uint64_t c_probes = 64;
  certify->add_option("--matrix", c_matrix)->required();
  certify->add_option("--probes", c_probes);
  add_common(certify, &c_o);

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "beta_lo and certificate vs m for Gaussian layers");
  CommonOpts s_o;
  std::size_t s_n = 10;
  std::vector<std::size_t> s_m;
  std::uint64_t s_pairs = 100000, s_probes = 64;
  sweep->add_option("--n", s_n)->required();
  sweep->add_option("--m", s_m)->required()->delimiter(',');
  sweep->add_option("--pairs", s_pairs);
  sweep->add_option("--probes", s_probes);
  add_common(sweep, &s_o);

  // ---- lemmas ----
  auto* lemmas = app.add_subcommand("lemmas", "expectation lemma checks + identity z-scores");
  CommonOpts l_o;
  std::size_t l_n = 8;
  std::uint64_t l_rows = 1000000, l_trials = 10;
  std::vector<double> l_alpha{0.1};
  double l_beta = 10.0;
  lemmas->add_option("--n", l_n);
  lemmas->add_option("--rows", l_rows, "MC rows per estimate");
  lemmas->add_option("--trials", l_trials, "independent (x, y) pairs");
  lemmas->add_option("--alpha", l_alpha)->delimiter(',');
  lemmas->add_option("--beta", l_beta);
  add_common(lemmas, &l_o);

  // ---- band ----
  auto* band = app.add_subcommand("band", "two-sided (1/2 - phi -+ delta/2) band check");
  CommonOpts b_o;
  std::size_t b_n = 8, b_m = 20000;
  std::uint64_t b_pairs = 100000;
  double b_delta = 0.5, b_C = 0.5;
  std::string b_cone = "full";
  band->add_option("--n", b_n);
  band->add_option("--m", b_m);
  band->add_option("--pairs", b_pairs);
  band->add_option("--delta", b_delta);
  band->add_option("--C", b_C, "large/small regime threshold");
  band->add_option("--cone", b_cone);
  add_common(band, &b_o);

  // ---- small ----
  auto* small = app.add_subcommand("small", "small-distance ratio profile");
  CommonOpts sm_o;
  std::size_t sm_n = 10, sm_m = 5000;
  std::uint64_t sm_pairs = 100;
  std::vector<double> sm_eps{1e-1, 1e-2, 1e-3, 1e-4};
  small->add_option("--n", sm_n);
  small->add_option("--m", sm_m);
  small->add_option("--pairs", sm_pairs, "pairs per eps");
  small->add_option("--eps", sm_eps)->delimiter(',');
  add_common(small, &sm_o);

  // ---- angle ----
  auto* angle = app.add_subcommand("angle", "post-layer angle vs prediction");
  CommonOpts an_o;
  std::size_t an_n = 10, an_m = 20000;
  std::uint64_t an_pairs = 1000;
  std::string an_cone = "full";
  angle->add_option("--n", an_n);
  angle->add_option("--m", an_m);
  angle->add_option("--pairs", an_pairs);
  angle->add_option("--cone", an_cone);
  add_common(angle, &an_o);

  // ---- rip ----
  auto* rip = app.add_subcommand("rip", "restricted isometry of (1/sqrt(m)) A on cone pairs");
  CommonOpts r_o;
  std::size_t r_n = 10, r_m = 5000;
  std::uint64_t r_pairs = 10000;
  double r_delta = 0.2;
  std::string r_cone = "full";
  rip->add_option("--n", r_n);
  rip->add_option("--m", r_m);
  rip->add_option("--pairs", r_pairs);
  rip->add_option("--delta", r_delta);
  rip->add_option("--cone", r_cone);
  add_common(rip, &r_o);

  // ---- width ----
  auto* width = app.add_subcommand("width", "Monte-Carlo Gaussian width of a cone");
  CommonOpts w_o;
  std::size_t w_n = 2;
  std::uint64_t w_draws = 100000;
  std::string w_cone = "full";
  width->add_option("--n", w_n);
  width->add_option("--draws", w_draws);
  width->add_option("--cone", w_cone);
  add_common(width, &w_o);

  // ---- net ----
  auto* net = app.add_subcommand("net", "greedy farthest-point eps-net of the sphere");
  CommonOpts n_o;
  std::size_t n_n = 2;
  double n_eps = 0.1;
  std::uint64_t n_probes = 10000;
  net->add_option("--n", n_n);
  net->add_option("--eps", n_eps);
  net->add_option("--probes", n_probes);
  add_common(net, &n_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  auto start = std::chrono::steady_clock::now();
  try {
    if (*analyze) {
      Matrix m = read_matrix_file(a_matrix);
      LayerMap layer = a_bias.empty() ? LayerMap{m} : [&] {
        Matrix bm = read_matrix_file(a_bias);
        if (bm.cols != 1 || bm.rows != m.rows)
          throw InputError("bias file must be an m x 1 matrix");
        return LayerMap{m, bm.data};
      }();
      RunReport rep;
      rep.command = "analyze";
      rep.config = {{"matrix", a_matrix},
                    {"bias", a_bias.empty() ? "0" : a_bias},
                    {"pairs", std::to_string(a_pairs)},
                    {"probes", std::to_string(a_probes)},
                    {"resolution", std::to_string(a_resolution)}};
      push_seed(&rep, a_o);

      bool desk_exact = m.rows <= kMaxExactRows && m.cols <= kMaxExactCols;
      if (desk_exact && layer.zero_bias()) {
        BoundsReport bounds = related_bounds(m);
        ReportRow row;
        row.label = "bounds";
        row.add("lambda_max", bounds.lambda_max)
            .add("lambda_A", bounds.lambda_A)
            .add("L_lower_reading1", bounds.L_lower_reading1)
            .add("L_reading2_lo", bounds.L_reading2_lo)
            .add("L_reading2_hi", bounds.L_reading2_hi)
            .add("beta_upper", bounds.beta_upper)
            .add("has_empty_cell", bounds.has_empty_cell ? 1.0 : 0.0)
            .add("degenerate_warning", bounds.degenerate_warning ? 1.0 : 0.0);
        rep.results.rows.push_back(std::move(row));
        ReportRow urow;
        urow.label = "exact_upper";
        urow.add("U_exact", exact_upper_lipschitz(m));
        rep.results.rows.push_back(std::move(urow));
      }

      BiLipBracket bracket =
          sampled_bilip(layer, a_pairs, a_o.rng(), /*include_structured=*/true, a_o.workers);
      if (desk_exact && layer.zero_bias())
        bracket.U_hi = exact_upper_lipschitz(m);
      else
        bracket.U_hi = singular_extremes(m).sigma_max / std::sqrt(static_cast<double>(m.rows));
      add_bracket_row(&rep.results, "bracket", bracket);

      if (!bracket.collapsed) {
        RefinedPair up = refine_extreme(layer, bracket.max_x, bracket.max_y, Direction::max, 60);
        RefinedPair lo = refine_extreme(layer, bracket.min_x, bracket.min_y, Direction::min, 60);
        ReportRow row;
        row.label = "refined";
        double rl = std::min(lo.ratio, bracket.L_hi);
        double ru = std::max(up.ratio, bracket.U_lo);
        row.add("U_lo", ru).add("L_hi", rl).add("beta_lo", rl > 1e-13 ? ru / rl : kInf);
        rep.results.rows.push_back(std::move(row));
      }

      if (layer.zero_bias()) {
        add_cert_row(&rep.results, sqrt2_certificate(m, a_probes, substream(a_o.rng(), 1)));
        if (m.cols <= 2 && a_resolution >= 8) {
          BiLipBracket oracle = brute_force_bilip(m, a_resolution);
          add_bracket_row(&rep.results, "bruteforce", oracle);
          if (oracle.has_U_hi() && !oracle.collapsed) {
            ReportRow row;
            row.label = "beta_oracle";
            row.add("beta", oracle.U_hi / oracle.L_hi)
                .add("ratio_gap", oracle.U_lo - oracle.L_hi);
            rep.results.rows.push_back(std::move(row));
          }
        }
      }
      return emit(std::move(rep), a_o, start);
    }

    if (*certify) {
      Matrix m = read_matrix_file(c_matrix);
      RunReport rep;
      rep.command = "certify";
      rep.config = {{"matrix", c_matrix}, {"probes", std::to_string(c_probes)}};
      push_seed(&rep, c_o);
      add_cert_row(&rep.results, sqrt2_certificate(m, c_probes, c_o.rng()));
      return emit(std::move(rep), c_o, start);
    }

    if (*sweep) {
      RunReport rep;
      rep.command = "sweep";
      rep.config = {{"n", std::to_string(s_n)},
                    {"m", join_u64(s_m)},
                    {"pairs", std::to_string(s_pairs)},
                    {"probes", std::to_string(s_probes)}};
      push_seed(&rep, s_o);
      rep.results = beta_sweep(s_n, s_m, s_o.rng(), s_pairs, s_probes, s_o.workers);
      return emit(std::move(rep), s_o, start);
    }

    if (*lemmas) {
      RunReport rep;
      rep.command = "lemmas";
      rep.config = {{"n", std::to_string(l_n)},
                    {"rows", std::to_string(l_rows)},
                    {"trials", std::to_string(l_trials)},
                    {"alpha", join_d(l_alpha)},
                    {"beta", fmt_double(l_beta)}};
      push_seed(&rep, l_o);
      ExperimentConfig cfg;
      cfg.n = l_n;
      cfg.seed = l_o.rng();
      cfg.pair_count = l_rows;
      cfg.beta_param = l_beta;
      cfg.trials = l_trials;
      cfg.cone = ConeSpec::full(l_n);
      for (double alpha : l_alpha) {
        cfg.alpha = alpha;
        ExperimentReport part = mc_lemma_checks(cfg, l_o.workers);
        for (auto& row : part.rows) rep.results.rows.push_back(std::move(row));
      }
      ExperimentReport ident = expectation_identity_check(cfg, l_o.workers);
      for (auto& row : ident.rows) {
        row.label = "identity";
        rep.results.rows.push_back(std::move(row));
      }
      return emit(std::move(rep), l_o, start);
    }

    if (*band) {
      RunReport rep;
      rep.command = "band";
      rep.config = {{"n", std::to_string(b_n)},     {"m", std::to_string(b_m)},
                    {"pairs", std::to_string(b_pairs)}, {"delta", fmt_double(b_delta)},
                    {"C", fmt_double(b_C)},         {"cone", b_cone}};
      push_seed(&rep, b_o);
      ExperimentConfig cfg;
      cfg.n = b_n;
      cfg.m = b_m;
      cfg.seed = b_o.rng();
      cfg.pair_count = b_pairs;
      cfg.delta = b_delta;
      cfg.C = b_C;
      cfg.cone = parse_cone(b_cone, b_n);
      rep.results = theorem_band_check(cfg, b_o.workers);
      return emit(std::move(rep), b_o, start);
    }

    if (*small) {
      RunReport rep;
      rep.command = "small";
      rep.config = {{"n", std::to_string(sm_n)},
                    {"m", std::to_string(sm_m)},
                    {"pairs", std::to_string(sm_pairs)},
                    {"eps", join_d(sm_eps)}};
      push_seed(&rep, sm_o);
      ExperimentConfig cfg;
      cfg.n = sm_n;
      cfg.m = sm_m;
      cfg.seed = sm_o.rng();
      cfg.pair_count = sm_pairs;
      cfg.cone = ConeSpec::full(sm_n);
      rep.results = small_distance_profile(cfg, sm_eps, sm_o.workers);
      return emit(std::move(rep), sm_o, start);
    }

    if (*angle) {
      RunReport rep;
      rep.command = "angle";
      rep.config = {{"n", std::to_string(an_n)},
                    {"m", std::to_string(an_m)},
                    {"pairs", std::to_string(an_pairs)},
                    {"cone", an_cone}};
      push_seed(&rep, an_o);
      ExperimentConfig cfg;
      cfg.n = an_n;
      cfg.m = an_m;
      cfg.seed = an_o.rng();
      cfg.pair_count = an_pairs;
      cfg.cone = parse_cone(an_cone, an_n);
      rep.results = angle_preservation_check(cfg, an_o.workers);
      return emit(std::move(rep), an_o, start);
    }

    if (*rip) {
      RunReport rep;
      rep.command = "rip";
      rep.config = {{"n", std::to_string(r_n)},     {"m", std::to_string(r_m)},
                    {"pairs", std::to_string(r_pairs)}, {"delta", fmt_double(r_delta)},
                    {"cone", r_cone}};
      push_seed(&rep, r_o);
      ExperimentConfig cfg;
      cfg.n = r_n;
      cfg.m = r_m;
      cfg.seed = r_o.rng();
      cfg.pair_count = r_pairs;
      cfg.delta = r_delta;
      cfg.cone = parse_cone(r_cone, r_n);
      rep.results = rip_check(cfg, r_o.workers);
      return emit(std::move(rep), r_o, start);
    }

    if (*width) {
      RunReport rep;
      rep.command = "width";
      rep.config = {{"n", std::to_string(w_n)},
                    {"draws", std::to_string(w_draws)},
                    {"cone", w_cone}};
      push_seed(&rep, w_o);
      ConeSpec cone = parse_cone(w_cone, w_n);
      WidthEstimate est = gaussian_width_mc(cone, w_draws, w_o.rng(), w_o.workers);
      ReportRow row;
      row.label = "width";
      row.add("mean", est.mean).add("se", est.se).add("draws", static_cast<double>(est.draws));
      rep.results.rows.push_back(std::move(row));
      return emit(std::move(rep), w_o, start);
    }

    if (*net) {
      RunReport rep;
      rep.command = "net";
      rep.config = {{"n", std::to_string(n_n)},
                    {"eps", fmt_double(n_eps)},
                    {"probes", std::to_string(n_probes)}};
      push_seed(&rep, n_o);
      EpsilonNet enet = epsilon_net_sphere(n_n, n_eps, n_o.rng(), n_probes);
      ReportRow row;
      row.label = "net";
      row.add("size", static_cast<double>(enet.net.size()))
          .add("eps", n_eps)
          .add("sudakov", enet.sudakov_quantity)
          .add("verified", enet.verified ? 1.0 : 0.0)
          .add("pass", enet.verified ? 1.0 : 0.0);
      rep.results.rows.push_back(std::move(row));
      return emit(std::move(rep), n_o, start);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
