// splitclust command line: generate planted instances, cluster graphs with
// the convex splitting pipeline, audit optimality certificates, run the
// exact small-instance oracle, and drive phase-transition sweeps.
//
// Exit codes: 0 success / certificate pass; 2 pipeline declared failure;
// 3 certificate fail; 1 usage or IO errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "splitclust/splitclust.hpp"

namespace {

using namespace splitclust;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDeclaredFailure = 2;
constexpr int kExitCertificateFail = 3;

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  if (out.empty()) throw CLI::ValidationError("expected a comma-separated integer list");
  return out;
}

// Accepts "auto", a comma list "0.05,0.1", or a range "lo:hi:step".
std::vector<double> parse_eta_grid(const std::string& text, const PartialGraph& g) {
  if (text == "auto") {
    const double rate = observed_rate(g);
    if (rate <= 0.0) throw CLI::ValidationError("eta-grid auto needs at least one observation");
    return eta_grid_with_recommendation(g.n(), rate);
  }
  if (text.find(':') != std::string::npos) {
    double lo = 0, hi = 0, step = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
      throw CLI::ValidationError("eta-grid range must be lo:hi:step");
    std::vector<double> grid;
    for (double v = lo; v <= hi + 1e-12; v += step) grid.push_back(v);
    return grid;
  }
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    grid.push_back(std::stod(item));
  }
  if (grid.empty()) throw CLI::ValidationError("empty eta grid");
  return grid;
}

std::string format_clusters(const Clustering& c) {
  std::string out;
  for (int cl = 0; cl < c.cluster_count(); ++cl) {
    out += cl == 0 ? "{" : " {";
    bool first = true;
    for (int i = 0; i < c.n(); ++i) {
      if (c.label(i) != cl) continue;
      if (!first) out += ",";
      out += std::to_string(i);
      first = false;
    }
    out += "}";
  }
  return out;
}

void print_conditions(std::ostream& out, const std::vector<ConditionCheck>& checks) {
  char buf[160];
  for (const ConditionCheck& c : checks) {
    std::snprintf(buf, sizeof(buf), "  %-22s %14.6e %2s %14.6e  %s\n", c.name.c_str(), c.value,
                  c.strict ? "<" : "<=", c.bound, c.pass ? "PASS" : "FAIL");
    out << buf;
  }
}

void write_conditions_csv(const std::string& path, const std::vector<ConditionCheck>& checks) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv report: " + path);
  out << "condition,value,bound,strict,pass\n";
  char buf[160];
  for (const ConditionCheck& c : checks) {
    std::snprintf(buf, sizeof(buf), "%s,%.12g,%.12g,%d,%d\n", c.name.c_str(), c.value, c.bound,
                  c.strict ? 1 : 0, c.pass ? 1 : 0);
    out << buf;
  }
}

int run_generate(const std::string& sizes_text, double tau, double p0, std::uint64_t seed,
                 const std::string& mode, int b, const std::string& out_path,
                 const std::string& planted_path) {
  GeneratorParams params;
  params.cluster_sizes = parse_int_list(sizes_text);
  params.tau = tau;
  params.p0 = p0;
  params.seed = seed;
  if (mode == "bernoulli") {
    params.mode = NoiseMode::BernoulliFlips;
  } else if (mode == "fixed") {
    params.mode = NoiseMode::FixedPerNode;
    params.disagreements_per_node = b;
  } else {
    throw CLI::ValidationError("--mode must be bernoulli or fixed");
  }
  const Instance inst = generate_instance(params);
  save_graph(out_path, inst.graph);
  if (!planted_path.empty()) save_clustering(planted_path, inst.planted, "planted clustering");
  std::cout << "generated n=" << inst.graph.n() << " observed=" << inst.graph.observed_count()
            << " disagreements=" << count_disagreements(inst.graph, inst.planted) << "\n";
  return kExitOk;
}

int run_cluster(const std::string& in_path, const std::string& out_path, double eta,
                const std::string& grid_text, double tol, int max_iters, double validity_tol,
                const std::string& trace_path) {
  const PartialGraph g = load_graph(in_path);
  std::vector<double> grid;
  if (eta > 0.0)
    grid.push_back(eta);
  else
    grid = parse_eta_grid(grid_text, g);

  SolverConfig cfg;
  cfg.tol_rel = tol;
  cfg.max_iters = max_iters;
  const ClusterOutcome outcome = optimal_cluster(g, grid, cfg, validity_tol);

  if (!trace_path.empty()) {
    std::ofstream trace(trace_path);
    if (!trace) throw std::runtime_error("cannot write trace file: " + trace_path);
    write_trace_csv(trace, outcome.trace);
  }

  if (!outcome.success()) {
    std::cout << "failure: no eta in the grid produced a valid clustering ("
              << outcome.trace.size() << " solves)\n";
    return kExitDeclaredFailure;
  }

  char header[128];
  std::snprintf(header, sizeof(header), "status success eta %.6g disagreements %ld",
                *outcome.eta_used, *outcome.disagreements);
  if (!out_path.empty()) save_clustering(out_path, *outcome.clustering, header);
  std::cout << header << "\n";
  std::cout << "clusters: " << format_clusters(*outcome.clustering) << "\n";
  return kExitOk;
}

int run_certify(const std::string& in_path, const std::string& clustering_path,
                const std::string& mode, double eta, double series_tol, int max_terms, double p0,
                double tau, int k0_override, std::uint64_t seed, const std::string& report_path,
                const std::string& csv_path) {
  const PartialGraph g = load_graph(in_path);
  const Clustering c = load_clustering(clustering_path);
  if (c.n() != g.n()) throw std::runtime_error("clustering size does not match graph");
  const Matrix bstar = build_bstar(g, c);
  const DisagreementStats stats = disagreement_stats(g, c);

  std::ostringstream report;
  char buf[256];
  report << "certificate " << mode << "\n";
  std::snprintf(buf, sizeof(buf), "n %d clusters %d kmin %d dmax %.6g alpha %.6g\n", g.n(),
                c.cluster_count(), stats.kmin, stats.dmax, stats.alpha);
  report << buf;
  const EtaInterval interval = recovery_interval(stats);
  std::snprintf(buf, sizeof(buf), "deterministic eta window (%.6g, %.6g) feasible %s\n",
                interval.lo, interval.hi, interval.feasible ? "yes" : "no");
  report << buf;
  std::snprintf(buf, sizeof(buf), "space intersection condition (n*dmax/kmin < 1): %s\n",
                check_space_intersection(stats) ? "holds" : "violated");
  report << buf;
  std::snprintf(buf, sizeof(buf), "eta %.6g\n", eta);
  report << buf;

  std::vector<ConditionCheck> checks;
  bool pass = false;
  if (mode == "worstcase") {
    const IndexSet omega_obs = observed_set(g);
    const WorstCaseCertificate cert =
        build_worstcase_certificate(c, bstar, omega_obs, eta, series_tol, max_terms);
    std::snprintf(buf, sizeof(buf), "series converged %s terms %d theta %.4g\n",
                  cert.converged ? "yes" : "no", cert.series_terms, cert.theta_estimate);
    report << buf;
    checks = verify_deterministic(cert, c, bstar, omega_obs, eta);
    pass = cert.converged && all_pass(checks);
  } else if (mode == "golfing") {
    const double p0_eff = p0 > 0.0 ? p0 : observed_rate(g);
    double tau_eff = tau;
    if (tau_eff < 0.0) {
      const long obs = g.observed_count();
      tau_eff = obs > 0 ? static_cast<double>(count_disagreements(g, c)) / static_cast<double>(obs)
                        : 0.0;
    }
    GolfingParams gp = golfing_params(g.n(), p0_eff, tau_eff);
    if (k0_override > 0) {
      gp.k0 = k0_override;
      gp.q = 1.0 - std::pow(1.0 - p0_eff * (1.0 - tau_eff), 1.0 / static_cast<double>(gp.k0));
    }
    std::snprintf(buf, sizeof(buf), "model p0 %.6g tau %.6g -> k0 %d q %.6g seed %llu\n", p0_eff,
                  tau_eff, gp.k0, gp.q, static_cast<unsigned long long>(seed));
    report << buf;
    const IndexSet gamma = agreement_set(g, c);
    const std::vector<IndexSet> parts = sample_gamma_partition(gamma, gp.k0, gp.q, seed);
    const GolfingCertificate cert = build_golfing_certificate(c, bstar, parts, gp.q, eta);
    report << "recursion residuals";
    for (double r : cert.wk_target_residuals) {
      std::snprintf(buf, sizeof(buf), " %.3e", r);
      report << buf;
    }
    report << "\n";
    checks = verify_probabilistic(cert, c, bstar, gamma, eta);
    pass = all_pass(checks);
  } else {
    throw CLI::ValidationError("--mode must be worstcase or golfing");
  }

  report << "conditions:\n";
  print_conditions(report, checks);
  report << "overall: " << (pass ? "PASS" : "FAIL") << "\n";

  std::cout << report.str();
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw std::runtime_error("cannot write report: " + report_path);
    out << report.str();
  }
  if (!csv_path.empty()) write_conditions_csv(csv_path, checks);
  return pass ? kExitOk : kExitCertificateFail;
}

int run_oracle(const std::string& in_path, const std::string& out_path) {
  const PartialGraph g = load_graph(in_path);
  const auto [clustering, minimum] = brute_force_min(g);
  std::cout << "minimum " << minimum << "\n";
  std::cout << "clusters: " << format_clusters(clustering) << "\n";
  if (!out_path.empty()) save_clustering(out_path, clustering, "exact disagreement minimizer");
  return kExitOk;
}

int run_sweep_cmd(const std::string& spec_path, const std::string& out_path, int jobs) {
  std::ifstream in(spec_path);
  if (!in) throw std::runtime_error("cannot open sweep spec: " + spec_path);
  SweepSpec spec = parse_sweep_spec(in);
  if (jobs > 0) spec.jobs = jobs;
  const SweepGrid grid = run_sweep(spec);

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write sweep csv: " + out_path);
  write_sweep_csv(out, grid);
  std::ofstream meta(out_path + ".meta.json");
  if (!meta) throw std::runtime_error("cannot write sweep metadata: " + out_path + ".meta.json");
  write_sweep_metadata(meta, spec, kVersion);

  write_sweep_csv(std::cout, grid);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clustering partially observed graphs by sparse-plus-low-rank splitting"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "generate a planted-partition instance");
  std::string gen_sizes, gen_mode = "bernoulli", gen_out, gen_planted;
  double gen_tau = 0.0, gen_p0 = 1.0;
  std::uint64_t gen_seed = 0;
  int gen_b = 0;
  gen->add_option("--sizes", gen_sizes, "comma-separated cluster sizes")->required();
  gen->add_option("--tau", gen_tau, "pair flip probability");
  gen->add_option("--p0", gen_p0, "pair observation probability");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--mode", gen_mode, "bernoulli or fixed");
  gen->add_option("--b", gen_b, "per-node disagreements (fixed mode)");
  gen->add_option("--out", gen_out, "output graph file")->required();
  gen->add_option("--planted", gen_planted, "also write the planted clustering");

  // cluster
  auto* clu = app.add_subcommand("cluster", "find the provably optimal clustering");
  std::string clu_in, clu_out, clu_grid = "auto", clu_trace;
  double clu_eta = 0.0, clu_tol = 1e-7, clu_validity = kTol.validity;
  int clu_iters = 1000;
  clu->add_option("--in", clu_in, "input graph file")->required();
  clu->add_option("--out", clu_out, "output clustering file (written on success only)");
  clu->add_option("--eta", clu_eta, "single tradeoff weight in (0,1)");
  clu->add_option("--eta-grid", clu_grid, "auto, comma list, or lo:hi:step");
  clu->add_option("--tol", clu_tol, "solver relative residual tolerance");
  clu->add_option("--max-iters", clu_iters, "solver iteration cap");
  clu->add_option("--validity-tol", clu_validity, "entrywise rounding tolerance");
  clu->add_option("--trace", clu_trace, "write per-eta trace csv");

  // certify
  auto* cert = app.add_subcommand("certify", "audit an optimality certificate");
  std::string cert_in, cert_clustering, cert_mode, cert_report, cert_csv;
  double cert_eta = 0.0, cert_series_tol = kTol.series, cert_p0 = -1.0, cert_tau = -1.0;
  int cert_terms = 500, cert_k0 = 0;
  std::uint64_t cert_seed = 0;
  cert->add_option("--in", cert_in, "input graph file")->required();
  cert->add_option("--clustering", cert_clustering, "candidate clustering file")->required();
  cert->add_option("--mode", cert_mode, "worstcase or golfing")->required();
  cert->add_option("--eta", cert_eta, "tradeoff weight in (0,1)")->required();
  cert->add_option("--series-tol", cert_series_tol, "worstcase series term cutoff");
  cert->add_option("--max-terms", cert_terms, "worstcase series term cap");
  cert->add_option("--p0", cert_p0, "golfing observation rate (default: estimated)");
  cert->add_option("--tau", cert_tau, "golfing flip rate (default: estimated)");
  cert->add_option("--k0", cert_k0, "golfing step count override");
  cert->add_option("--seed", cert_seed, "golfing sampling seed");
  cert->add_option("--report", cert_report, "write the text report to a file");
  cert->add_option("--csv", cert_csv, "write the machine-readable report to a file");

  // oracle
  auto* ora = app.add_subcommand("oracle", "exact minimizer by exhaustive enumeration (n <= 12)");
  std::string ora_in, ora_out;
  ora->add_option("--in", ora_in, "input graph file")->required();
  ora->add_option("--out", ora_out, "output clustering file");

  // sweep
  auto* swp = app.add_subcommand("sweep", "run a success-probability grid");
  std::string swp_spec, swp_out;
  int swp_jobs = 0;
  swp->add_option("--spec", swp_spec, "sweep spec file")->required();
  swp->add_option("--out", swp_out, "output csv (metadata sidecar written alongside)")->required();
  swp->add_option("--jobs", swp_jobs, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return run_generate(gen_sizes, gen_tau, gen_p0, gen_seed, gen_mode, gen_b, gen_out,
                          gen_planted);
    if (clu->parsed())
      return run_cluster(clu_in, clu_out, clu_eta, clu_grid, clu_tol, clu_iters, clu_validity,
                         clu_trace);
    if (cert->parsed())
      return run_certify(cert_in, cert_clustering, cert_mode, cert_eta, cert_series_tol,
                         cert_terms, cert_p0, cert_tau, cert_k0, cert_seed, cert_report, cert_csv);
    if (ora->parsed()) return run_oracle(ora_in, ora_out);
    if (swp->parsed()) return run_sweep_cmd(swp_spec, swp_out, swp_jobs);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
