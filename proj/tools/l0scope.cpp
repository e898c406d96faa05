#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "l0scope/io.hpp"
#include "l0scope/random.hpp"

namespace {

using namespace l0scope;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNotConverged = 2;
// A certified-critical point that fails the independent local-minimality
// checks: cannot happen for the l0 pipeline unless something is wrong, so it
// gets its own exit code as a self-test channel.
constexpr int kExitInconsistent = 3;

enum class Format { Structured, Table, Both };

struct GlobalConfig {
  double kkt_tol = 1e-8;
  double crit_tol = 1e-8;
  double zero_tol = 1e-9;
  double feas_tol = 1e-9;
  double dedup_tol = 1e-7;
  double sv_tol = 1e-10;
  std::uint64_t seed = 0;
  std::string output;
  Format format = Format::Both;

  SolverOptions solver_options() const {
    SolverOptions o;
    o.kkt_tol_box = kkt_tol;
    o.feas_tol = feas_tol;
    o.zero_tol = zero_tol;
    return o;
  }
};

void emit(const GlobalConfig& cfg, const Json& structured, const std::string& table) {
  if (cfg.format == Format::Table || cfg.format == Format::Both) std::cout << table;
  if (cfg.format == Format::Structured) std::cout << structured.dump(2) << "\n";
  if (!cfg.output.empty()) {
    std::ofstream out(cfg.output);
    if (!out) throw ValidationError("cannot write output file", cfg.output);
    out << structured.dump(2) << "\n";
  }
}

Vector read_point(const std::string& spec, Index n) {
  if (spec == "zero") return Vector::Zero(n);
  Vector x = read_vector_file(spec);
  if (x.size() != n)
    throw ValidationError("point has length " + std::to_string(x.size()) +
                              ", problem dimension is " + std::to_string(n),
                          spec);
  return x;
}

Vector starting_point(const std::string& spec, Index n) {
  if (spec == "zero" || spec.empty()) return Vector::Zero(n);
  if (spec.rfind("random:", 0) == 0) {
    Rng rng(std::stoull(spec.substr(7)));
    return rng.normal_vector(n);
  }
  return read_point(spec, n);
}

int cmd_enumerate(const GlobalConfig& cfg, const std::string& problem_path, int max_m) {
  ProblemInstance p = read_problem_file(problem_path);
  EnumerateOptions opts;
  opts.solver = cfg.solver_options();
  opts.dedup_tol = cfg.dedup_tol;
  opts.max_components = max_m;
  opts.zero_tol = cfg.zero_tol;
  opts.feas_tol = cfg.feas_tol;
  LandscapeReport report = enumerate_landscape(p, opts);
  emit(cfg, landscape_to_json(report), landscape_table(report));
  return kExitOk;
}

int cmd_solve(const GlobalConfig& cfg, const std::string& problem_path,
              const std::string& method, const std::string& x0_spec, double eta,
              double rho0, double sigma, double rho_max, double step_tol, double pd_tol,
              long max_iters, const std::string& trace_path) {
  ProblemInstance p = read_problem_file(problem_path);
  const Vector x0 = starting_point(x0_spec, p.dim());

  SolverTrace trace;
  if (method == "iht") {
    IhtOptions opts;
    opts.eta = eta;
    opts.step_tol = step_tol;
    opts.max_iters = max_iters;
    opts.zero_tol = cfg.zero_tol;
    opts.feas_tol = cfg.feas_tol;
    trace = solve_iht(p, x0, opts);
  } else if (method == "pd") {
    PdOptions opts;
    opts.rho0 = rho0;
    opts.sigma = sigma;
    opts.rho_max = rho_max;
    opts.pd_tol = pd_tol;
    opts.qp = cfg.solver_options();
    opts.qp.max_iters = max_iters;
    opts.zero_tol = cfg.zero_tol;
    opts.feas_tol = cfg.feas_tol;
    trace = solve_pd(p, x0, opts);
  } else {
    throw ValidationError("unknown method '" + method + "' (iht | pd)");
  }

  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) throw ValidationError("cannot write trace file", trace_path);
    out << trace_rows(trace, p, cfg.zero_tol);
  }

  const Json j = trace_summary_to_json(trace, p, cfg.zero_tol);
  std::ostringstream table;
  table << "method      : " << j["method"].get<std::string>() << "\n"
        << "converged   : " << (trace.converged ? "yes" : "no") << " ("
        << j["stop_reason"].get<std::string>() << ")\n"
        << "iterations  : " << j["iterations"] << "\n"
        << "final       : " << j["final"].dump() << "\n"
        << "f(final)    : " << j["f_final"].dump() << "\n"
        << "support     : " << j["support"].dump() << "\n";
  emit(cfg, j, table.str());
  return trace.converged ? kExitOk : kExitNotConverged;
}

int cmd_certify(const GlobalConfig& cfg, const std::string& problem_path,
                const std::string& point_spec, long samples) {
  ProblemInstance p = read_problem_file(problem_path);
  const Vector xbar = read_point(point_spec, p.dim());

  CertifyOptions copts;
  copts.crit_tol = cfg.crit_tol;
  copts.zero_tol = cfg.zero_tol;
  copts.feas_tol = cfg.feas_tol;
  const CriticalityCertificate cert = certify_critical(p, xbar, copts);

  Json j;
  j["certificate"] = certificate_to_json(cert);
  std::ostringstream table;
  table << "verdict  : "
        << (cert.verdict == Verdict::Critical ? "critical" : "not-critical") << "\n"
        << "residual : " << cert.residual << "\n"
        << "lambda   : " << vector_to_json(cert.lambda).dump() << "\n"
        << "nu       : " << vector_to_json(cert.nu).dump() << "\n";

  bool inconsistent = false;
  if (cert.verdict == Verdict::Critical) {
    TheoremCheckOptions topts;
    topts.solver = cfg.solver_options();
    topts.samples = samples;
    topts.rng_seed = cfg.seed;
    topts.zero_tol = cfg.zero_tol;
    topts.feas_tol = cfg.feas_tol;
    const TheoremCheck check = verify_theorem_crlo(p, xbar, topts);
    j["theorem_check"] = theorem_check_to_json(check);
    table << "local-minimality check: "
          << (check.consistent ? "consistent" : "HARD INCONSISTENCY") << " (f1 gap "
          << check.f1_gap << ", sampling "
          << (check.survives_sampling ? "not-refuted" : "refuted") << ")\n";
    inconsistent = !check.consistent;
  }
  emit(cfg, j, table.str());
  return inconsistent ? kExitInconsistent : kExitOk;
}

int cmd_verify_local(const GlobalConfig& cfg, const std::string& problem_path,
                     const std::string& point_spec, double radius, long samples) {
  ProblemInstance p = read_problem_file(problem_path);
  const Vector xbar = read_point(point_spec, p.dim());
  const SamplingResult result = verify_local_by_sampling(p, xbar, radius, samples, cfg.seed,
                                                         cfg.zero_tol, cfg.feas_tol);
  Json j = sampling_to_json(result);
  std::ostringstream table;
  table << "verdict : " << j["verdict"].get<std::string>() << "\n"
        << "f(x)    : " << result.f_center << "\n";
  if (result.verdict == SamplingVerdict::Refuted)
    table << "witness : " << vector_to_json(result.witness).dump() << " with f "
          << result.f_witness << "\n";
  emit(cfg, j, table.str());
  return kExitOk;
}

RankOptions rank_options(const GlobalConfig& cfg) {
  RankOptions opts;
  opts.sv_tol = cfg.sv_tol;
  opts.rng_seed = cfg.seed;
  return opts;
}

int cmd_rank_certify(const GlobalConfig& cfg, const std::string& b_path,
                     const std::string& a_path) {
  RankProblem rp{read_matrix_file(b_path)};
  const Matrix A = read_matrix_file(a_path);
  const ContrastReport report = contrast_report(rp, A, rank_options(cfg));

  Json j = contrast_to_json(report);
  std::ostringstream table;
  table << "rank       : " << report.matrix_side.numerical_rank << "\n"
        << "critical   : " << (report.matrix_side.critical ? "yes" : "no") << " (residual "
        << report.matrix_side.criticality_residual << ")\n"
        << "refuted    : " << (report.matrix_refuted ? "yes" : "no") << "\n";
  if (report.matrix_side.refutation) {
    const auto& r = *report.matrix_side.refutation;
    table << "descent curve: " << r.kind << " at eps " << r.epsilon << ", F decrease "
          << r.f_decrease << "\n";
  }
  table << "critical => local minimizer here: "
        << (report.matrix_implication_held ? "held" : "FAILED") << "\n";
  emit(cfg, j, table.str());
  return kExitOk;
}

int cmd_rank_demo(const GlobalConfig& cfg) {
  Matrix B(2, 2), Abar(2, 2);
  B << 2, 1, 1, 2;
  Abar << 0.5, -0.5, -0.5, 0.5;
  RankProblem rp{B};
  const RankOptions opts = rank_options(cfg);
  const ContrastReport report = contrast_report(rp, Abar, opts);

  Json j = contrast_to_json(report);
  j["neg_gradient"] = matrix_to_json(Matrix(-rank_smooth_gradient(rp, Abar)));

  std::ostringstream table;
  table << "target B     : " << matrix_to_json(B).dump() << "\n"
        << "point A      : " << matrix_to_json(Abar).dump() << "\n"
        << "rank(A)      : " << report.matrix_side.numerical_rank << "\n"
        << "-grad F1(A)  : " << j["neg_gradient"].dump() << "\n"
        << "critical     : " << (report.matrix_side.critical ? "yes" : "no") << " (residual "
        << report.matrix_side.criticality_residual << ")\n";

  // The explicit rank-preserving curve, evaluated where the decrease is
  // plainly visible.
  Json curve = Json::array();
  table << "descent curve A(eps), rank kept at 1:\n";
  for (double eps : {0.1, 0.05, 0.01}) {
    const auto a_eps = det_preserving_curve_2x2(Abar, eps);
    const double decrease = rank_smooth_value(rp, *a_eps) - rank_smooth_value(rp, Abar);
    const RankPointAnalysis pa = certify_critical_rank(rp, *a_eps, opts);
    Json entry;
    entry["epsilon"] = eps;
    entry["a_eps"] = matrix_to_json(*a_eps);
    entry["f_decrease"] = decrease;
    entry["rank"] = pa.numerical_rank;
    curve.push_back(std::move(entry));
    table << "  eps " << eps << ": F1 change " << std::setprecision(12) << decrease
          << ", rank " << pa.numerical_rank << "\n";
  }
  j["curve"] = std::move(curve);

  table << "critical yet not a local minimizer: the implication that holds for the\n"
           "l0 objective fails for rank (the vector analogue below stays consistent)\n";
  table << "vector analogue: critical = "
        << (report.vector_certificate.verdict == Verdict::Critical ? "yes" : "no");
  if (report.vector_check)
    table << ", local-minimality check "
          << (report.vector_check->consistent ? "consistent" : "FAILED");
  table << "\n";

  emit(cfg, j, table.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"l0scope: landscape enumeration, criticality certificates and solvers "
               "for l0-composite quadratic problems, plus a rank contrast demo"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalConfig cfg;
  app.add_option("--kkt-tol", cfg.kkt_tol, "Subproblem KKT tolerance")
      ->envname("L0SCOPE_KKT_TOL");
  app.add_option("--crit-tol", cfg.crit_tol, "Relative criticality tolerance")
      ->envname("L0SCOPE_CRIT_TOL");
  app.add_option("--zero-tol", cfg.zero_tol, "Threshold for |g_i(x)| to count as nonzero")
      ->envname("L0SCOPE_ZERO_TOL");
  app.add_option("--feas-tol", cfg.feas_tol, "Feasibility tolerance")
      ->envname("L0SCOPE_FEAS_TOL");
  app.add_option("--dedup-tol", cfg.dedup_tol, "Minimizer deduplication tolerance")
      ->envname("L0SCOPE_DEDUP_TOL");
  app.add_option("--sv-tol", cfg.sv_tol, "Relative singular-value cutoff for rank")
      ->envname("L0SCOPE_SV_TOL");
  app.add_option("--seed", cfg.seed, "Seed for all randomized steps")
      ->envname("L0SCOPE_SEED");
  app.add_option("--output", cfg.output, "Write the structured report to this file");
  std::map<std::string, Format> format_names{{"structured", Format::Structured},
                                             {"table", Format::Table},
                                             {"both", Format::Both}};
  app.add_option("--format", cfg.format, "structured | table | both")
      ->transform(CLI::CheckedTransformer(format_names, CLI::ignore_case));

  auto* enumerate = app.add_subcommand(
      "enumerate", "Solve every support subproblem and list all local minimizers");
  std::string enum_problem;
  int max_m = 24;
  enumerate->add_option("problem", enum_problem, "Problem file (JSON)")->required();
  enumerate->add_option("--max-M", max_m, "Refuse instances with more g components");

  auto* solve = app.add_subcommand("solve", "Run an iterative solver");
  std::string solve_problem, method, x0_spec = "zero", trace_path;
  double eta = 0.0, rho0 = 1.0, sigma = 4.0, rho_max = 1e12, step_tol = 1e-10,
         pd_tol = 1e-6;
  long solve_max_iters = 200000;
  solve->add_option("problem", solve_problem, "Problem file (JSON)")->required();
  solve->add_option("--method", method, "iht | pd")->required();
  solve->add_option("--x0", x0_spec, "zero | random:SEED | point file");
  solve->add_option("--eta", eta, "IHT step size (default 0.99/L)");
  solve->add_option("--rho0", rho0, "Initial penalty weight");
  solve->add_option("--sigma", sigma, "Penalty growth factor");
  solve->add_option("--rho-max", rho_max, "Penalty weight cap");
  solve->add_option("--step-tol", step_tol, "IHT step tolerance");
  solve->add_option("--pd-tol", pd_tol, "Penalty splitting gap tolerance");
  solve->add_option("--max-iters", solve_max_iters, "Iteration budget");
  solve->add_option("--trace", trace_path, "Write per-iteration rows to this file");

  auto* certify = app.add_subcommand(
      "certify", "Test 0 in the subdifferential at a point and cross-check local minimality");
  std::string cert_problem, cert_point;
  long cert_samples = 1000;
  certify->add_option("problem", cert_problem, "Problem file (JSON)")->required();
  certify->add_option("--point", cert_point, "Point file or 'zero'")->required();
  certify->add_option("--samples", cert_samples, "Sampling budget for the cross-check");

  auto* verify = app.add_subcommand("verify-local", "Sampling-based local minimality check");
  std::string ver_problem, ver_point;
  double ver_radius = 0.1;
  long ver_samples = 1000;
  verify->add_option("problem", ver_problem, "Problem file (JSON)")->required();
  verify->add_option("--point", ver_point, "Point file or 'zero'")->required();
  verify->add_option("--radius", ver_radius, "Ball radius");
  verify->add_option("--samples", ver_samples, "Number of samples");

  auto* rank_demo =
      app.add_subcommand("rank-demo", "Run the 2x2 rank counterexample end to end");
  auto* rank_certify = app.add_subcommand(
      "rank-certify", "Criticality and refutation analysis for a rank problem");
  std::string rank_b, rank_a;
  rank_certify->add_option("B", rank_b, "Target matrix file (JSON)")->required();
  rank_certify->add_option("A", rank_a, "Candidate matrix file (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (enumerate->parsed()) return cmd_enumerate(cfg, enum_problem, max_m);
    if (solve->parsed())
      return cmd_solve(cfg, solve_problem, method, x0_spec, eta, rho0, sigma, rho_max,
                       step_tol, pd_tol, solve_max_iters, trace_path);
    if (certify->parsed()) return cmd_certify(cfg, cert_problem, cert_point, cert_samples);
    if (verify->parsed())
      return cmd_verify_local(cfg, ver_problem, ver_point, ver_radius, ver_samples);
    if (rank_demo->parsed()) return cmd_rank_demo(cfg);
    if (rank_certify->parsed()) return cmd_rank_certify(cfg, rank_b, rank_a);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NotConvergedError& e) {
    std::cerr << "error: " << e.what() << " (residual " << e.residual() << " after "
              << e.iterations() << " iterations)\n";
    return kExitNotConverged;
  }
  return kExitValidation;
}
