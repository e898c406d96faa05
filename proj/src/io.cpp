#include "l0scope/io.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace l0scope {

namespace {

[[noreturn]] void fail(const std::string& message, const std::string& where) {
  throw ValidationError(message, where);
}

double number_from(const Json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  if (j.is_null()) fail("expected a number", where);
  fail("expected a number, got " + std::string(j.type_name()), where);
}

// Infinities are not valid JSON numbers; encode them as strings.
Json number_to(double v) {
  if (std::isfinite(v)) return v;
  if (v > 0) return "inf";
  if (v < 0) return "-inf";
  return "nan";
}

Vector vector_from(const Json& j, const std::string& where) {
  if (!j.is_array()) fail("expected an array", where);
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Index>(i)] = number_from(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

Matrix matrix_from(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail("expected a nonempty array of rows", where);
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) fail("rows must be nonempty arrays", where);
  Matrix m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array()) fail("expected an array row", rw);
    if (j[r].size() != cols)
      fail("row has " + std::to_string(j[r].size()) + " entries, expected " +
               std::to_string(cols),
           rw);
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) =
          number_from(j[r][c], rw + "[" + std::to_string(c) + "]");
  }
  return m;
}

Vector bound_from(const Json& j, Index n, double missing, const std::string& where) {
  if (j.is_null()) return Vector::Constant(n, missing);
  if (!j.is_array()) fail("expected an array of bounds", where);
  if (static_cast<Index>(j.size()) != n)
    fail("expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()),
         where);
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    const Json& e = j[static_cast<std::size_t>(i)];
    v[i] = e.is_null() ? missing : number_from(e, where + "[" + std::to_string(i) + "]");
  }
  return v;
}

Json support_to_json(const Support& s) {
  Json arr = Json::array();
  for (int i : s.indices()) arr.push_back(i);
  return arr;
}

Support support_from_json(const Json& j, int ground_size, const std::string& where) {
  if (!j.is_array()) fail("expected an index array", where);
  std::vector<int> idx;
  for (const auto& e : j) idx.push_back(e.get<int>());
  return Support(std::move(idx), ground_size);
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open file", path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Translate the byte offset into line:column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(e.what(), path + ":" + std::to_string(line) + ":" + std::to_string(col));
  }
}

ProblemInstance problem_from_json(const Json& j) {
  if (!j.is_object()) fail("problem file must be a JSON object", "$");
  if (!j.contains("f1")) fail("missing field", "f1");
  const Json& jf = j["f1"];

  auto build_f1 = [&]() -> QuadraticTerm {
    if (jf.contains("Q")) {
      Matrix Q = matrix_from(jf["Q"], "f1.Q");
      Vector c = jf.contains("c") ? vector_from(jf["c"], "f1.c") : Vector::Zero(Q.rows());
      const double d = jf.contains("d") ? number_from(jf["d"], "f1.d") : 0.0;
      if (c.size() != Q.rows()) fail("c length does not match Q", "f1.c");
      return QuadraticTerm(std::move(Q), std::move(c), d);
    }
    if (jf.contains("A")) {
      Matrix A = matrix_from(jf["A"], "f1.A");
      Vector b = vector_from(jf.contains("b") ? jf["b"] : Json(), "f1.b");
      const double alpha = jf.contains("alpha") ? number_from(jf["alpha"], "f1.alpha") : 1.0;
      if (b.size() != A.rows()) fail("b length does not match the rows of A", "f1.b");
      return QuadraticTerm::least_squares(A, b, alpha);
    }
    fail("f1 needs either Q (+c, d) or A, b, alpha", "f1");
  };
  QuadraticTerm f1 = build_f1();
  const Index n = f1.dim();

  if (!j.contains("g")) fail("missing field", "g");
  const Json& jg = j["g"];
  const std::string kind = jg.contains("kind") ? jg["kind"].get<std::string>() : "identity";
  auto build_g = [&]() -> LinearMap {
    if (kind == "identity") return LinearMap::identity(n);
    if (kind == "forward-difference") return LinearMap::forward_difference(n);
    if (kind == "custom") {
      if (!jg.contains("G")) fail("custom map needs G", "g.G");
      return LinearMap::custom(matrix_from(jg["G"], "g.G"));
    }
    fail("unknown kind '" + kind + "' (identity | forward-difference | custom)", "g.kind");
  };
  LinearMap g = build_g();
  if (g.cols() != n) fail("G has " + std::to_string(g.cols()) + " columns, expected " +
                              std::to_string(n),
                          "g.G");

  auto build_x = [&]() -> ConstraintSet {
    if (!j.contains("X")) return ConstraintSet::all_space(n);
    const Json& jx = j["X"];
    const std::string xkind =
        jx.contains("kind") ? jx["kind"].get<std::string>() : "all-space";
    if (xkind == "all-space") return ConstraintSet::all_space(n);
    if (xkind == "box") {
      Vector lo = bound_from(jx.contains("lower") ? jx["lower"] : Json(), n, -kInf, "X.lower");
      Vector hi = bound_from(jx.contains("upper") ? jx["upper"] : Json(), n, kInf, "X.upper");
      return ConstraintSet::box(std::move(lo), std::move(hi));
    }
    fail("unknown kind '" + xkind + "' (all-space | box)", "X.kind");
  };
  ConstraintSet X = build_x();

  const double weight = j.contains("weight") ? number_from(j["weight"], "weight") : 1.0;
  return ProblemInstance(std::move(f1), std::move(g), std::move(X), weight);
}

ProblemInstance read_problem_file(const std::string& path) {
  return problem_from_json(read_json_file(path));
}

Vector vector_from_json(const Json& j) {
  if (j.is_object() && j.contains("x")) return vector_from(j["x"], "x");
  return vector_from(j, "$");
}

Vector read_vector_file(const std::string& path) {
  return vector_from_json(read_json_file(path));
}

Matrix matrix_from_json(const Json& j) {
  if (j.is_object() && j.contains("matrix")) return matrix_from(j["matrix"], "matrix");
  return matrix_from(j, "$");
}

Matrix read_matrix_file(const std::string& path) {
  return matrix_from_json(read_json_file(path));
}

Json vector_to_json(const Vector& v) {
  Json arr = Json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(number_to(v[i]));
  return arr;
}

Json matrix_to_json(const Matrix& m) {
  Json arr = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(number_to(m(r, c)));
    arr.push_back(std::move(row));
  }
  return arr;
}

Json landscape_to_json(const LandscapeReport& report) {
  Json j;
  j["dedup_tol"] = report.dedup_tol;
  j["num_subproblems_total"] = report.num_subproblems_total;
  j["num_subproblems_solved"] = report.num_subproblems_solved;
  j["global_min"] = report.global_min;
  Json entries = Json::array();
  for (const auto& e : report.minimizers) {
    Json je;
    je["x"] = vector_to_json(e.x);
    je["omega_solved"] = support_to_json(e.omega_solved);
    je["supp_actual"] = support_to_json(e.supp_actual);
    je["f_value"] = number_to(e.f_value);
    je["kkt_residual"] = number_to(e.kkt_residual);
    entries.push_back(std::move(je));
  }
  j["minimizers"] = std::move(entries);
  j["warnings"] = report.warnings;
  return j;
}

LandscapeReport landscape_from_json(const Json& j, int num_components) {
  LandscapeReport report;
  report.dedup_tol = number_from(j.at("dedup_tol"), "dedup_tol");
  report.num_subproblems_total = j.at("num_subproblems_total").get<long>();
  report.num_subproblems_solved = j.at("num_subproblems_solved").get<long>();
  report.global_min = j.at("global_min").get<std::size_t>();
  for (const auto& je : j.at("minimizers")) {
    LandscapeEntry e;
    e.x = vector_from(je.at("x"), "minimizers.x");
    e.omega_solved = support_from_json(je.at("omega_solved"), num_components, "omega_solved");
    e.supp_actual = support_from_json(je.at("supp_actual"), num_components, "supp_actual");
    e.f_value = number_from(je.at("f_value"), "f_value");
    e.kkt_residual = number_from(je.at("kkt_residual"), "kkt_residual");
    report.minimizers.push_back(std::move(e));
  }
  if (j.contains("warnings"))
    report.warnings = j["warnings"].get<std::vector<std::string>>();
  return report;
}

namespace {

std::string format_support(const Support& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.indices().size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s.indices()[i]);
  }
  return out + "}";
}

std::string format_vector(const Vector& v) {
  std::ostringstream os;
  os << "(";
  for (Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << std::setprecision(10) << v[i];
  }
  os << ")";
  return os.str();
}

}  // namespace

std::string landscape_table(const LandscapeReport& report) {
  std::vector<std::array<std::string, 4>> rows;
  rows.push_back({"", "support", "x", "f"});
  for (std::size_t i = 0; i < report.minimizers.size(); ++i) {
    const auto& e = report.minimizers[i];
    std::ostringstream f;
    f << std::setprecision(12) << e.f_value;
    rows.push_back({i == report.global_min ? "*" : " ", format_support(e.supp_actual),
                    format_vector(e.x), f.str()});
  }
  std::array<std::size_t, 4> width = {0, 0, 0, 0};
  for (const auto& r : rows)
    for (int c = 0; c < 4; ++c) width[c] = std::max(width[c], r[c].size());
  std::ostringstream os;
  for (const auto& r : rows) {
    for (int c = 0; c < 4; ++c)
      os << std::left << std::setw(static_cast<int>(width[c]) + 2) << r[c];
    os << "\n";
  }
  os << report.minimizers.size() << " minimizer(s) from " << report.num_subproblems_solved
     << "/" << report.num_subproblems_total << " solved subproblems; * = global minimum\n";
  return os.str();
}

Json certificate_to_json(const CriticalityCertificate& cert) {
  Json j;
  j["x"] = vector_to_json(cert.xbar);
  j["omega_bar"] = support_to_json(cert.omega_bar);
  j["lambda"] = vector_to_json(cert.lambda);
  j["nu"] = vector_to_json(cert.nu);
  j["residual"] = number_to(cert.residual);
  j["grad_norm"] = number_to(cert.grad_norm);
  j["feasible"] = cert.feasible;
  j["verdict"] = cert.verdict == Verdict::Critical ? "critical" : "not-critical";
  return j;
}

Json sampling_to_json(const SamplingResult& result) {
  Json j;
  j["verdict"] = result.verdict == SamplingVerdict::Refuted ? "refuted" : "not-refuted";
  j["f_center"] = number_to(result.f_center);
  j["samples_drawn"] = result.samples_drawn;
  if (result.verdict == SamplingVerdict::Refuted) {
    j["witness"] = vector_to_json(result.witness);
    j["f_witness"] = number_to(result.f_witness);
  }
  return j;
}

namespace {

std::string status_name(SubproblemStatus s) {
  switch (s) {
    case SubproblemStatus::Solved:
      return "solved";
    case SubproblemStatus::UnboundedBelow:
      return "unbounded-below";
    case SubproblemStatus::Infeasible:
      return "infeasible";
  }
  return "?";
}

}  // namespace

Json theorem_check_to_json(const TheoremCheck& check) {
  Json j;
  j["subproblem_status"] = status_name(check.subproblem_status);
  j["f1_at_point"] = number_to(check.f1_at_point);
  j["f1_star"] = number_to(check.f1_star);
  j["f1_gap"] = number_to(check.f1_gap);
  j["solves_subproblem"] = check.solves_subproblem;
  j["sampling"] = sampling_to_json(check.sampling);
  j["radius_used"] = number_to(check.radius_used);
  j["consistent"] = check.consistent;
  return j;
}

Json trace_summary_to_json(const SolverTrace& trace, const ProblemInstance& p,
                           double zero_tol) {
  Json j;
  j["method"] = trace.method == SolveMethod::Iht ? "iht" : "pd";
  j["converged"] = trace.converged;
  switch (trace.stop_reason) {
    case StopReason::Tolerance:
      j["stop_reason"] = "tolerance";
      break;
    case StopReason::MaxIters:
      j["stop_reason"] = "max_iters";
      break;
    case StopReason::Stagnation:
      j["stop_reason"] = "stagnation";
      break;
  }
  j["iterations"] = trace.iterates.empty() ? 0 : trace.iterates.back().k;
  j["final"] = vector_to_json(trace.final);
  j["f_final"] = number_to(evaluate(p, trace.final, zero_tol));
  j["support"] = support_to_json(support_of(p, trace.final, zero_tol));
  return j;
}

std::string trace_rows(const SolverTrace& trace, const ProblemInstance& p, double zero_tol) {
  std::ostringstream os;
  os << "k\tf\tsupport_size\n";
  for (const auto& pt : trace.iterates) {
    os << pt.k << "\t" << std::setprecision(17) << pt.f << "\t"
       << support_of(p, pt.x, zero_tol).size() << "\n";
  }
  return os.str();
}

Json rank_analysis_to_json(const RankPointAnalysis& analysis) {
  Json j;
  j["rank"] = analysis.numerical_rank;
  j["singular_values"] = vector_to_json(analysis.singular_values);
  j["critical"] = analysis.critical;
  j["criticality_residual"] = number_to(analysis.criticality_residual);
  if (analysis.refutation) {
    const auto& r = *analysis.refutation;
    Json jr;
    jr["kind"] = r.kind;
    jr["epsilon"] = r.epsilon;
    jr["a_eps"] = matrix_to_json(r.a_eps);
    jr["f_decrease"] = number_to(r.f_decrease);
    if (r.pair_index >= 0) jr["pair_index"] = r.pair_index;
    j["refutation"] = std::move(jr);
  } else {
    j["refutation"] = nullptr;
  }
  return j;
}

Json contrast_to_json(const ContrastReport& report) {
  Json j;
  j["matrix"] = rank_analysis_to_json(report.matrix_side);
  j["matrix_refuted"] = report.matrix_refuted;
  j["matrix_implication_held"] = report.matrix_implication_held;
  j["vector_analogue"]["certificate"] = certificate_to_json(report.vector_certificate);
  if (report.vector_check)
    j["vector_analogue"]["theorem_check"] = theorem_check_to_json(*report.vector_check);
  return j;
}

}  // namespace l0scope
