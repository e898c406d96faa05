#pragma once

#include <string>

#include <json.hpp>

#include "l0scope/certify.hpp"
#include "l0scope/enumerate.hpp"
#include "l0scope/problem.hpp"
#include "l0scope/rank.hpp"
#include "l0scope/solvers.hpp"

namespace l0scope {

using Json = nlohmann::ordered_json;

/// Parses a JSON document; parse failures are rethrown as ValidationError
/// with file:line:column locations.
Json read_json_file(const std::string& path);

/// Problem files look like
///   {"f1": {"Q": [[...]], "c": [...], "d": 0.0}, "g": {"kind": "identity"},
///    "X": {"kind": "box", "lower": [...], "upper": [...]}, "weight": 1.0}
/// f1 may instead carry {"A", "b", "alpha"} for (alpha/2)||Ax-b||^2. Bounds
/// entries accept numbers, null, "inf" or "-inf". "X" defaults to all-space
/// and "weight" to 1. Dimension mismatches fail with field-path diagnostics.
ProblemInstance problem_from_json(const Json& j);
ProblemInstance read_problem_file(const std::string& path);

/// Accepts {"x": [...]} or a bare array.
Vector vector_from_json(const Json& j);
Vector read_vector_file(const std::string& path);

/// Accepts {"matrix": [[...]]} or a bare array of rows.
Matrix matrix_from_json(const Json& j);
Matrix read_matrix_file(const std::string& path);

Json vector_to_json(const Vector& v);
Json matrix_to_json(const Matrix& m);

Json landscape_to_json(const LandscapeReport& report);
LandscapeReport landscape_from_json(const Json& j, int num_components);
std::string landscape_table(const LandscapeReport& report);

Json certificate_to_json(const CriticalityCertificate& cert);
Json sampling_to_json(const SamplingResult& result);
Json theorem_check_to_json(const TheoremCheck& check);
Json trace_summary_to_json(const SolverTrace& trace, const ProblemInstance& p,
                           double zero_tol = kDefaultZeroTol);
/// One row per iterate: k, f, support size. Tab-separated.
std::string trace_rows(const SolverTrace& trace, const ProblemInstance& p,
                       double zero_tol = kDefaultZeroTol);

Json rank_analysis_to_json(const RankPointAnalysis& analysis);
Json contrast_to_json(const ContrastReport& report);

}  // namespace l0scope
