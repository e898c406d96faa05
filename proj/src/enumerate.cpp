#include "l0scope/enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <thread>

#include "l0scope/errors.hpp"
#include "l0scope/random.hpp"

namespace l0scope {

namespace {

struct SubproblemOutcome {
  std::optional<SubproblemSolution> solution;
  std::string warning;
};

SubproblemOutcome run_one(const ProblemInstance& p, std::uint32_t mask,
                          const EnumerateOptions& opts) {
  const int m = static_cast<int>(p.num_components());
  SubproblemOutcome out;
  try {
    SubproblemSolution s = solve_subproblem(p, Support::from_mask(mask, m), opts.solver);
    if (s.status == SubproblemStatus::Solved) out.solution = std::move(s);
  } catch (const NotConvergedError& e) {
    out.warning = "subproblem mask " + std::to_string(mask) +
                  " not converged (residual " + std::to_string(e.residual()) + ")";
  }
  return out;
}

}  // namespace

LandscapeReport enumerate_landscape(const ProblemInstance& p, const EnumerateOptions& opts) {
  const int m = static_cast<int>(p.num_components());
  if (m > opts.max_components || m > 24)
    throw ValidationError(
        "enumeration over " + std::to_string(m) + " components needs 2^" +
        std::to_string(m) + " subproblems; cap is " +
        std::to_string(std::min(opts.max_components, 24)) +
        " (raise --max-M up to 24, or reduce the model)");

  const std::uint64_t total = std::uint64_t{1} << m;
  std::vector<SubproblemOutcome> outcomes(total);

  // Independent subproblems; results land in a mask-indexed slot so the
  // reduction below is identical no matter how many workers ran.
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (hw > 1 && total >= 4096) {
    const std::uint64_t chunk = (total + hw - 1) / hw;
    std::vector<std::future<void>> futures;
    for (unsigned w = 0; w < hw; ++w) {
      const std::uint64_t lo = w * chunk;
      const std::uint64_t hi = std::min(total, lo + chunk);
      if (lo >= hi) break;
      futures.push_back(std::async(std::launch::async, [&, lo, hi] {
        for (std::uint64_t mask = lo; mask < hi; ++mask)
          outcomes[mask] = run_one(p, static_cast<std::uint32_t>(mask), opts);
      }));
    }
    for (auto& f : futures) f.get();
  } else {
    for (std::uint64_t mask = 0; mask < total; ++mask)
      outcomes[mask] = run_one(p, static_cast<std::uint32_t>(mask), opts);
  }

  LandscapeReport report;
  report.dedup_tol = opts.dedup_tol;
  report.num_subproblems_total = static_cast<long>(total);

  for (std::uint64_t mask = 0; mask < total; ++mask) {
    auto& out = outcomes[mask];
    if (!out.warning.empty()) report.warnings.push_back(out.warning);
    if (!out.solution) continue;
    ++report.num_subproblems_solved;
    SubproblemSolution& s = *out.solution;

    const bool duplicate = std::any_of(
        report.minimizers.begin(), report.minimizers.end(), [&](const LandscapeEntry& e) {
          return (e.x - s.x_star).cwiseAbs().maxCoeff() <= opts.dedup_tol;
        });
    if (duplicate) continue;

    LandscapeEntry entry;
    entry.supp_actual = support_of(p, s.x_star, opts.zero_tol);
    entry.omega_solved = s.omega;
    entry.f_value = evaluate(p, s.x_star, opts.zero_tol, opts.feas_tol);
    entry.kkt_residual = s.kkt_residual;
    entry.x = std::move(s.x_star);
    report.minimizers.push_back(std::move(entry));
  }

  if (!report.minimizers.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < report.minimizers.size(); ++i) {
      const auto& cand = report.minimizers[i];
      const auto& cur = report.minimizers[best];
      const double tie = 1e-12 * (1.0 + std::abs(cur.f_value));
      if (cand.f_value < cur.f_value - tie) {
        best = i;
      } else if (std::abs(cand.f_value - cur.f_value) <= tie &&
                 cand.supp_actual < cur.supp_actual) {
        best = i;
      }
    }
    report.global_min = best;
  }
  return report;
}

SamplingResult verify_local_by_sampling(const ProblemInstance& p, const Vector& xbar,
                                        double radius, long samples, std::uint64_t rng_seed,
                                        double zero_tol, double feas_tol) {
  if (!(radius > 0)) throw ValidationError("sampling radius must be positive");
  if (samples < 1) throw ValidationError("need at least one sample");

  SamplingResult result;
  // The center is a claimed solution whose numerically-zero g components
  // (below zero_tol) count as exact zeros. Sampled points are generic, so
  // they are scored with exact supports; otherwise draws landing inside the
  // zero_tol band would fake a descent of one whole weight.
  result.f_center = evaluate(p, xbar, zero_tol, feas_tol);
  result.samples_drawn = samples;

  Rng rng(rng_seed);
  const Index n = p.dim();
  for (long s = 0; s < samples; ++s) {
    Vector x;
    bool feasible = false;
    // Rejection keeps the draw uniform on the feasible ball; the clamp
    // fallback still yields a valid witness candidate when the feasible
    // slice is too thin to hit.
    for (int attempt = 0; attempt < 64; ++attempt) {
      x = xbar + rng.uniform_in_ball(n, radius);
      if (p.X().contains(x, 0.0)) {
        feasible = true;
        break;
      }
    }
    if (!feasible) x = p.X().project(x);
    const double fx = evaluate(p, x, 0.0, feas_tol);
    if (fx < result.f_center - 1e-10) {
      result.verdict = SamplingVerdict::Refuted;
      result.witness = x;
      result.f_witness = fx;
      result.samples_drawn = s + 1;
      return result;
    }
  }
  result.verdict = SamplingVerdict::NotRefuted;
  return result;
}

}  // namespace l0scope
