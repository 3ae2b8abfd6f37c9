#include "volterra/newton_kantorovich.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include <fmt/format.h>

#include "volterra/collocation.hpp"
#include "volterra/pc_solver.hpp"

namespace volterra {

namespace {

constexpr double kDivergenceGrowth = 1e3;
constexpr std::size_t kDivergenceWindow = 3;

struct Inner {
  std::vector<double> nodes;
  std::function<std::shared_ptr<const Approximation>(const std::vector<std::vector<double>>&,
                                                     std::span<const double>)>
      solve;
  std::uint64_t fingerprint = 0;
  std::vector<std::string> warnings;
};

Inner make_inner(const LinearizedSystem& lin, InnerMethod method, std::size_t panels) {
  Inner inner;
  if (method.kind == InnerKind::PiecewiseConstant) {
    if (method.parameter < 2) throw Error("piecewise-constant solver needs N >= 2");
    auto solver = std::make_shared<const PiecewiseConstantSolver>(
        lin, Mesh::uniform(lin.system().horizon(), method.parameter), panels);
    inner.nodes.assign(solver->nodes().begin(), solver->nodes().end());
    inner.fingerprint = solver->fingerprint();
    inner.solve = [solver](const auto& psi, std::span<const double> slope) {
      return std::shared_ptr<const Approximation>(
          std::make_shared<PiecewiseConstantSolution>(solver->solve(psi, slope)));
    };
  } else {
    if (method.parameter < 1) throw Error("collocation needs degree m >= 1");
    auto solver = std::make_shared<const CollocationSolver>(lin, method.parameter, panels);
    inner.nodes.assign(solver->nodes().begin(), solver->nodes().end());
    inner.fingerprint = solver->fingerprint();
    inner.warnings = solver->warnings();
    inner.solve = [solver](const auto& psi, std::span<const double> slope) {
      return std::shared_ptr<const Approximation>(
          std::make_shared<PolynomialSolution>(solver->solve(psi, slope)));
    };
  }
  return inner;
}

bool diverging(const std::vector<IterationRecord>& records) {
  if (records.size() <= kDivergenceWindow) return false;
  const std::size_t last = records.size() - 1;
  for (std::size_t q = last - kDivergenceWindow; q < last; ++q) {
    if (!(records[q + 1].correction > records[q].correction)) return false;
  }
  return records[last].correction > kDivergenceGrowth * records[last - kDivergenceWindow].correction;
}

}  // namespace

std::size_t InnerMethod::default_panels() const {
  return kind == InnerKind::PiecewiseConstant ? PiecewiseConstantSolver::kDefaultPanels
                                              : CollocationSolver::kDefaultPanels;
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Tolerance: return "tolerance";
    case StopReason::MaxIterations: return "max-iterations";
    case StopReason::Divergence: return "divergence";
  }
  return "unknown";
}

IterationResult iterate(const VolterraSystem& sys, InnerMethod method, const IterationOptions& options) {
  if (options.max_iterations == 0) throw Error("need at least one iteration");
  if (!(options.tolerance > 0.0)) throw Error("tolerance must be positive");
  const std::size_t panels = options.panels.value_or(method.default_panels());
  if (panels == 0) throw Error("panel count must be positive");

  const LinearizedSystem lin(sys, sys.initial_guess());
  const Inner inner = make_inner(lin, method, panels);
  const auto exact = sys.exact_solution();

  IterationResult result;
  result.report.warnings = inner.warnings;
  std::shared_ptr<const Approximation> current = sys.initial_guess();

  for (std::size_t m = 1; m <= options.max_iterations; ++m) {
    std::vector<std::vector<double>> rhs;
    rhs.reserve(inner.nodes.size());
    for (double t : inner.nodes) rhs.push_back(lin.psi(t, *current, panels));
    const std::vector<double> slope = lin.psi_slope_at_zero(*current);
    std::shared_ptr<const Approximation> next = inner.solve(rhs, slope);

    IterationRecord rec;
    rec.index = m;
    rec.correction = correction_norm(*current, *next, options.samples);
    rec.ratio = result.report.records.empty()
                    ? std::numeric_limits<double>::quiet_NaN()
                    : rec.correction / result.report.records.back().correction;
    if (exact) rec.error = sup_errors(*next, *exact, options.samples);
    rec.operator_fingerprint = inner.fingerprint;
    result.report.records.push_back(rec);
    current = std::move(next);
    result.solution = current;

    if (!std::isfinite(rec.correction) || diverging(result.report.records)) {
      result.report.stop = StopReason::Divergence;
      throw DivergenceError(
          fmt::format("iteration diverged at step {} (correction {:.3g})", m, rec.correction),
          std::move(result.report));
    }
    if (rec.correction <= options.tolerance) {
      result.report.stop = StopReason::Tolerance;
      return result;
    }
  }
  result.report.stop = StopReason::MaxIterations;
  return result;
}

std::vector<double> psi(const VolterraSystem& sys, std::shared_ptr<const Approximation> x0,
                        const Approximation& xm, double t, std::size_t panels) {
  return LinearizedSystem(sys, std::move(x0)).psi(t, xm, panels);
}

}  // namespace volterra
