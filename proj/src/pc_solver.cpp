#include "volterra/pc_solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "volterra/error.hpp"
#include "volterra/quadrature.hpp"

namespace volterra {

Mesh Mesh::uniform(double horizon, std::size_t intervals) {
  if (intervals == 0) throw Error("mesh needs at least one interval");
  if (!(horizon > 0.0)) throw Error("mesh horizon must be positive");
  std::vector<double> nodes(intervals + 1);
  const double n = static_cast<double>(intervals);
  for (std::size_t k = 0; k <= intervals; ++k) nodes[k] = horizon * (static_cast<double>(k) / n);
  nodes.back() = horizon;
  return Mesh(std::move(nodes));
}

Mesh Mesh::from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 2) throw Error("mesh needs at least two nodes");
  if (nodes.front() != 0.0) throw Error("mesh must start at t = 0");
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    if (!(nodes[k] > nodes[k - 1])) {
      throw Error(fmt::format("mesh nodes must increase strictly (node {} = {} after {})", k,
                              nodes[k], nodes[k - 1]));
    }
  }
  return Mesh(std::move(nodes));
}

double Mesh::max_step() const {
  double h = 0.0;
  for (std::size_t k = 1; k < nodes_.size(); ++k) h = std::max(h, nodes_[k] - nodes_[k - 1]);
  return h;
}

std::size_t Mesh::segment_index(double v) const {
  const double tol = snap_tolerance();
  if (!(v >= -tol && v <= horizon() + tol)) {
    throw Error(fmt::format("point {} outside the mesh [0, {}]", v, horizon()));
  }
  const auto it = std::lower_bound(nodes_.begin() + 1, nodes_.end(), v - tol);
  return std::min<std::size_t>(static_cast<std::size_t>(it - nodes_.begin()), intervals());
}

PiecewiseConstantSolution::PiecewiseConstantSolution(Mesh mesh, std::vector<double> start,
                                                     std::vector<std::vector<double>> steps,
                                                     std::vector<double> horizons)
    : mesh_(std::move(mesh)), start_(std::move(start)), steps_(std::move(steps)),
      horizons_(std::move(horizons)) {
  if (steps_.size() != start_.size() || horizons_.size() != start_.size()) {
    throw Error("piecewise-constant solution: component count mismatch");
  }
  for (const auto& s : steps_) {
    if (s.size() != mesh_.intervals()) throw Error("piecewise-constant solution: one value per segment required");
  }
}

double PiecewiseConstantSolution::at(std::size_t component, double t) const {
  if (t == 0.0) return start_.at(component);
  const std::size_t l = mesh_.segment_index(t);
  const double v = steps_.at(component)[l - 1];
  if (std::isnan(v)) {
    throw Error(fmt::format("component {} has no value on segment {} (t = {})", component + 1, l, t));
  }
  return v;
}

void PiecewiseConstantSolution::evaluate(std::size_t component, std::span<const double> t,
                                         std::span<double> out) const {
  for (std::size_t p = 0; p < t.size(); ++p) out[p] = at(component, t[p]);
}

namespace {

struct Piece {
  std::size_t segment;
  double lo;
  double hi;
};

// Splits (lo, hi] at mesh nodes; pieces shorter than the snap tolerance are dropped.
std::vector<Piece> split_at_nodes(const Mesh& mesh, double lo, double hi) {
  std::vector<Piece> out;
  const double tol = mesh.snap_tolerance();
  const std::size_t first = lo <= tol ? 1 : mesh.segment_index(lo);
  const std::size_t last = mesh.segment_index(hi);
  for (std::size_t q = first; q <= last; ++q) {
    const double a = std::max(lo, mesh.node(q - 1));
    const double b = q < last ? mesh.node(q) : hi;
    if (b - a > tol) out.push_back(Piece{q, a, b});
  }
  return out;
}

void hash_bytes(std::uint64_t& h, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) {
    h ^= (v >> (8 * b)) & 0xffu;
    h *= 0x100000001b3ull;
  }
}

void hash_matrix(std::uint64_t& h, const DenseMatrix& m) {
  for (double v : m.entries()) hash_bytes(h, std::bit_cast<std::uint64_t>(v));
}

}  // namespace

PiecewiseConstantSolver::PiecewiseConstantSolver(const LinearizedSystem& lin, Mesh mesh,
                                                 std::size_t panels)
    : mesh_(std::move(mesh)),
      equations_(lin.equations()),
      horizons_(lin.system().component_horizons().begin(), lin.system().component_horizons().end()),
      start_([&] {
        try {
          return LuFactorization(lin.start_matrix());
        } catch (const SingularMatrixError& e) {
          throw SingularMatrixError(
              fmt::format("t = 0 system is singular ({}); the start values x(0) are not determined",
                          e.what()),
              e.pivot_step());
        }
      }()) {
  const VolterraSystem& sys = lin.system();
  if (std::abs(mesh_.horizon() - sys.horizon()) > mesh_.snap_tolerance()) {
    throw Error(fmt::format("mesh ends at {}, problem horizon is {}", mesh_.horizon(), sys.horizon()));
  }
  const std::size_t n = equations_;
  const std::size_t N = mesh_.intervals();
  std::vector<std::vector<bool>> assigned(n, std::vector<bool>(N, false));
  std::vector<double> kernel;

  steps_.reserve(N);
  for (std::size_t k = 1; k <= N; ++k) {
    const double t = mesh_.node(k);
    const std::size_t step_panels = k == 1 ? 1 : panels;
    std::map<Pair, std::vector<double>> candidates;
    std::vector<Term> history;

    for (const BandSegment& seg : decompose(t, sys.curves()).segments) {
      if (seg.empty()) continue;
      const std::vector<Piece> pieces = split_at_nodes(mesh_, seg.lo, seg.hi);
      if (pieces.empty()) continue;
      const std::size_t c = sys.unknown_of_band(seg.band);
      const std::size_t l = pieces.back().segment;
      for (const Piece& piece : pieces) {
        const MidpointGrid grid = midpoint_grid(piece.lo, piece.hi, step_panels);
        const std::size_t len = grid.nodes.size();
        kernel.resize(n * len);
        lin.frozen_kernels(seg.band, t, grid.nodes, kernel);
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) {
          w[i] = midpoint_sum(grid, std::span<const double>(kernel).subspan(i * len, len));
        }
        const Pair pair{c, piece.segment};
        if (piece.segment == l) {
          auto [it, fresh] = candidates.try_emplace(pair, n, 0.0);
          for (std::size_t i = 0; i < n; ++i) it->second[i] += w[i];
        } else {
          history.push_back(Term{pair, std::move(w)});
        }
      }
    }

    // More leading pairs than equations: values fixed at earlier steps move
    // to the right-hand side, oldest segment first.
    while (candidates.size() > n) {
      auto oldest = candidates.end();
      for (auto it = candidates.begin(); it != candidates.end(); ++it) {
        if (!assigned[it->first.component][it->first.segment - 1]) continue;
        if (oldest == candidates.end() || it->first.segment < oldest->first.segment) oldest = it;
      }
      if (oldest == candidates.end()) break;
      history.push_back(Term{oldest->first, std::move(oldest->second)});
      candidates.erase(oldest);
    }
    if (candidates.size() != n) {
      std::string map;
      for (std::size_t j = 0; j < sys.bands(); ++j) {
        map += fmt::format("{}{}->{}", j ? ", " : "", j + 1, sys.unknown_of_band(j) + 1);
      }
      throw SolverError(fmt::format(
          "step {}: {} unknown step values for {} equations; the step system is not square "
          "(band map {})",
          k, candidates.size(), n, map));
    }
    for (const Term& term : history) {
      if (!assigned[term.pair.component][term.pair.segment - 1]) {
        throw SolverError(fmt::format("step {}: history refers to x_{}^{} before it is computed", k,
                                      term.pair.component + 1, term.pair.segment));
      }
    }

    DenseMatrix m(n, n);
    std::vector<Pair> unknowns;
    std::size_t col = 0;
    for (const auto& [pair, weights] : candidates) {
      for (std::size_t i = 0; i < n; ++i) m(i, col) = weights[i];
      unknowns.push_back(pair);
      assigned[pair.component][pair.segment - 1] = true;
      ++col;
    }
    try {
      steps_.push_back(Step{std::move(unknowns), LuFactorization(std::move(m)), std::move(history)});
    } catch (const SingularMatrixError& e) {
      throw SingularMatrixError(fmt::format("step {} (t = {}): {}", k, t, e.what()), e.pivot_step());
    }
  }
}

PiecewiseConstantSolution PiecewiseConstantSolver::solve(
    const std::vector<std::vector<double>>& psi_at_nodes, std::span<const double> psi_slope) const {
  const std::size_t n = equations_;
  const std::size_t N = mesh_.intervals();
  if (psi_at_nodes.size() != N) {
    throw Error(fmt::format("expected right-hand sides at {} nodes, got {}", N, psi_at_nodes.size()));
  }
  if (psi_slope.size() != n) throw Error("right-hand side slope has the wrong size");

  std::vector<double> start = start_.solve(psi_slope);
  std::vector<std::vector<double>> values(n, std::vector<double>(N, std::numeric_limits<double>::quiet_NaN()));
  std::vector<double> b(n);
  for (std::size_t k = 0; k < N; ++k) {
    const Step& step = steps_[k];
    if (psi_at_nodes[k].size() != n) throw Error("right-hand side has the wrong size");
    std::copy(psi_at_nodes[k].begin(), psi_at_nodes[k].end(), b.begin());
    for (const Term& term : step.history) {
      const double x = values[term.pair.component][term.pair.segment - 1];
      for (std::size_t i = 0; i < n; ++i) b[i] -= term.weights[i] * x;
    }
    const std::vector<double> x = step.lu.solve(b);
    for (std::size_t c = 0; c < n; ++c) {
      if (!std::isfinite(x[c])) {
        throw SolverError(fmt::format("step {}: non-finite step value", k + 1));
      }
      values[step.unknowns[c].component][step.unknowns[c].segment - 1] = x[c];
    }
  }
  return PiecewiseConstantSolution(mesh_, std::move(start), std::move(values), horizons_);
}

std::uint64_t PiecewiseConstantSolver::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  hash_matrix(h, start_.matrix());
  for (const Step& step : steps_) {
    hash_matrix(h, step.lu.matrix());
    for (const Pair& p : step.unknowns) {
      hash_bytes(h, p.component);
      hash_bytes(h, p.segment);
    }
    for (const Term& term : step.history) {
      hash_bytes(h, term.pair.component);
      hash_bytes(h, term.pair.segment);
      for (double w : term.weights) hash_bytes(h, std::bit_cast<std::uint64_t>(w));
    }
  }
  return h;
}

std::vector<double> initial_values(const LinearizedSystem& lin) {
  return lin.initial_values(lin.psi_slope_at_zero(lin.initial_guess()));
}

PiecewiseConstantSolution solve_linear_pc(const LinearizedSystem& lin, const RhsFunction& rhs,
                                          std::span<const double> rhs_slope, std::size_t intervals,
                                          std::size_t panels) {
  const PiecewiseConstantSolver solver(lin, Mesh::uniform(lin.system().horizon(), intervals), panels);
  std::vector<std::vector<double>> psi;
  psi.reserve(intervals);
  for (double t : solver.nodes()) psi.push_back(rhs(t));
  return solver.solve(psi, rhs_slope);
}

}  // namespace volterra
