#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "volterra/approximation.hpp"
#include "volterra/linalg.hpp"
#include "volterra/problem.hpp"

namespace volterra {

/// Nodes 0 = t_0 < t_1 < ... < t_N = T.
class Mesh {
 public:
  static Mesh uniform(double horizon, std::size_t intervals);
  static Mesh from_nodes(std::vector<double> nodes);

  std::size_t intervals() const { return nodes_.size() - 1; }
  double horizon() const { return nodes_.back(); }
  double node(std::size_t k) const { return nodes_.at(k); }
  std::span<const double> nodes() const { return nodes_; }
  double max_step() const;

  /// Smallest l >= 1 with v <= t_l, so a node t_l belongs to (t_{l-1}, t_l].
  /// Values within 1e-12 T of a node snap to it.
  std::size_t segment_index(double v) const;
  double snap_tolerance() const { return 1e-12 * horizon(); }

 private:
  explicit Mesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {}
  std::vector<double> nodes_;
};

/// Step values x_c^l on (t_{l-1}, t_l] plus the values at t = 0. Segments a
/// component never reaches (beyond its domain) hold no value.
class PiecewiseConstantSolution final : public Approximation {
 public:
  PiecewiseConstantSolution(Mesh mesh, std::vector<double> start,
                            std::vector<std::vector<double>> steps, std::vector<double> horizons);

  std::size_t components() const override { return start_.size(); }
  double horizon(std::size_t component) const override { return horizons_.at(component); }
  void evaluate(std::size_t component, std::span<const double> t,
                std::span<double> out) const override;
  std::span<const double> breakpoints(std::size_t) const override { return mesh_.nodes(); }

  const Mesh& mesh() const { return mesh_; }
  double start_value(std::size_t component) const { return start_.at(component); }
  /// x_c^l for l in 1..N; NaN when the segment is outside the component's domain.
  double step_value(std::size_t component, std::size_t l) const { return steps_.at(component).at(l - 1); }
  double at(std::size_t component, double t) const;

 private:
  Mesh mesh_;
  std::vector<double> start_;
  std::vector<std::vector<double>> steps_;
  std::vector<double> horizons_;
};

/// Direct discretization of the linearized system with piecewise-constant
/// unknowns. All quadrature weights and per-step factorizations are computed
/// once in the constructor; solve() only substitutes right-hand sides.
class PiecewiseConstantSolver {
 public:
  static constexpr std::size_t kDefaultPanels = 200;

  PiecewiseConstantSolver(const LinearizedSystem& lin, Mesh mesh,
                          std::size_t panels = kDefaultPanels);

  const Mesh& mesh() const { return mesh_; }
  /// Points where the right-hand side is needed: t_1 .. t_N.
  std::span<const double> nodes() const { return mesh_.nodes().subspan(1); }

  /// psi_at_nodes[k-1][i] = Psi_i(t_k); psi_slope[i] = Psi_i'(0).
  PiecewiseConstantSolution solve(const std::vector<std::vector<double>>& psi_at_nodes,
                                  std::span<const double> psi_slope) const;

  /// Hash of every assembled coefficient, for checking that the operator is
  /// not rebuilt between iterations.
  std::uint64_t fingerprint() const;

  struct Pair {
    std::size_t component;
    std::size_t segment;  // 1-based
    auto operator<=>(const Pair&) const = default;
  };
  struct Term {
    Pair pair;
    std::vector<double> weights;  // one per equation
  };
  struct Step {
    std::vector<Pair> unknowns;
    LuFactorization lu;
    std::vector<Term> history;
  };
  std::span<const Step> steps() const { return steps_; }

 private:
  Mesh mesh_;
  std::size_t equations_;
  std::vector<double> horizons_;
  LuFactorization start_;
  std::vector<Step> steps_;
};

std::vector<double> initial_values(const LinearizedSystem& lin);

using RhsFunction = std::function<std::vector<double>(double t)>;

/// One linear solve: rhs(t) gives Psi(t), rhs_slope is Psi'(0).
PiecewiseConstantSolution solve_linear_pc(const LinearizedSystem& lin, const RhsFunction& rhs,
                                          std::span<const double> rhs_slope, std::size_t intervals,
                                          std::size_t panels = PiecewiseConstantSolver::kDefaultPanels);

}  // namespace volterra
