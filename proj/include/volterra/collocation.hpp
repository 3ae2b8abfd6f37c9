#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "volterra/approximation.hpp"
#include "volterra/linalg.hpp"
#include "volterra/problem.hpp"

namespace volterra {

/// x_c(t) = sum_l A_{c,l} t^l, l = 0..degree.
class PolynomialSolution final : public Approximation {
 public:
  PolynomialSolution(std::vector<std::vector<double>> coefficients, std::vector<double> horizons);

  std::size_t components() const override { return coefficients_.size(); }
  double horizon(std::size_t component) const override { return horizons_.at(component); }
  void evaluate(std::size_t component, std::span<const double> t,
                std::span<double> out) const override;

  std::size_t degree() const { return coefficients_.empty() ? 0 : coefficients_.front().size() - 1; }
  std::span<const double> coefficients(std::size_t component) const { return coefficients_.at(component); }

 private:
  std::vector<std::vector<double>> coefficients_;
  std::vector<double> horizons_;
};

/// Horner evaluation of sum_l a[l] t^l.
double eval_poly(std::span<const double> a, double t);

/// Row index of (equation i, node k) and column index of (component c,
/// power l) in the flattened collocation system; i, c 0-based, k, l 1-based.
struct BlockIndex {
  std::size_t block;  // equation or component, 0-based
  std::size_t local;  // node or power, 1-based
};
std::size_t flatten(std::size_t block, std::size_t local, std::size_t degree);
BlockIndex unflatten(std::size_t index, std::size_t degree);

/// int over band j at t of K~_ij(t, s) s^power ds.
double moment(const LinearizedSystem& lin, std::size_t i, std::size_t band, double t,
              std::size_t power, std::size_t panels);

/// Collocation at t_k = k T / m, k = 1..m. The matrix is assembled in the
/// scaled basis (s/T)^l once, in the constructor, and factorized.
class CollocationSolver {
 public:
  static constexpr std::size_t kDefaultPanels = 4000;
  static constexpr std::size_t kConditionWarningDegree = 12;

  CollocationSolver(const LinearizedSystem& lin, std::size_t degree,
                    std::size_t panels = kDefaultPanels);

  std::size_t degree() const { return degree_; }
  std::span<const double> nodes() const { return nodes_; }

  /// psi_at_nodes[k-1][i] = Psi_i(t_k); psi_slope[i] = Psi_i'(0).
  PolynomialSolution solve(const std::vector<std::vector<double>>& psi_at_nodes,
                           std::span<const double> psi_slope) const;

  /// F_ik = Psi_i(t_k) - sum_j A_{u(j),0} int K~_ij(t_k, s) ds.
  double rhs_entry(std::size_t i, std::size_t k, double psi, std::span<const double> start) const;

  const DenseMatrix& matrix() const { return lu_.matrix(); }
  double condition_estimate() const { return lu_.condition_estimate(); }
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::uint64_t fingerprint() const;

 private:
  std::size_t equations_;
  std::size_t degree_;
  double horizon_;
  std::vector<double> horizons_;
  std::vector<double> nodes_;
  LuFactorization start_;
  LuFactorization lu_;
  // zeroth_[(i * m + k - 1) * n + c]: int K~ ds over bands mapped to c.
  std::vector<double> zeroth_;
  std::vector<std::string> warnings_;
};

PolynomialSolution solve_linear_collocation(const LinearizedSystem& lin,
                                            const std::function<std::vector<double>(double)>& rhs,
                                            std::span<const double> rhs_slope, std::size_t degree,
                                            std::size_t panels = CollocationSolver::kDefaultPanels);

}  // namespace volterra
