#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "volterra/approximation.hpp"
#include "volterra/curves.hpp"
#include "volterra/expr.hpp"
#include "volterra/linalg.hpp"

namespace volterra {

/// Textual description of a system: what the config loader and the builtin
/// registry produce. Indices are 0-based; `kernels` and `nonlinearities` are
/// indexed [equation][band].
struct SystemSpec {
  std::string name;
  std::string description;
  double horizon = 1.0;
  std::size_t equations = 0;
  std::vector<std::string> curves;  // alpha_1 .. alpha_{bands-1}
  std::vector<std::vector<std::string>> kernels;
  std::vector<std::vector<std::string>> nonlinearities;  // empty entry means "x"
  std::vector<std::string> rhs;
  std::vector<std::size_t> unknown_of_band;  // empty means identity
  std::vector<std::string> exact;            // empty or one per component
  std::vector<std::string> guess;            // empty means zero
};

/// sum_j int_{alpha_{j-1}(t)}^{alpha_j(t)} K_ij(t,s) G_ij(s, x_{u(j)}(s)) ds = f_i(t)
/// for t in [0, T], i = 1..equations.
class VolterraSystem {
 public:
  /// Parses every formula; shape and variable-usage problems raise ConfigError.
  static VolterraSystem from_spec(const SystemSpec& spec);

  const std::string& name() const { return name_; }
  const std::string& description() const { return description_; }
  std::size_t equations() const { return rhs_.size(); }
  std::size_t components() const { return rhs_.size(); }
  std::size_t bands() const { return curves_.bands(); }
  double horizon() const { return curves_.horizon(); }
  const CurveFamily& curves() const { return curves_; }

  const Expression& kernel(std::size_t i, std::size_t j) const { return at(kernels_, i, j).source(); }
  const Expression& nonlinearity(std::size_t i, std::size_t j) const { return at(g_, i, j).source(); }
  const Expression& nonlinearity_dx(std::size_t i, std::size_t j) const { return at(gx_, i, j).source(); }
  const CompiledExpression& compiled_kernel(std::size_t i, std::size_t j) const { return at(kernels_, i, j); }
  const CompiledExpression& compiled_nonlinearity(std::size_t i, std::size_t j) const { return at(g_, i, j); }
  const CompiledExpression& compiled_nonlinearity_dx(std::size_t i, std::size_t j) const { return at(gx_, i, j); }
  /// True when G_ij(s, x) is literally x.
  bool is_identity_nonlinearity(std::size_t i, std::size_t j) const;

  const Expression& rhs(std::size_t i) const { return rhs_.at(i); }
  const Expression& rhs_derivative(std::size_t i) const { return rhs_dt_.at(i); }

  std::size_t unknown_of_band(std::size_t band) const { return band_map_.at(band); }
  std::span<const std::size_t> band_map() const { return band_map_; }
  /// Right end of component c's domain: the largest alpha_{j+1}(T) over bands j mapped to c.
  double component_horizon(std::size_t component) const { return component_horizons_.at(component); }
  std::span<const double> component_horizons() const { return component_horizons_; }

  bool has_exact() const { return !exact_.empty(); }
  const std::vector<Expression>& exact_expressions() const { return exact_; }
  const std::vector<Expression>& guess_expressions() const { return guess_; }
  std::shared_ptr<const Approximation> exact_solution() const;
  std::shared_ptr<const Approximation> initial_guess() const;

 private:
  using Grid = std::vector<std::vector<CompiledExpression>>;
  static const CompiledExpression& at(const Grid& g, std::size_t i, std::size_t j) { return g.at(i).at(j); }

  std::string name_;
  std::string description_;
  CurveFamily curves_;
  Grid kernels_;
  Grid g_;
  Grid gx_;
  std::vector<Expression> rhs_;
  std::vector<Expression> rhs_dt_;
  std::vector<std::size_t> band_map_;
  std::vector<double> component_horizons_;
  std::vector<Expression> exact_;
  std::vector<Expression> guess_;
};

struct Diagnostic {
  std::string condition;  // short identifier, e.g. "rhs-at-zero"
  double t = 0.0;         // witness point
  std::string message;
};

/// Checks the structural conditions of the problem class on a 1000-point
/// sample of [0, T]. An empty result means every check passed.
std::vector<Diagnostic> validate(const VolterraSystem& sys);

struct BuiltinInfo {
  std::string name;
  std::string description;
};
std::vector<BuiltinInfo> builtin_catalog();
SystemSpec builtin_spec(std::string_view name);
VolterraSystem builtin(std::string_view name);

/// Line-oriented `key = value` format; see README for the keys.
SystemSpec parse_config(std::string_view text);
SystemSpec load_config(const std::filesystem::path& path);

/// The system with its Frechet derivative frozen at X0:
///   sum_j int K~_ij(t,s) x_{u(j)}(s) ds = Psi_i(t),
///   K~_ij(t,s) = K_ij(t,s) * G_ij,x(s, x0_{u(j)}(s)).
class LinearizedSystem {
 public:
  LinearizedSystem(VolterraSystem sys, std::shared_ptr<const Approximation> x0);

  const VolterraSystem& system() const { return sys_; }
  const Approximation& initial_guess() const { return *x0_; }
  std::size_t equations() const { return sys_.equations(); }

  /// Frozen kernels of one band for every equation: out[i * s.size() + p] = K~_i,band(t, s[p]).
  void frozen_kernels(std::size_t band, double t, std::span<const double> s,
                      std::span<double> out) const;
  double frozen_kernel(std::size_t i, std::size_t band, double t, double s) const;

  /// Psi_i(t) = f_i(t) + sum_j int K_ij(t,s) [G_x(s, x0(s)) xm(s) - G(s, xm(s))] ds,
  /// with every band segment further split at the iterate's breakpoints.
  std::vector<double> psi(double t, const Approximation& iterate, std::size_t panels) const;
  /// d/dt Psi_i at t = 0.
  std::vector<double> psi_slope_at_zero(const Approximation& iterate) const;

  /// Matrix of the t = 0 system: entry (i, c) sums K~_ij(0,0) (alpha_j'(0) - alpha_{j-1}'(0))
  /// over bands j with u(j) = c.
  DenseMatrix start_matrix() const;
  /// Solves the t = 0 system for x(0).
  std::vector<double> initial_values(std::span<const double> slope) const;

 private:
  VolterraSystem sys_;
  std::shared_ptr<const Approximation> x0_;
  std::vector<bool> band_needs_x0_;     // some G_x in the band depends on x
  std::vector<bool> band_is_linear_;    // every G in the band is x
};

LinearizedSystem linearize(const VolterraSystem& sys, std::shared_ptr<const Approximation> x0);

}  // namespace volterra
