#include "volterra/collocation.hpp"

#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "volterra/error.hpp"
#include "volterra/quadrature.hpp"
#include "volterra/simd.hpp"

namespace volterra {

PolynomialSolution::PolynomialSolution(std::vector<std::vector<double>> coefficients,
                                       std::vector<double> horizons)
    : coefficients_(std::move(coefficients)), horizons_(std::move(horizons)) {
  if (coefficients_.size() != horizons_.size()) throw Error("polynomial solution: component count mismatch");
  for (const auto& a : coefficients_) {
    if (a.empty() || a.size() != coefficients_.front().size()) {
      throw Error("polynomial solution: every component needs the same non-empty coefficient list");
    }
  }
}

void PolynomialSolution::evaluate(std::size_t component, std::span<const double> t,
                                  std::span<double> out) const {
  const std::vector<double>& a = coefficients_.at(component);
  const simd::Kernels& k = simd::active();
  const std::size_t n = t.size();
  k.fill(a.back(), out.data(), n);
  for (std::size_t l = a.size() - 1; l-- > 0;) {
    k.mul(out.data(), t.data(), out.data(), n);
    k.add_scalar(out.data(), a[l], out.data(), n);
  }
}

double eval_poly(std::span<const double> a, double t) {
  if (a.empty()) return 0.0;
  double v = a.back();
  for (std::size_t l = a.size() - 1; l-- > 0;) v = v * t + a[l];
  return v;
}

std::size_t flatten(std::size_t block, std::size_t local, std::size_t degree) {
  if (local < 1 || local > degree) throw Error(fmt::format("index {} outside 1..{}", local, degree));
  return block * degree + local - 1;
}

BlockIndex unflatten(std::size_t index, std::size_t degree) {
  if (degree == 0) throw Error("degree must be positive");
  return BlockIndex{index / degree, index % degree + 1};
}

namespace {

double power_of(double s, std::size_t l) {
  double v = 1.0;
  for (std::size_t q = 0; q < l; ++q) v *= s;
  return v;
}

}  // namespace

double moment(const LinearizedSystem& lin, std::size_t i, std::size_t band, double t,
              std::size_t power, std::size_t panels) {
  const BandSegment seg = decompose(t, lin.system().curves()).segments.at(band);
  if (seg.empty()) return 0.0;
  const MidpointGrid grid = midpoint_grid(seg.lo, seg.hi, panels);
  const std::size_t len = grid.nodes.size();
  std::vector<double> kernel(lin.equations() * len);
  lin.frozen_kernels(band, t, grid.nodes, kernel);
  std::span<double> row = std::span<double>(kernel).subspan(i * len, len);
  for (std::size_t p = 0; p < len; ++p) row[p] *= power_of(grid.nodes[p], power);
  return midpoint_sum(grid, row);
}

CollocationSolver::CollocationSolver(const LinearizedSystem& lin, std::size_t degree,
                                     std::size_t panels)
    : equations_(lin.equations()),
      degree_(degree),
      horizon_(lin.system().horizon()),
      horizons_(lin.system().component_horizons().begin(), lin.system().component_horizons().end()),
      start_([&] {
        try {
          return LuFactorization(lin.start_matrix());
        } catch (const SingularMatrixError& e) {
          throw SingularMatrixError(
              fmt::format("t = 0 system is singular ({}); the coefficients A_0 are not determined",
                          e.what()),
              e.pivot_step());
        }
      }()),
      lu_(DenseMatrix::identity(1)) {
  if (degree_ == 0) throw Error("collocation degree must be at least 1");
  const std::size_t n = equations_;
  const std::size_t m = degree_;
  const VolterraSystem& sys = lin.system();
  const simd::Kernels& kern = simd::active();

  for (std::size_t k = 1; k <= m; ++k) {
    nodes_.push_back(horizon_ * (static_cast<double>(k) / static_cast<double>(m)));
  }
  nodes_.back() = horizon_;

  DenseMatrix c(n * m, n * m);
  zeroth_.assign(n * m * n, 0.0);
  std::vector<double> kernel;
  std::vector<double> scaled;
  std::vector<double> weighted;
  for (std::size_t k = 1; k <= m; ++k) {
    const double t = nodes_[k - 1];
    for (const BandSegment& seg : decompose(t, sys.curves()).segments) {
      if (seg.empty()) continue;
      const std::size_t u = sys.unknown_of_band(seg.band);
      const MidpointGrid grid = midpoint_grid(seg.lo, seg.hi, panels);
      const std::size_t len = grid.nodes.size();
      kernel.resize(n * len);
      lin.frozen_kernels(seg.band, t, grid.nodes, kernel);
      scaled.resize(len);
      weighted.resize(len);
      kern.div_scalar(grid.nodes.data(), horizon_, scaled.data(), len);
      for (std::size_t i = 0; i < n; ++i) {
        const std::span<const double> row(kernel.data() + i * len, len);
        const std::size_t r = flatten(i, k, m);
        zeroth_[r * n + u] += midpoint_sum(grid, row);
        std::copy(row.begin(), row.end(), weighted.begin());
        for (std::size_t l = 1; l <= m; ++l) {
          kern.mul(weighted.data(), scaled.data(), weighted.data(), len);
          c(r, flatten(u, l, m)) += kern.sum(weighted.data(), len) * grid.weight;
        }
      }
    }
  }
  try {
    lu_ = LuFactorization(std::move(c));
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(fmt::format("collocation matrix of degree {} is singular: {}", m, e.what()),
                              e.pivot_step());
  }
  if (m >= kConditionWarningDegree) {
    warnings_.push_back(fmt::format(
        "collocation degree {}: monomial basis is ill-conditioned (condition estimate {:.3g})", m,
        lu_.condition_estimate()));
  }
}

double CollocationSolver::rhs_entry(std::size_t i, std::size_t k, double psi,
                                    std::span<const double> start) const {
  const std::size_t n = equations_;
  const std::size_t r = flatten(i, k, degree_);
  double f = psi;
  for (std::size_t c = 0; c < n; ++c) f -= start[c] * zeroth_[r * n + c];
  return f;
}

PolynomialSolution CollocationSolver::solve(const std::vector<std::vector<double>>& psi_at_nodes,
                                            std::span<const double> psi_slope) const {
  const std::size_t n = equations_;
  const std::size_t m = degree_;
  if (psi_at_nodes.size() != m) {
    throw Error(fmt::format("expected right-hand sides at {} nodes, got {}", m, psi_at_nodes.size()));
  }
  if (psi_slope.size() != n) throw Error("right-hand side slope has the wrong size");
  const std::vector<double> start = start_.solve(psi_slope);

  std::vector<double> f(n * m);
  for (std::size_t k = 1; k <= m; ++k) {
    if (psi_at_nodes[k - 1].size() != n) throw Error("right-hand side has the wrong size");
    for (std::size_t i = 0; i < n; ++i) f[flatten(i, k, m)] = rhs_entry(i, k, psi_at_nodes[k - 1][i], start);
  }
  const std::vector<double> b = lu_.solve(f);

  std::vector<std::vector<double>> coefficients(n, std::vector<double>(m + 1));
  for (std::size_t c = 0; c < n; ++c) {
    coefficients[c][0] = start[c];
    double scale = 1.0;
    for (std::size_t l = 1; l <= m; ++l) {
      scale *= horizon_;
      const double v = b[flatten(c, l, m)] / scale;
      if (!std::isfinite(v)) throw SolverError("collocation produced a non-finite coefficient");
      coefficients[c][l] = v;
    }
  }
  return PolynomialSolution(std::move(coefficients), horizons_);
}

std::uint64_t CollocationSolver::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const auto mix = [&h](double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  };
  for (double v : start_.matrix().entries()) mix(v);
  for (double v : lu_.matrix().entries()) mix(v);
  for (double v : zeroth_) mix(v);
  return h;
}

PolynomialSolution solve_linear_collocation(const LinearizedSystem& lin,
                                            const std::function<std::vector<double>(double)>& rhs,
                                            std::span<const double> rhs_slope, std::size_t degree,
                                            std::size_t panels) {
  const CollocationSolver solver(lin, degree, panels);
  std::vector<std::vector<double>> psi;
  for (double t : solver.nodes()) psi.push_back(rhs(t));
  return solver.solve(psi, rhs_slope);
}

}  // namespace volterra
