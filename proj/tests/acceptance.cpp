// Acceptance run: one [PASS]/[FAIL] line per criterion, exit status 1 if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracle.hpp"
#include "volterra/collocation.hpp"
#include "volterra/linalg.hpp"
#include "volterra/metrics.hpp"
#include "volterra/newton_kantorovich.hpp"
#include "volterra/pc_solver.hpp"
#include "volterra/quadrature.hpp"

using namespace volterra;

namespace {

struct Check {
  bool ok = true;
  std::vector<std::string> notes;

  void expect(bool cond, std::string what) {
    if (!cond) {
      ok = false;
      notes.push_back("FAILED " + std::move(what));
    }
  }
  void note(std::string text) { notes.push_back(std::move(text)); }
};

bool within_factor(double value, double target, double factor) {
  return std::isfinite(value) && value >= target / factor && value <= target * factor;
}

int failures = 0;

void criterion(const char* label, double budget_s, const std::function<void(Check&)>& body) {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_s > 0) c.expect(elapsed < budget_s, fmt::format("runtime {:.2f} s exceeds {:.0f} s", elapsed, budget_s));
  std::printf("[%s] %s (%.2f s)\n", c.ok ? "PASS" : "FAIL", label, elapsed);
  for (const auto& n : c.notes) std::printf("       %s\n", n.c_str());
  if (!c.ok) ++failures;
}

ErrorSummary final_error(const IterationResult& r) { return *r.report.records.back().error; }

void table1(Check& c) {
  const double target[] = {6.80072e-2, 2.36222e-2, 3.95400e-4, 1.80994e-7};
  const std::size_t degrees[] = {2, 3, 5, 8};
  IterationOptions one;
  one.max_iterations = 1;
  double previous = INFINITY;
  for (std::size_t q = 0; q < 4; ++q) {
    const double eps = final_error(iterate(builtin("model01"), InnerMethod::collocation(degrees[q]), one)).aggregate;
    c.note(fmt::format("m={} eps={:.6g} target {:.6g}", degrees[q], eps, target[q]));
    c.expect(within_factor(eps, target[q], 10), fmt::format("m={} outside factor 10", degrees[q]));
    c.expect(eps < previous, fmt::format("m={} not below the previous degree", degrees[q]));
    previous = eps;
  }
}

void table2(Check& c) {
  const double target[] = {3.44752e-2, 9.59747e-5, 4.21286e-8};
  const std::size_t degrees[] = {2, 5, 8};
  IterationOptions one;
  one.max_iterations = 1;
  for (std::size_t q = 0; q < 3; ++q) {
    const ErrorSummary e = final_error(iterate(builtin("model02"), InnerMethod::collocation(degrees[q]), one));
    std::string worst;
    for (std::size_t i = 0; i < e.component_errors.size(); ++i) {
      worst += fmt::format(" eps_{}={:.6g}@t={:.6g}", i + 1, e.component_errors[i], e.worst_points[i]);
    }
    c.note(fmt::format("m={} eps={:.6g} target {:.6g};{}", degrees[q], e.aggregate, target[q], worst));
    c.expect(within_factor(e.aggregate, target[q], 10), fmt::format("m={} outside factor 10", degrees[q]));
    c.expect(e.worst_points.size() == 3, "worst points missing");
  }
}

void table3(Check& c) {
  IterationOptions options;
  options.max_iterations = 10;
  const auto run = [&](std::size_t n) {
    return iterate(builtin("nonlinear-scalar"), InnerMethod::piecewise_constant(n), options);
  };
  const double target[] = {0.0286877, 0.00730057, 0.00386043};
  const std::size_t meshes[] = {32, 128, 512};
  for (std::size_t q = 0; q < 3; ++q) {
    const IterationResult r = run(meshes[q]);
    const double eps = final_error(r).aggregate;
    c.note(fmt::format("N={} eps={:.6g} target {:.6g}, {} iterations ({})", meshes[q], eps, target[q],
                       r.report.records.size(), to_string(r.report.stop)));
    c.expect(within_factor(eps, target[q], 10), fmt::format("N={} outside factor 10", meshes[q]));
    c.expect(r.report.stop == StopReason::Tolerance, fmt::format("N={} did not converge in 10 iterations", meshes[q]));
  }
  std::vector<double> errs;
  for (std::size_t n : {64, 128, 256}) errs.push_back(final_error(run(n)).aggregate);
  for (std::size_t q = 0; q + 1 < errs.size(); ++q) {
    const double ratio = errs[q] / errs[q + 1];
    c.note(fmt::format("err(N)/err(2N) at N={}: {:.4f}", 64 << q, ratio));
    c.expect(ratio >= 1.4 && ratio <= 3.0, "convergence ratio outside [1.4, 3]");
  }
}

void table4(Check& c) {
  const IterationResult r = iterate(builtin("nonlinear-sys1"), InnerMethod::collocation(3));
  const auto& rec = r.report.records;
  c.expect(rec.size() == 20, "expected 20 iterations");
  const double first = rec.front().error->aggregate;
  const double last = rec.back().error->aggregate;
  c.note(fmt::format("iteration 1 eps={:.6g} target 0.446955; iteration {} eps={:.6g}", first, rec.size(), last));
  c.expect(within_factor(first, 0.446955, 10), "first iteration outside factor 10");
  c.expect(last <= 1e-7, "iteration 20 above 1e-7");
}

void table56(Check& c) {
  for (auto [m, bound] : {std::pair<std::size_t, double>{5, 1e-4}, {10, 1e-7}}) {
    const IterationResult r = iterate(builtin("nonlinear-sys2"), InnerMethod::collocation(m));
    const double eps = final_error(r).aggregate;
    c.note(fmt::format("m={} after {} iterations eps={:.6g} (bound {:.0e})", m, r.report.records.size(), eps, bound));
    c.expect(eps <= bound, fmt::format("m={} above bound", m));
  }
}

// --- property suite ---------------------------------------------------------

void midpoint_affine(Check& c) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double worst = 0.0;
  for (int q = 0; q < 200; ++q) {
    const double a = u(rng), b = u(rng), lo = u(rng);
    const double hi = lo + std::abs(u(rng)) + 0.1;
    const double exact = a * (hi - lo) + b * (hi * hi - lo * lo) / 2;
    const double got = composite_midpoint([&](double s) { return a + b * s; }, lo, hi, 1 + q % 17);
    worst = std::max(worst, std::abs(got - exact) / std::max(1.0, std::abs(exact)));
  }
  c.note(fmt::format("midpoint on affine integrands: worst relative error {:.2e}", worst));
  c.expect(worst <= 1e-13, "midpoint not exact on affine integrands");
}

void flattening(Check& c) {
  bool ok = true;
  for (std::size_t m = 1; m <= 12; ++m) {
    std::set<std::size_t> seen;
    for (std::size_t b = 0; b < 4; ++b) {
      for (std::size_t l = 1; l <= m; ++l) {
        const std::size_t idx = flatten(b, l, m);
        const BlockIndex back = unflatten(idx, m);
        ok = ok && idx < 4 * m && back.block == b && back.local == l;
        seen.insert(idx);
      }
    }
    ok = ok && seen.size() == 4 * m;
  }
  c.expect(ok, "flatten/unflatten is not a bijection");
}

void lu_residuals(Check& c) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int q = 0; q < 500; ++q) {
    const std::size_t n = 1 + q % 40;
    DenseMatrix a(n, n);
    std::vector<double> b(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t col = 0; col < n; ++col) a(r, col) = u(rng);
      a(r, r) += static_cast<double>(n);
      b[r] = u(rng);
    }
    const std::vector<double> x = lu_solve(a, b);
    const std::vector<double> ax = a.multiply(x);
    double res = 0.0, xn = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      res = std::max(res, std::abs(ax[r] - b[r]));
      xn = std::max(xn, std::abs(x[r]));
    }
    worst = std::max(worst, res / (a.norm_inf() * xn));
  }
  c.note(fmt::format("LU: worst scaled residual over 500 systems {:.2e}", worst));
  c.expect(worst <= 1e-13, "LU residual too large");
}

void derivatives(Check& c) {
  double worst = 0.0;
  const auto compare = [&](double symbolic, const std::function<double(double)>& f, double at) {
    const double h = 1e-6;
    const double fd = (f(at + h) - f(at - h)) / (2 * h);
    worst = std::max(worst, std::abs(symbolic - fd) / std::max(1.0, std::abs(fd)));
  };
  for (const BuiltinInfo& info : builtin_catalog()) {
    const VolterraSystem sys = builtin(info.name);
    const auto exact = sys.exact_solution();
    for (int p = 1; p < 20; ++p) {
      const double t = sys.horizon() * p / 20.0;
      for (std::size_t i = 0; i < sys.equations(); ++i) {
        compare(sys.rhs_derivative(i).evaluate({.t = t}), [&](double v) { return sys.rhs(i).evaluate({.t = v}); }, t);
        for (std::size_t j = 0; j < sys.bands(); ++j) {
          const std::size_t comp = sys.unknown_of_band(j);
          const double x = exact->value(comp, std::min(t, exact->horizon(comp)));
          compare(sys.nonlinearity_dx(i, j).evaluate({.s = t, .x = x}),
                  [&](double v) { return sys.nonlinearity(i, j).evaluate({.s = t, .x = v}); }, x);
        }
      }
      for (std::size_t j = 1; j < sys.bands(); ++j) {
        compare(sys.curves().derivative(j, t), [&](double v) { return sys.curves().value(j, v); }, t);
      }
    }
  }
  c.note(fmt::format("symbolic vs central difference: worst relative gap {:.2e}", worst));
  c.expect(worst <= 1e-6, "derivative mismatch");
}

void one_step(Check& c) {
  IterationOptions options;
  options.max_iterations = 2;
  options.tolerance = 1e-300;
  for (auto inner : {InnerMethod::collocation(5), InnerMethod::piecewise_constant(64)}) {
    const IterationResult r = iterate(builtin("model01"), inner, options);
    const double second = r.report.records.at(1).correction;
    c.note(fmt::format("model01 {} {}: second correction {:.2e}",
                       inner.kind == InnerKind::Collocation ? "m" : "N", inner.parameter, second));
    c.expect(second <= 1e-10, "linear problem not solved in one step");
  }
}

void start_values(Check& c) {
  double worst = 0.0;
  for (const BuiltinInfo& info : builtin_catalog()) {
    const VolterraSystem sys = builtin(info.name);
    const auto exact = sys.exact_solution();
    const LinearizedSystem lin(sys, exact);
    const std::vector<double> x = lin.initial_values(lin.psi_slope_at_zero(*exact));
    for (std::size_t comp = 0; comp < x.size(); ++comp) worst = std::max(worst, std::abs(x[comp] - exact->value(comp, 0.0)));
  }
  c.note(fmt::format("t = 0 system vs exact x(0): worst {:.2e}", worst));
  c.expect(worst <= 1e-10, "start values differ from the exact solution");
}

void reproduction(Check& c) {
  const VolterraSystem sys = builtin("model01");
  const LinearizedSystem lin(sys, sys.initial_guess());
  constexpr std::size_t panels = 2000;
  const auto rhs = [&](double t) {
    std::vector<double> out(2);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        out[i] += oracle::midpoint(
            [&](double s) { return sys.kernel(i, j).evaluate({.t = t, .s = s}) * (1 - 2 * s + 3 * s * s); },
            oracle::curve(sys, j, t), oracle::curve(sys, j + 1, t), panels);
      }
    }
    return out;
  };
  // Psi'(0) = sum_j K_ij(0,0) (alpha_j'(0) - alpha_{j-1}'(0)) x(0) with x(0) = 1.
  const std::vector<double> slope{1.0, 0.0};
  const PolynomialSolution sol = solve_linear_collocation(lin, rhs, slope, 3, panels);
  const double expected[] = {1.0, -2.0, 3.0, 0.0};
  double worst = 0.0;
  for (std::size_t comp = 0; comp < 2; ++comp) {
    for (std::size_t l = 0; l <= 3; ++l) worst = std::max(worst, std::abs(sol.coefficients(comp)[l] - expected[l]));
  }
  c.note(fmt::format("manufactured 1 - 2t + 3t^2 at m=3: worst coefficient error {:.2e}", worst));
  c.expect(worst <= 1e-8, "polynomial not reproduced");
}

double residual_sup(const VolterraSystem& sys, const Approximation& x) {
  double worst = 0.0;
  for (int p = 1; p <= 40; ++p) {
    const double t = sys.horizon() * p / 40.0;
    worst = std::max(worst, oracle::sup(oracle::residual(sys, x, t, 2000)));
  }
  return worst;
}

void residual_oracle(Check& c) {
  const VolterraSystem sys = builtin("model01");
  // |int K (x~ - x)| <= max|K| * T * max_c eps_c for the linear model.
  double kmax = 0.0;
  for (int a = 0; a <= 40; ++a) {
    for (int b = 0; b <= a; ++b) {
      const double t = sys.horizon() * a / 40.0, s = sys.horizon() * b / 40.0;
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) kmax = std::max(kmax, std::abs(sys.kernel(i, j).evaluate({.t = t, .s = s})));
      }
    }
  }
  IterationOptions one;
  one.max_iterations = 1;
  const double slack = 1e-6;  // 2000-panel quadrature of the oracle itself
  for (std::size_t m : {2, 5, 8}) {
    const IterationResult r = iterate(sys, InnerMethod::collocation(m), one);
    const ErrorSummary e = final_error(r);
    double emax = 0.0;
    for (double v : e.component_errors) emax = std::max(emax, v);
    const double res = residual_sup(sys, *r.solution);
    c.note(fmt::format("collocation m={}: residual {:.3e}, bound {:.3e}", m, res, kmax * sys.horizon() * emax + slack));
    c.expect(res <= kmax * sys.horizon() * emax + slack, fmt::format("m={} residual above error bound", m));
  }
  double previous = INFINITY;
  for (std::size_t n : {32, 64, 128}) {
    const IterationResult r = iterate(sys, InnerMethod::piecewise_constant(n), one);
    const double res = residual_sup(sys, *r.solution);
    c.note(fmt::format("pc N={}: residual {:.3e}", n, res));
    c.expect(res < previous / 1.4, fmt::format("N={} residual not first order", n));
    previous = res;
  }
}

}  // namespace

int main() {
  criterion("1 model01 collocation, m = 2, 3, 5, 8", 5, table1);
  criterion("2 model02 collocation, m = 2, 5, 8", 10, table2);
  criterion("3 nonlinear-scalar NK + piecewise constant", 30, table3);
  criterion("4 nonlinear-sys1 NK + collocation m = 3, far guess", 30, table4);
  criterion("5 nonlinear-sys2 NK + collocation m = 5, 10, near guess", 60, table56);
  criterion("6 property suite", 0, [](Check& c) {
    midpoint_affine(c);
    flattening(c);
    lu_residuals(c);
    derivatives(c);
    one_step(c);
    start_values(c);
    reproduction(c);
    residual_oracle(c);
  });
  return failures == 0 ? 0 : 1;
}
