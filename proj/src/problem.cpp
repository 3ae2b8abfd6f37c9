#include "volterra/problem.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "volterra/error.hpp"

namespace volterra {

CurveFamily::CurveFamily(double horizon, std::vector<Expression> interior)
    : horizon_(horizon), interior_(std::move(interior)) {
  derivatives_.reserve(interior_.size());
  for (const Expression& a : interior_) derivatives_.push_back(simplify(a.derivative(Variable::T)));
}

double CurveFamily::value(std::size_t j, double t) const {
  if (j == 0) return 0.0;
  if (j == bands()) return t;
  return interior_.at(j - 1).evaluate(Bindings{.t = t});
}

double CurveFamily::derivative(std::size_t j, double t) const {
  if (j == 0) return 0.0;
  if (j == bands()) return 1.0;
  return derivatives_.at(j - 1).evaluate(Bindings{.t = t});
}

namespace {

Expression parse_field(const std::string& text, const std::string& key, bool allow_t,
                       bool allow_s, bool allow_x) {
  Expression e;
  try {
    e = parse(text);
  } catch (const ParseError& err) {
    throw ConfigError(fmt::format("{}: {}", key, err.what()));
  }
  const auto reject = [&](Variable v, char name) {
    if (e.uses(v)) throw ConfigError(fmt::format("{}: variable '{}' not allowed in \"{}\"", key, name, text));
  };
  if (!allow_t) reject(Variable::T, 't');
  if (!allow_s) reject(Variable::S, 's');
  if (!allow_x) reject(Variable::X, 'x');
  return e;
}

}  // namespace

VolterraSystem VolterraSystem::from_spec(const SystemSpec& spec) {
  const std::size_t n = spec.equations;
  if (n == 0) throw ConfigError("system needs at least one equation");
  if (!(spec.horizon > 0.0) || !std::isfinite(spec.horizon)) {
    throw ConfigError(fmt::format("horizon T must be positive and finite, got {}", spec.horizon));
  }
  const std::size_t bands = spec.curves.size() + 1;

  VolterraSystem sys;
  sys.name_ = spec.name;
  sys.description_ = spec.description;

  std::vector<Expression> curves;
  for (std::size_t j = 0; j < spec.curves.size(); ++j) {
    curves.push_back(parse_field(spec.curves[j], fmt::format("alpha[{}]", j + 1), true, false, false));
  }
  sys.curves_ = CurveFamily(spec.horizon, std::move(curves));

  if (spec.kernels.size() != n) {
    throw ConfigError(fmt::format("expected kernels for {} equations, got {}", n, spec.kernels.size()));
  }
  if (!spec.nonlinearities.empty() && spec.nonlinearities.size() != n) {
    throw ConfigError(fmt::format("expected nonlinearities for {} equations, got {}", n,
                                  spec.nonlinearities.size()));
  }
  sys.kernels_.resize(n);
  sys.g_.resize(n);
  sys.gx_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.kernels[i].size() != bands) {
      throw ConfigError(fmt::format("equation {} has {} kernels for {} bands", i + 1,
                                    spec.kernels[i].size(), bands));
    }
    for (std::size_t j = 0; j < bands; ++j) {
      const std::string key = fmt::format("[{}][{}]", i + 1, j + 1);
      Expression k = parse_field(spec.kernels[i][j], "K" + key, true, true, false);
      std::string g_text = "x";
      if (!spec.nonlinearities.empty()) {
        if (spec.nonlinearities[i].size() != bands) {
          throw ConfigError(fmt::format("equation {} has {} nonlinearities for {} bands", i + 1,
                                        spec.nonlinearities[i].size(), bands));
        }
        if (!spec.nonlinearities[i][j].empty()) g_text = spec.nonlinearities[i][j];
      }
      Expression g = parse_field(g_text, "G" + key, false, true, true);
      Expression gx = simplify(g.derivative(Variable::X));
      sys.kernels_[i].emplace_back(std::move(k));
      sys.g_[i].emplace_back(std::move(g));
      sys.gx_[i].emplace_back(std::move(gx));
    }
  }

  if (spec.rhs.size() != n) {
    throw ConfigError(fmt::format("expected {} right-hand sides, got {}", n, spec.rhs.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    Expression f = parse_field(spec.rhs[i], fmt::format("f[{}]", i + 1), true, false, false);
    sys.rhs_dt_.push_back(simplify(f.derivative(Variable::T)));
    sys.rhs_.push_back(std::move(f));
  }

  if (spec.unknown_of_band.empty()) {
    if (bands != n) {
      throw ConfigError(fmt::format(
          "{} bands but {} equations: unknown_of_band must map every band to a component", bands, n));
    }
    for (std::size_t j = 0; j < bands; ++j) sys.band_map_.push_back(j);
  } else {
    if (spec.unknown_of_band.size() != bands) {
      throw ConfigError(fmt::format("unknown_of_band has {} entries for {} bands",
                                    spec.unknown_of_band.size(), bands));
    }
    for (std::size_t j = 0; j < bands; ++j) {
      if (spec.unknown_of_band[j] >= n) {
        throw ConfigError(fmt::format("unknown_of_band: band {} maps to component {}, only {} exist",
                                      j + 1, spec.unknown_of_band[j] + 1, n));
      }
    }
    sys.band_map_ = spec.unknown_of_band;
  }

  sys.component_horizons_.assign(n, 0.0);
  for (std::size_t j = 0; j < bands; ++j) {
    double& h = sys.component_horizons_[sys.band_map_[j]];
    h = std::max(h, sys.curves_.value(j + 1, spec.horizon));
  }

  const auto per_component = [&](const std::vector<std::string>& texts, const char* what) {
    std::vector<Expression> out;
    if (texts.empty()) return out;
    if (texts.size() != n) {
      throw ConfigError(fmt::format("expected {} {} expressions, got {}", n, what, texts.size()));
    }
    for (std::size_t c = 0; c < n; ++c) {
      out.push_back(parse_field(texts[c], fmt::format("{}[{}]", what, c + 1), true, false, false));
    }
    return out;
  };
  sys.exact_ = per_component(spec.exact, "exact");
  sys.guess_ = per_component(spec.guess, "guess");
  if (sys.guess_.empty()) sys.guess_.assign(n, Expression::constant(0.0));
  return sys;
}

bool VolterraSystem::is_identity_nonlinearity(std::size_t i, std::size_t j) const {
  const Expression& g = nonlinearity(i, j);
  return g.kind() == Expression::Kind::Variable && g.variable() == Variable::X;
}

std::shared_ptr<const Approximation> VolterraSystem::exact_solution() const {
  if (exact_.empty()) return nullptr;
  return std::make_shared<ExpressionApproximation>(exact_, component_horizons_);
}

std::shared_ptr<const Approximation> VolterraSystem::initial_guess() const {
  return std::make_shared<ExpressionApproximation>(guess_, component_horizons_);
}

namespace {

constexpr double kZeroTolerance = 1e-12;
constexpr double kKernelFloor = 1e-10;
constexpr std::size_t kValidationSamples = 1000;
constexpr std::size_t kDerivativeSamples = 50;
constexpr double kFdStep = 1e-6;
constexpr double kFdTolerance = 1e-6;

std::optional<double> try_eval(const Expression& e, double t, double s, double x) {
  try {
    const double v = e.evaluate(Bindings{.t = t, .s = s, .x = x});
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

class Collector {
 public:
  void add(std::string condition, double t, std::string message) {
    out_.push_back(Diagnostic{std::move(condition), t, std::move(message)});
  }
  std::vector<Diagnostic> take() { return std::move(out_); }

 private:
  std::vector<Diagnostic> out_;
};

// Central-difference check of d/d(var) e against de at one point.
void check_derivative(Collector& diag, const std::string& label, const Expression& e,
                      const Expression& de, Variable var, double t, double s, double x) {
  double tp = t, tm = t, sp = s, sm = s, xp = x, xm = x;
  switch (var) {
    case Variable::T: tp += kFdStep; tm -= kFdStep; break;
    case Variable::S: sp += kFdStep; sm -= kFdStep; break;
    case Variable::X: xp += kFdStep; xm -= kFdStep; break;
  }
  const auto up = try_eval(e, tp, sp, xp);
  const auto down = try_eval(e, tm, sm, xm);
  const auto exact = try_eval(de, t, s, x);
  if (!up || !down || !exact) return;
  const double fd = (*up - *down) / (2.0 * kFdStep);
  if (std::abs(fd - *exact) > kFdTolerance * std::max(1.0, std::abs(*exact))) {
    diag.add("derivative", var == Variable::T ? t : s,
             fmt::format("{}: symbolic derivative {:.10g} vs finite difference {:.10g}", label,
                         *exact, fd));
  }
}

}  // namespace

std::vector<Diagnostic> validate(const VolterraSystem& sys) {
  Collector diag;
  const CurveFamily& curves = sys.curves();
  const double T = sys.horizon();
  const std::size_t bands = sys.bands();
  const std::size_t n = sys.equations();
  const std::vector<double> grid = uniform_samples(T, kValidationSamples);

  for (std::size_t j = 1; j < bands; ++j) {
    const double a0 = curves.value(j, 0.0);
    if (std::abs(a0) > kZeroTolerance) {
      diag.add("curve-at-zero", 0.0, fmt::format("alpha_{}(0) ≠ 0, value {:g}", j, a0));
    }
  }

  // Ordering 0 <= alpha_1 <= ... <= alpha_{n-1} <= t and monotonicity in t.
  for (std::size_t j = 0; j < bands; ++j) {
    bool ordered = true;
    bool monotone = true;
    double previous = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const double t = grid[p];
      const double lo = curves.value(j, t);
      const double hi = curves.value(j + 1, t);
      if (ordered && hi < lo - kZeroTolerance) {
        ordered = false;
        diag.add("curve-order", t,
                 fmt::format("alpha_{}({:g}) = {:g} exceeds alpha_{}({:g}) = {:g}", j, t, lo, j + 1, t, hi));
      }
      if (j + 1 < bands) {
        if (monotone && p > 0 && hi < previous - kZeroTolerance) {
          monotone = false;
          diag.add("curve-monotone", t,
                   fmt::format("alpha_{} decreases at t = {:g}: {:g} after {:g}", j + 1, t, hi, previous));
        }
        previous = hi;
      }
    }
  }

  for (std::size_t j = 0; j < bands; ++j) {
    const double lo = curves.derivative(j, 0.0);
    const double hi = curves.derivative(j + 1, 0.0);
    if (j + 1 < bands && hi >= 1.0) {
      diag.add("curve-slope", 0.0, fmt::format("alpha_{}'(0) = {:g} is not below 1", j + 1, hi));
    } else if (hi < lo) {
      diag.add("curve-slope", 0.0,
               fmt::format("alpha_{}'(0) = {:g} exceeds alpha_{}'(0) = {:g}", j, lo, j + 1, hi));
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto f0 = try_eval(sys.rhs(i), 0.0, 0.0, 0.0);
    if (!f0) {
      diag.add("rhs-at-zero", 0.0, fmt::format("f_{}(0) is undefined", i + 1));
    } else if (std::abs(*f0) > kZeroTolerance) {
      diag.add("rhs-at-zero", 0.0, fmt::format("f_{}(0) ≠ 0, value {:g}", i + 1, *f0));
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Expression& k = sys.kernel(i, bands - 1);
    for (double t : grid) {
      const auto v = try_eval(k, t, t, 0.0);
      if (!v || std::abs(*v) <= kKernelFloor) {
        diag.add("diagonal-kernel", t,
                 fmt::format("K_{}{}(t,t) vanishes at t = {:g}, value {:g}", i + 1, bands, t,
                             v ? *v : std::nan("")));
        break;
      }
    }
  }

  std::vector<bool> hit(n, false);
  for (std::size_t j = 0; j < bands; ++j) hit[sys.unknown_of_band(j)] = true;
  for (std::size_t c = 0; c < n; ++c) {
    if (!hit[c]) {
      diag.add("unknown-map", 0.0, fmt::format("no band maps to component {}", c + 1));
    }
  }

  // Symbolic derivatives against central differences, at interior points.
  const double margin = std::min(1e-3, T / 4.0);
  const std::vector<double> probe = [&] {
    std::vector<double> p = uniform_samples(T - 2.0 * margin, kDerivativeSamples);
    for (double& v : p) v += margin;
    return p;
  }();
  for (std::size_t i = 0; i < n; ++i) {
    for (double t : probe) {
      check_derivative(diag, fmt::format("f_{}'", i + 1), sys.rhs(i), sys.rhs_derivative(i),
                       Variable::T, t, 0.0, 0.0);
    }
  }
  for (std::size_t j = 0; j < curves.interior().size(); ++j) {
    for (double t : probe) {
      check_derivative(diag, fmt::format("alpha_{}'", j + 1), curves.interior()[j],
                       curves.interior_derivatives()[j], Variable::T, t, 0.0, 0.0);
    }
  }
  const auto guess = sys.initial_guess();
  const auto exact = sys.exact_solution();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < bands; ++j) {
      const std::size_t c = sys.unknown_of_band(j);
      const std::string label = fmt::format("G_{}{},x", i + 1, j + 1);
      for (double s : probe) {
        const double g = guess->value(c, std::min(s, sys.component_horizon(c)));
        check_derivative(diag, label, sys.nonlinearity(i, j), sys.nonlinearity_dx(i, j),
                         Variable::X, 0.0, s, g);
        if (exact) {
          const double x = exact->value(c, std::min(s, sys.component_horizon(c)));
          check_derivative(diag, label, sys.nonlinearity(i, j), sys.nonlinearity_dx(i, j),
                           Variable::X, 0.0, s, x);
        }
      }
    }
  }
  return diag.take();
}

}  // namespace volterra
