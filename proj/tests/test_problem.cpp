#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracle.hpp"
#include "volterra/error.hpp"
#include "volterra/pc_solver.hpp"
#include "volterra/problem.hpp"

using namespace volterra;

namespace {

bool has_condition(const std::vector<Diagnostic>& diags, const std::string& condition) {
  for (const Diagnostic& d : diags) {
    if (d.condition == condition) return true;
  }
  return false;
}

std::shared_ptr<const Approximation> expressions(const VolterraSystem& sys, std::vector<std::string> texts) {
  std::vector<Expression> e;
  for (const std::string& t : texts) e.push_back(parse(t));
  return std::make_shared<ExpressionApproximation>(
      e, std::vector<double>(sys.component_horizons().begin(), sys.component_horizons().end()));
}

const char* kModel01Config = R"(# two equations, two bands
name = m01-config
n = 2
T = 2
alpha[1] = t/2
K[1][1] = 1+t+s
K[1][2] = 1
K[2][1] = 1+t-s
K[2][2] = -1
f[1] = 3*t*sin(t/2)/2 + sin(t/2) + 2*cos(t/2) - cos(t) - 1
f[2] = "t*sin(t/2)/2 + sin(t/2) - 2*cos(t/2) + cos(t) + 1"
exact[1] = cos(t)
exact[2] = sin(t)
)";

}  // namespace

TEST_SUITE("problem") {
  TEST_CASE("builtin registry") {
    const auto catalog = builtin_catalog();
    CHECK(catalog.size() == 5);
    const VolterraSystem m1 = builtin("model01");
    CHECK(m1.equations() == 2);
    CHECK(m1.horizon() == 2.0);
    CHECK(builtin("model02").equations() == 3);
    const VolterraSystem sc = builtin("nonlinear-scalar");
    CHECK(sc.components() == 1);
    CHECK(sc.bands() == 2);
    CHECK(sc.unknown_of_band(0) == 0);
    CHECK(sc.unknown_of_band(1) == 0);
    CHECK(sc.horizon() == 1.0);
    CHECK_THROWS_AS(builtin("model03"), ConfigError);
  }

  TEST_CASE("only the scalar example shares an unknown between bands") {
    for (const BuiltinInfo& info : builtin_catalog()) {
      const VolterraSystem sys = builtin(info.name);
      bool identity = sys.bands() == sys.components();
      for (std::size_t j = 0; identity && j < sys.bands(); ++j) identity = sys.unknown_of_band(j) == j;
      CHECK_MESSAGE(identity == (info.name != "nonlinear-scalar"), info.name);
    }
  }

  TEST_CASE("builtins validate cleanly") {
    for (const BuiltinInfo& info : builtin_catalog()) {
      const auto diags = validate(builtin(info.name));
      for (const Diagnostic& d : diags) MESSAGE(info.name, ": ", d.message);
      CHECK(diags.empty());
    }
  }

  TEST_CASE("exact solutions satisfy the builtin equations") {
    for (const BuiltinInfo& info : builtin_catalog()) {
      const VolterraSystem sys = builtin(info.name);
      const auto exact = sys.exact_solution();
      for (int p = 1; p <= 10; ++p) {
        const double t = sys.horizon() * p / 10.0;
        const auto r = oracle::residual(sys, *exact, t, 2000);
        CHECK_MESSAGE(oracle::sup(r) <= 1e-6, info.name, " t=", t);
      }
    }
  }

  TEST_CASE("validation diagnostics") {
    SystemSpec bad_rhs = builtin_spec("model01");
    bad_rhs.rhs[0] = "1+t";
    const auto d1 = validate(VolterraSystem::from_spec(bad_rhs));
    REQUIRE(d1.size() >= 1);
    CHECK(d1[0].message == "f_1(0) ≠ 0, value 1");

    SystemSpec swapped = builtin_spec("model02");
    swapped.curves = {"t", "t/2"};
    const auto d2 = validate(VolterraSystem::from_spec(swapped));
    CHECK(has_condition(d2, "curve-order"));

    SystemSpec steep = builtin_spec("model01");
    steep.curves = {"t"};
    CHECK(has_condition(validate(VolterraSystem::from_spec(steep)), "curve-slope"));

    SystemSpec offset = builtin_spec("model01");
    offset.curves = {"t/2+0.1"};
    CHECK(has_condition(validate(VolterraSystem::from_spec(offset)), "curve-at-zero"));

    SystemSpec vanishing = builtin_spec("model01");
    vanishing.kernels[1][1] = "t";
    CHECK(has_condition(validate(VolterraSystem::from_spec(vanishing)), "diagonal-kernel"));

    SystemSpec unused = builtin_spec("model02");
    unused.unknown_of_band = {0, 0, 1};
    CHECK(has_condition(validate(VolterraSystem::from_spec(unused)), "unknown-map"));
  }

  TEST_CASE("shape errors in system descriptions") {
    SystemSpec s = builtin_spec("model01");
    s.kernels[0].pop_back();
    CHECK_THROWS_AS(VolterraSystem::from_spec(s), ConfigError);
    s = builtin_spec("model01");
    s.rhs[0] = "s+1";
    CHECK_THROWS_WITH_AS(VolterraSystem::from_spec(s), doctest::Contains("f[1]"), ConfigError);
    s = builtin_spec("model01");
    s.kernels[0][0] = "1+x";
    CHECK_THROWS_AS(VolterraSystem::from_spec(s), ConfigError);
    s = builtin_spec("model01");
    s.curves.push_back("2*t/3");
    CHECK_THROWS_AS(VolterraSystem::from_spec(s), ConfigError);
    s = builtin_spec("model01");
    s.rhs[1] = "sin(";
    CHECK_THROWS_WITH_AS(VolterraSystem::from_spec(s), doctest::Contains("f[2]"), ConfigError);
  }

  TEST_CASE("component domains follow the band map") {
    const VolterraSystem m1 = builtin("model01");
    CHECK(m1.component_horizon(0) == 1.0);
    CHECK(m1.component_horizon(1) == 2.0);
    CHECK(builtin("nonlinear-scalar").component_horizon(0) == 1.0);
  }

  TEST_CASE("linear nonlinearities leave Psi equal to f") {
    const VolterraSystem sys = builtin("model01");
    const LinearizedSystem lin(sys, sys.initial_guess());
    const auto iterate = expressions(sys, {"exp(t)-3*t^2", "cos(5*t)"});
    for (int p = 0; p < 20; ++p) {
      const double t = 2.0 * p / 19.0;
      const auto psi = lin.psi(t, *iterate, 200);
      for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(psi[i] - sys.rhs(i).evaluate({.t = t})) <= 1e-10);
        for (double s : {0.0, t / 3, t / 2}) {
          const std::size_t band = s <= t / 2 ? 0 : 1;
          CHECK(lin.frozen_kernel(i, band, t, s) == sys.kernel(i, band).evaluate({.t = t, .s = s}));
        }
      }
    }
    CHECK(lin.psi(0.0, *iterate, 200) == std::vector<double>{0.0, 0.0});
  }

  TEST_CASE("frozen kernel multiplies by G_x along the initial guess") {
    const VolterraSystem sys = builtin("nonlinear-scalar");
    const LinearizedSystem lin(sys, expressions(sys, {"t^2"}));
    for (double t : {0.2, 0.7, 1.0}) {
      std::vector<double> s{0.0, 0.05, t / 4, t / 2};
      std::vector<double> out(s.size());
      lin.frozen_kernels(0, t, s, out);
      for (std::size_t p = 0; p < s.size(); ++p) {
        const double expected = (1 + t + s[p]) * (1 + 2 * s[p] * s[p]);
        CHECK(out[p] == doctest::Approx(expected).epsilon(1e-15));
        CHECK(lin.frozen_kernel(0, 0, t, s[p]) == doctest::Approx(expected).epsilon(1e-15));
      }
    }
  }

  TEST_CASE("Psi matches brute-force quadrature") {
    // Single band, G = x^2: the bracket at X^m = X^0 is (x0)^2.
    SystemSpec sq;
    sq.name = "square";
    sq.horizon = 1.0;
    sq.equations = 1;
    sq.kernels = {{"1+t*s"}};
    sq.nonlinearities = {{"x^2"}};
    sq.rhs = {"t"};
    sq.guess = {"1+t"};
    const VolterraSystem sys = VolterraSystem::from_spec(sq);
    const LinearizedSystem lin(sys, sys.initial_guess());
    for (int p = 1; p <= 10; ++p) {
      const double t = p / 10.0;
      const double expected =
          t + oracle::midpoint([t](double s) { return (1 + t * s) * (1 + s) * (1 + s); }, 0.0, t, 2000);
      CHECK(lin.psi(t, lin.initial_guess(), 2000)[0] == doctest::Approx(expected).epsilon(1e-12));
    }

    // Two bands, nonlinear in every entry, iterate different from the guess.
    const VolterraSystem s1 = builtin("nonlinear-sys1");
    const LinearizedSystem lin1(s1, s1.initial_guess());
    const auto xm = expressions(s1, {"0.8*t^2+0.1*t", "t^3-0.2*t^2"});
    for (int p = 1; p <= 10; ++p) {
      const double t = p / 10.0;
      const auto got = lin1.psi(t, *xm, 2000);
      for (std::size_t i = 0; i < 2; ++i) {
        double expected = s1.rhs(i).evaluate({.t = t});
        for (std::size_t j = 0; j < 2; ++j) {
          const auto integrand = [&](double s) {
            const double x0 = s1.guess_expressions()[j].evaluate({.t = s});
            const double x = xm->value(j, s);
            return s1.kernel(i, j).evaluate({.t = t, .s = s}) *
                   (s1.nonlinearity_dx(i, j).evaluate({.s = s, .x = x0}) * x -
                    s1.nonlinearity(i, j).evaluate({.s = s, .x = x}));
          };
          expected += oracle::midpoint(integrand, oracle::curve(s1, j, t), oracle::curve(s1, j + 1, t), 2000);
        }
        CHECK(got[i] == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("Psi slope at zero matches a one-sided difference") {
    for (const char* name : {"nonlinear-sys1", "nonlinear-sys2", "nonlinear-scalar"}) {
      const VolterraSystem sys = builtin(name);
      const LinearizedSystem lin(sys, sys.initial_guess());
      const auto xm = sys.exact_solution();
      const auto slope = lin.psi_slope_at_zero(*xm);
      const double h = 1e-5;
      const auto up = lin.psi(h, *xm, 400);
      for (std::size_t i = 0; i < sys.equations(); ++i) CHECK(std::abs(up[i] / h - slope[i]) <= 1e-4);
    }
  }

  TEST_CASE("start values") {
    const VolterraSystem m1 = builtin("model01");
    const auto x1 = initial_values(LinearizedSystem(m1, m1.initial_guess()));
    CHECK(x1[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(x1[1]) <= 1e-14);

    const VolterraSystem m2 = builtin("model02");
    const auto x2 = initial_values(LinearizedSystem(m2, m2.initial_guess()));
    CHECK(x2[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(x2[1]) <= 1e-14);
    CHECK(std::abs(x2[2]) <= 1e-14);

    // Zero slopes give zero start values.
    const LinearizedSystem lin(m2, m2.initial_guess());
    CHECK(lin.initial_values(std::vector<double>{0, 0, 0}) == std::vector<double>{0, 0, 0});
  }

  TEST_CASE("t = 0 system reproduces the exact start values of every builtin") {
    for (const BuiltinInfo& info : builtin_catalog()) {
      const VolterraSystem sys = builtin(info.name);
      const auto exact = sys.exact_solution();
      const LinearizedSystem lin(sys, exact);
      const auto x0 = lin.initial_values(lin.psi_slope_at_zero(*exact));
      for (std::size_t c = 0; c < sys.components(); ++c) {
        CHECK_MESSAGE(std::abs(x0[c] - exact->value(c, 0.0)) <= 1e-10, info.name);
      }
    }
  }

  TEST_CASE("singular start system is reported") {
    SystemSpec s = builtin_spec("model01");
    s.kernels = {{"1", "1"}, {"1", "1"}};
    const VolterraSystem sys = VolterraSystem::from_spec(s);
    const LinearizedSystem lin(sys, sys.initial_guess());
    CHECK_THROWS_WITH_AS(initial_values(lin), doctest::Contains("t = 0"), SingularMatrixError);
  }
}

TEST_SUITE("config") {
  TEST_CASE("config file reproduces the builtin") {
    const SystemSpec spec = parse_config(kModel01Config);
    CHECK(spec.name == "m01-config");
    const VolterraSystem a = VolterraSystem::from_spec(spec);
    const VolterraSystem b = builtin("model01");
    CHECK(validate(a).empty());
    for (double t : {0.3, 1.1, 2.0}) {
      for (std::size_t i = 0; i < 2; ++i) CHECK(a.rhs(i).evaluate({.t = t}) == b.rhs(i).evaluate({.t = t}));
    }
    CHECK(a.nonlinearity(0, 0).to_string() == "x");
  }

  TEST_CASE("shared unknowns and nonlinearities") {
    const SystemSpec spec = parse_config(R"(
n = 1
T = 1
alpha[1] = t/2
K[1][1] = 1+t+s
K[1][2] = 1+2*t
G[1][1] = x+x^2
f[1] = t^3/3 + 41*t^4/64 + t^5/160 + 17*t^6/1920
unknown_of_band = 1, 1
exact[1] = t^2
)");
    CHECK(spec.unknown_of_band == std::vector<std::size_t>{0, 0});
    CHECK(validate(VolterraSystem::from_spec(spec)).empty());
  }

  TEST_CASE("errors name the line") {
    CHECK_THROWS_WITH_AS(parse_config("n = 1\nT = 1\nK[1][1] 1\n"), doctest::Contains("line 3"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("n = 1\nT = 1\nK[1][1] = 1\nK[1][1] = 2\n"), doctest::Contains("duplicate"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("n = 1\nT = 1\nQ = 2\n"), doctest::Contains("unknown key"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("n = 1\nT = 1\nK[1][1] = 1\n"), doctest::Contains("f[1] missing"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("T = 1\n"), doctest::Contains("'n'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("n = 1\nT = one\n"), doctest::Contains("line 2"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("n = 1\nT = 1\nK[1][3] = 1\nK[1][1] = 1\nf[1] = t\n"),
                         doctest::Contains("out of range"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("n = 1\nT = 1\nK[1][1] = 1+\nf[1] = t\n"), doctest::Contains("K[1][1]"),
                         ConfigError);
  }

  TEST_CASE("load_config reports missing files") {
    CHECK_THROWS_WITH_AS(load_config("/nonexistent/missing.toml"), doctest::Contains("file not found"), ConfigError);
    const auto path = std::filesystem::temp_directory_path() / "volterra_test_model01.cfg";
    {
      std::ofstream out(path);
      out << kModel01Config;
    }
    CHECK(load_config(path).equations == 2);
    std::filesystem::remove(path);
  }
}
