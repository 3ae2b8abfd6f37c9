#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "volterra/error.hpp"
#include "volterra/problem.hpp"
#include "volterra/quadrature.hpp"

using namespace volterra;

namespace {

BatchIntegrand batch(double (*f)(double)) {
  return [f](std::span<const double> s, std::span<double> out) {
    for (std::size_t p = 0; p < s.size(); ++p) out[p] = f(s[p]);
  };
}

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("composite midpoint examples") {
    for (std::size_t panels : {1, 3, 100}) {
      CHECK(composite_midpoint(ScalarIntegrand([](double) { return 1.0; }), 0.0, 1.0, panels) ==
            doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK(composite_midpoint(ScalarIntegrand([](double s) { return s; }), 0.0, 1.0, 1) == 0.5);
    // Midpoint error for s^2 on [0,1]: (b-a) h^2 f''/24 with f'' = 2, i.e. h^2/12.
    const double expected = 1.0 / 3.0 - 1.0 / (12.0 * 100.0 * 100.0);
    const double got = composite_midpoint(ScalarIntegrand([](double s) { return s * s; }), 0.0, 1.0, 100);
    CHECK(got == doctest::Approx(expected).epsilon(1e-14));
    CHECK(1.0 / 3.0 - got == doctest::Approx(8.333333e-6).epsilon(1e-6));
  }

  TEST_CASE("scalar and batched forms agree") {
    const auto f = [](double s) { return std::sin(3 * s) + s * s; };
    for (std::size_t panels : {1, 7, 1023, 1024, 1025, 5000}) {
      const double a = composite_midpoint(ScalarIntegrand(f), -0.3, 1.9, panels);
      const double b = composite_midpoint(batch(+f), -0.3, 1.9, panels);
      CHECK(a == doctest::Approx(b).epsilon(1e-13));
    }
  }

  TEST_CASE("empty interval is exactly zero, reversed is an error") {
    CHECK(composite_midpoint(ScalarIntegrand([](double) { return 1e300; }), 0.4, 0.4, 5) == 0.0);
    CHECK_THROWS_AS(composite_midpoint(ScalarIntegrand([](double) { return 1.0; }), 1.0, 0.0, 5), Error);
    CHECK_THROWS_AS(composite_midpoint(ScalarIntegrand([](double) { return 1.0; }), 0.0, 1.0, 0), Error);
  }

  TEST_CASE("non-finite integrand reports the abscissa") {
    try {
      composite_midpoint(ScalarIntegrand([](double s) { return s > 0.5 ? std::numeric_limits<double>::infinity() : 0.0; }),
                         0.0, 1.0, 4);
      FAIL("expected a quadrature error");
    } catch (const QuadratureError& e) {
      CHECK(e.abscissa() == 0.625);
    }
    try {
      composite_midpoint(batch([](double s) { return s > 0.5 ? std::nan("") : 0.0; }), 0.0, 1.0, 4);
      FAIL("expected a quadrature error");
    } catch (const QuadratureError& e) {
      CHECK(e.abscissa() == 0.625);
    }
  }

  TEST_CASE("exact on affine integrands for every panel count") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
      const double a = d(rng), b = d(rng), lo = d(rng), len = std::abs(d(rng));
      const std::size_t panels = 1 + trial * 7 % 500;
      const double exact = a * len + b * ((lo + len) * (lo + len) - lo * lo) / 2.0;
      const double got = composite_midpoint(ScalarIntegrand([&](double s) { return a + b * s; }), lo, lo + len, panels);
      CHECK(std::abs(got - exact) <= 1e-13 * (1.0 + std::abs(a) + std::abs(b)) * (1.0 + len) * (1.0 + std::abs(lo)));
    }
  }

  TEST_CASE("additivity when panel boundaries align") {
    const auto f = ScalarIntegrand([](double s) { return std::exp(s) * std::cos(5 * s); });
    const double whole = composite_midpoint(f, 0.0, 3.0, 300);
    const double parts = composite_midpoint(f, 0.0, 1.0, 100) + composite_midpoint(f, 1.0, 3.0, 200);
    CHECK(std::abs(whole - parts) <= 1e-12);
  }

  TEST_CASE("decompose examples") {
    const VolterraSystem m1 = builtin("model01");
    const BandDecomposition d0 = decompose(0.0, m1.curves());
    REQUIRE(d0.segments.size() == 2);
    for (const BandSegment& s : d0.segments) CHECK(s.empty());

    const BandDecomposition d1 = decompose(2.0, m1.curves());
    REQUIRE(d1.segments.size() == 2);
    CHECK(d1.segments[0].lo == 0.0);
    CHECK(d1.segments[0].hi == 1.0);
    CHECK(d1.segments[1].lo == 1.0);
    CHECK(d1.segments[1].hi == 2.0);
    CHECK(d1.segments[1].band == 1);

    const BandDecomposition d2 = decompose(1.5, builtin("model02").curves());
    REQUIRE(d2.segments.size() == 3);
    CHECK(d2.segments[0].hi == doctest::Approx(0.5));
    CHECK(d2.segments[1].lo == doctest::Approx(0.5));
    CHECK(d2.segments[1].hi == doctest::Approx(1.0));
    CHECK(d2.segments[2].hi == 1.5);
  }

  TEST_CASE("segments tile (0, t]") {
    const VolterraSystem m2 = builtin("model02");
    for (int p = 0; p <= 40; ++p) {
      const double t = 2.0 * p / 40.0;
      const BandDecomposition d = decompose(t, m2.curves());
      double total = 0.0;
      for (std::size_t j = 0; j < d.segments.size(); ++j) {
        total += d.segments[j].length();
        if (j > 0) CHECK(d.segments[j].lo == d.segments[j - 1].hi);
      }
      CHECK(std::abs(total - t) <= 1e-12);
    }
  }

  TEST_CASE("curve ordering violations are validation errors") {
    const CurveFamily swapped(1.0, {parse("t"), parse("t/2")});
    CHECK_THROWS_AS(decompose(0.5, swapped), ValidationError);
    CHECK_NOTHROW(decompose(0.0, swapped));
  }
}
