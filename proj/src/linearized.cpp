#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "volterra/error.hpp"
#include "volterra/problem.hpp"
#include "volterra/quadrature.hpp"
#include "volterra/simd.hpp"

namespace volterra {

namespace {

struct Scratch {
  std::vector<double> a, b, c, d;
  void reserve(std::size_t n) {
    if (a.size() < n) {
      a.resize(n);
      b.resize(n);
      c.resize(n);
      d.resize(n);
    }
  }
};

Scratch& scratch(std::size_t n) {
  thread_local Scratch s;
  s.reserve(n);
  return s;
}

}  // namespace

LinearizedSystem::LinearizedSystem(VolterraSystem sys, std::shared_ptr<const Approximation> x0)
    : sys_(std::move(sys)), x0_(std::move(x0)) {
  if (!x0_) throw Error("linearization needs an initial approximation");
  if (x0_->components() != sys_.components()) {
    throw Error(fmt::format("initial approximation has {} components, system has {}",
                            x0_->components(), sys_.components()));
  }
  const std::size_t n = sys_.equations();
  for (std::size_t j = 0; j < sys_.bands(); ++j) {
    bool needs = false;
    bool linear = true;
    for (std::size_t i = 0; i < n; ++i) {
      needs = needs || sys_.nonlinearity_dx(i, j).uses(Variable::X);
      linear = linear && sys_.is_identity_nonlinearity(i, j);
    }
    band_needs_x0_.push_back(needs);
    band_is_linear_.push_back(linear);
  }
}

void LinearizedSystem::frozen_kernels(std::size_t band, double t, std::span<const double> s,
                                      std::span<double> out) const {
  const std::size_t n = equations();
  const std::size_t len = s.size();
  if (out.size() != n * len) throw Error("frozen_kernels: output size mismatch");
  if (len == 0) return;
  Scratch& buf = scratch(len);
  std::span<double> x0(buf.a.data(), len);
  std::span<double> gx(buf.b.data(), len);
  if (band_needs_x0_[band]) x0_->evaluate(sys_.unknown_of_band(band), s, x0);
  const simd::Kernels& k = simd::active();
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> row = out.subspan(i * len, len);
    sys_.compiled_kernel(i, band).evaluate(t, s, Arg(), row);
    const Expression& dx = sys_.nonlinearity_dx(i, band);
    if (dx.is_constant(1.0)) continue;
    if (dx.is_constant()) {
      k.mul_scalar(row.data(), dx.value(), row.data(), len);
      continue;
    }
    const Arg xa = band_needs_x0_[band] ? Arg(std::span<const double>(x0)) : Arg();
    sys_.compiled_nonlinearity_dx(i, band).evaluate(Arg(), s, xa, gx);
    k.mul(row.data(), gx.data(), row.data(), len);
  }
}

double LinearizedSystem::frozen_kernel(std::size_t i, std::size_t band, double t, double s) const {
  const double x0 = x0_->value(sys_.unknown_of_band(band), s);
  return sys_.kernel(i, band).evaluate(Bindings{.t = t, .s = s}) *
         sys_.nonlinearity_dx(i, band).evaluate(Bindings{.s = s, .x = x0});
}

std::vector<double> LinearizedSystem::psi(double t, const Approximation& iterate,
                                          std::size_t panels) const {
  const std::size_t n = equations();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = sys_.rhs(i).evaluate(Bindings{.t = t});

  const BandDecomposition bands = decompose(t, sys_.curves());
  const simd::Kernels& k = simd::active();
  for (const BandSegment& seg : bands.segments) {
    if (seg.empty() || band_is_linear_[seg.band]) continue;
    const std::size_t c = sys_.unknown_of_band(seg.band);

    // Pieces between the iterate's breakpoints inside the segment.
    std::vector<double> cuts{seg.lo};
    for (double b : iterate.breakpoints(c)) {
      if (b > seg.lo && b < seg.hi) cuts.push_back(b);
    }
    cuts.push_back(seg.hi);

    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
      const MidpointGrid grid = midpoint_grid(cuts[p], cuts[p + 1], panels);
      const std::size_t len = grid.nodes.size();
      if (len == 0) continue;
      Scratch& buf = scratch(len);
      std::span<const double> s(grid.nodes);
      std::span<double> xm(buf.a.data(), len);
      std::span<double> x0(buf.b.data(), len);
      std::span<double> work(buf.c.data(), len);
      std::span<double> kern(buf.d.data(), len);
      iterate.evaluate(c, s, xm);
      x0_->evaluate(c, s, x0);
      for (std::size_t i = 0; i < n; ++i) {
        if (sys_.is_identity_nonlinearity(i, seg.band)) continue;
        // bracket = G_x(s, x0) * xm - G(s, xm)
        sys_.compiled_nonlinearity_dx(i, seg.band).evaluate(Arg(), s, std::span<const double>(x0), work);
        k.mul(work.data(), xm.data(), work.data(), len);
        sys_.compiled_nonlinearity(i, seg.band).evaluate(Arg(), s, std::span<const double>(xm), kern);
        k.sub(work.data(), kern.data(), work.data(), len);
        sys_.compiled_kernel(i, seg.band).evaluate(t, s, Arg(), kern);
        k.mul(work.data(), kern.data(), work.data(), len);
        out[i] += midpoint_sum(grid, std::span<const double>(work.data(), len));
      }
    }
  }
  return out;
}

std::vector<double> LinearizedSystem::psi_slope_at_zero(const Approximation& iterate) const {
  // Leibniz rule at t = 0: every integral has an empty range, so only the
  // boundary terms K(0,0) (alpha_j'(0) - alpha_{j-1}'(0)) [bracket at s = 0] survive.
  const std::size_t n = equations();
  const CurveFamily& curves = sys_.curves();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = sys_.rhs_derivative(i).evaluate(Bindings{.t = 0.0});
  for (std::size_t j = 0; j < sys_.bands(); ++j) {
    const double width = curves.derivative(j + 1, 0.0) - curves.derivative(j, 0.0);
    if (width == 0.0) continue;
    const std::size_t c = sys_.unknown_of_band(j);
    const double xm = iterate.value(c, 0.0);
    const double x0 = x0_->value(c, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (sys_.is_identity_nonlinearity(i, j)) continue;
      const double bracket = sys_.nonlinearity_dx(i, j).evaluate(Bindings{.s = 0.0, .x = x0}) * xm -
                             sys_.nonlinearity(i, j).evaluate(Bindings{.s = 0.0, .x = xm});
      out[i] += sys_.kernel(i, j).evaluate(Bindings{.t = 0.0, .s = 0.0}) * width * bracket;
    }
  }
  return out;
}

DenseMatrix LinearizedSystem::start_matrix() const {
  const std::size_t n = equations();
  const CurveFamily& curves = sys_.curves();
  DenseMatrix a(n, n);
  for (std::size_t j = 0; j < sys_.bands(); ++j) {
    const double width = curves.derivative(j + 1, 0.0) - curves.derivative(j, 0.0);
    const std::size_t c = sys_.unknown_of_band(j);
    for (std::size_t i = 0; i < n; ++i) a(i, c) += frozen_kernel(i, j, 0.0, 0.0) * width;
  }
  return a;
}

std::vector<double> LinearizedSystem::initial_values(std::span<const double> slope) const {
  try {
    return lu_solve(start_matrix(), slope);
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(
        fmt::format("t = 0 system is singular ({}); the problem needs a uniquely solvable "
                    "start system sum_j K~_ij(0,0) (alpha_j'(0) - alpha_(j-1)'(0)) x_j(0) = f_i'(0)",
                    e.what()),
        e.pivot_step());
  }
}

LinearizedSystem linearize(const VolterraSystem& sys, std::shared_ptr<const Approximation> x0) {
  return LinearizedSystem(sys, std::move(x0));
}

}  // namespace volterra
