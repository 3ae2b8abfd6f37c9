#include "volterra/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "volterra/error.hpp"

namespace volterra {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) throw Error("matrix entry count does not match its shape");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) throw Error("matrix-vector shape mismatch");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) acc += (*this)(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

double DenseMatrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (double v : row(r)) acc += std::abs(v);
    best = std::max(best, acc);
  }
  return best;
}

LuFactorization::LuFactorization(DenseMatrix a) : original_(std::move(a)), lu_(original_) {
  if (!lu_.square()) throw Error("LU factorization needs a square matrix");
  const std::size_t n = lu_.rows();
  for (double v : original_.entries()) {
    if (!std::isfinite(v)) throw Error("matrix has a non-finite entry");
  }

  std::vector<double> column_scale(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) {
      column_scale[c] = std::max(column_scale[c], std::abs(original_(r, c)));
    }
  }

  perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double biggest = std::abs(lu_(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(lu_(r, k)) > biggest) {
        biggest = std::abs(lu_(r, k));
        pivot = r;
      }
    }
    if (biggest == 0.0 || biggest < kSingularityThreshold * column_scale[k]) {
      throw SingularMatrixError(
          "matrix numerically singular at pivot step " + std::to_string(k + 1), k + 1);
    }
    if (pivot != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(pivot).begin());
      std::swap(perm_[k], perm_[pivot]);
    }
    const double inv = 1.0 / lu_(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double factor = lu_(r, k) * inv;
      lu_(r, k) = factor;
      if (factor == 0.0) continue;
      for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= factor * lu_(k, c);
    }
  }
}

std::vector<double> LuFactorization::substitute(std::span<const double> b) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = b[perm_[i]];
    for (std::size_t c = 0; c < i; ++c) acc -= lu_(i, c) * y[c];
    y[i] = acc;
  }
  for (std::size_t i = n; i-- > 0;) {
    double acc = y[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= lu_(i, c) * y[c];
    y[i] = acc / lu_(i, i);
  }
  return y;
}

std::vector<double> LuFactorization::solve(std::span<const double> b) const {
  if (b.size() != size()) throw Error("right-hand side length does not match the matrix");
  std::vector<double> x = substitute(b);

  double b_norm = 0.0;
  for (double v : b) b_norm = std::max(b_norm, std::abs(v));
  std::vector<double> r = original_.multiply(x);
  double r_norm = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = b[i] - r[i];
    r_norm = std::max(r_norm, std::abs(r[i]));
  }
  if (r_norm > kRefineThreshold * std::max(1.0, b_norm)) {
    const std::vector<double> dx = substitute(r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
  }
  return x;
}

double LuFactorization::condition_estimate() const {
  const std::size_t n = size();
  std::vector<double> row_sums(n, 0.0);
  std::vector<double> e(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    std::fill(e.begin(), e.end(), 0.0);
    e[c] = 1.0;
    const std::vector<double> col = substitute(e);
    for (std::size_t r = 0; r < n; ++r) row_sums[r] += std::abs(col[r]);
  }
  const double inv_norm = n == 0 ? 0.0 : *std::max_element(row_sums.begin(), row_sums.end());
  return original_.norm_inf() * inv_norm;
}

std::vector<double> lu_solve(const DenseMatrix& a, std::span<const double> b) {
  if (!a.square()) throw Error("lu_solve needs a square matrix");
  if (b.size() != a.rows()) throw Error("right-hand side length does not match the matrix");
  return LuFactorization(a).solve(b);
}

double residual(const DenseMatrix& a, std::span<const double> x, std::span<const double> b) {
  if (b.size() != a.rows()) throw Error("residual: shape mismatch");
  const std::vector<double> ax = a.multiply(x);
  double worst = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) worst = std::max(worst, std::abs(ax[i] - b[i]));
  return worst;
}

}  // namespace volterra
