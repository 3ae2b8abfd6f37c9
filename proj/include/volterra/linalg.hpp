#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace volterra {

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> entries() const { return data_; }

  std::vector<double> multiply(std::span<const double> x) const;
  double norm_inf() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// LU factorization with partial (row) pivoting. A pivot smaller than
/// 1e-13 times the largest magnitude of its column in the original matrix
/// raises SingularMatrixError naming the elimination step (1-based).
class LuFactorization {
 public:
  static constexpr double kSingularityThreshold = 1e-13;
  static constexpr double kRefineThreshold = 1e-10;

  explicit LuFactorization(DenseMatrix a);

  std::size_t size() const { return lu_.rows(); }
  const DenseMatrix& matrix() const { return original_; }

  /// Solves A x = b, with one step of iterative refinement when the
  /// residual exceeds 1e-10 * max(1, |b|_inf).
  std::vector<double> solve(std::span<const double> b) const;

  /// |A|_inf * |A^-1|_inf, computed column by column from the factors.
  double condition_estimate() const;

 private:
  std::vector<double> substitute(std::span<const double> b) const;

  DenseMatrix original_;
  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
};

std::vector<double> lu_solve(const DenseMatrix& a, std::span<const double> b);

/// |A x - b|_inf
double residual(const DenseMatrix& a, std::span<const double> x, std::span<const double> b);

}  // namespace volterra
