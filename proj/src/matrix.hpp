#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace driftwatch {

/// Dense square matrix, row-major. Small: p is a data dimension, not a mesh.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  static Matrix identity(std::size_t n);

  std::size_t size() const { return n_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(a_.data() + i * n_, n_);
  }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

/// Max |a_ij - a_ji| over all pairs.
double symmetry_gap(const Matrix& m);

/// Throws InvalidInput unless the matrix is symmetric within `tol` (absolute,
/// relative to the largest diagonal magnitude).
void require_symmetric(const Matrix& m, double tol, const char* what);

/// Lower-triangular L with L * L^T = m. Throws NotPositiveDefinite when a
/// pivot is not strictly positive. The input must be symmetric.
Matrix cholesky_lower(const Matrix& m);

/// y = L * z for lower-triangular L, written into y (y may not alias z).
void lower_tri_multiply(const Matrix& lower, std::span<const double> z,
                        std::span<double> y);

}  // namespace driftwatch
