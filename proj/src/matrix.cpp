#include "matrix.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace driftwatch {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double symmetry_gap(const Matrix& m) {
  double gap = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j)
      gap = std::max(gap, std::fabs(m(i, j) - m(j, i)));
  return gap;
}

void require_symmetric(const Matrix& m, double tol, const char* what) {
  double scale = 1.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    scale = std::max(scale, std::fabs(m(i, i)));
  if (symmetry_gap(m) > tol * scale)
    fail_invalid(std::string(what) + ": matrix is not symmetric");
}

Matrix cholesky_lower(const Matrix& m) {
  const std::size_t n = m.size();
  if (n == 0) fail_invalid("cholesky: empty matrix");
  require_symmetric(m, 1e-9, "cholesky");
  Matrix lower(n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = m(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= lower(j, k) * lower(j, k);
    if (!(diag > 0.0))
      fail(ErrorCode::NotPositiveDefinite,
           "cholesky: nonpositive pivot at index " + std::to_string(j));
    const double ljj = std::sqrt(diag);
    lower(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / ljj;
    }
  }
  return lower;
}

void lower_tri_multiply(const Matrix& lower, std::span<const double> z,
                        std::span<double> y) {
  const std::size_t n = lower.size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const auto row = lower.row(i);
    for (std::size_t k = 0; k <= i; ++k) s += row[k] * z[k];
    y[i] = s;
  }
}

}  // namespace driftwatch
