#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ptfprg/error.hpp"

namespace ptfprg {

/// Solves min |A c - y|_2 by Householder QR. `a` is row-major rows x cols.
/// Throws ParameterError when A is numerically rank deficient.
inline std::vector<double> least_squares(std::vector<double> a, std::size_t rows, std::size_t cols,
                                         std::vector<double> y) {
  if (a.size() != rows * cols || y.size() != rows) throw DimensionError("least_squares: shape mismatch");
  if (rows < cols) throw ParameterError("least_squares: fewer rows than unknowns");
  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * cols + c]; };

  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  for (std::size_t j = 0; j < cols; ++j) {
    double norm2 = 0.0;
    for (std::size_t r = j; r < rows; ++r) norm2 += at(r, j) * at(r, j);
    const double norm = std::sqrt(norm2);
    if (norm <= 1e-12 * std::max(scale, 1e-300)) throw ParameterError("least_squares: singular fit matrix");
    const double alpha = at(j, j) > 0 ? -norm : norm;
    // v = x - alpha e1, stored in column j below the diagonal.
    at(j, j) -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t r = j; r < rows; ++r) vnorm2 += at(r, j) * at(r, j);
    for (std::size_t c = j + 1; c < cols; ++c) {
      double dot = 0.0;
      for (std::size_t r = j; r < rows; ++r) dot += at(r, j) * at(r, c);
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t r = j; r < rows; ++r) at(r, c) -= f * at(r, j);
    }
    double dot = 0.0;
    for (std::size_t r = j; r < rows; ++r) dot += at(r, j) * y[r];
    const double f = 2.0 * dot / vnorm2;
    for (std::size_t r = j; r < rows; ++r) y[r] -= f * at(r, j);
    at(j, j) = alpha;  // R diagonal
  }
  std::vector<double> c(cols);
  for (std::size_t j = cols; j-- > 0;) {
    double s = y[j];
    for (std::size_t k = j + 1; k < cols; ++k) s -= at(j, k) * c[k];
    c[j] = s / at(j, j);
  }
  return c;
}

}  // namespace ptfprg
