#include "tasgnn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tasgnn::linalg {

void orthonormalize(Matrix& q) {
  const std::size_t n = q.rows();
  const std::size_t m = q.cols();
  // Work on contiguous columns; the row-major layout would stride every dot.
  std::vector<std::vector<double>> cols(m, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < m; ++c) cols[c][r] = q(r, c);
  auto dot = [n](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += x[r] * y[r];
    return s;
  };
  std::vector<double> scale(m);
  for (std::size_t c = 0; c < m; ++c) scale[c] = std::sqrt(dot(cols[c], cols[c]));
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t c = 0; c < m; ++c) {
      auto& col = cols[c];
      for (std::size_t p = 0; p < c; ++p) {
        const double proj = dot(cols[p], col);
        for (std::size_t r = 0; r < n; ++r) col[r] -= proj * cols[p][r];
      }
      const double norm = std::sqrt(dot(col, col));
      if (norm == 0.0 || norm <= 1e-12 * scale[c]) {
        std::fill(col.begin(), col.end(), 0.0);
        scale[c] = 0.0;
      } else {
        for (auto& x : col) x /= norm;
        scale[c] = 1.0;
      }
    }
  }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < m; ++c) q(r, c) = cols[c][r];
}

void symmetric_eigen(Matrix a, std::vector<double>& values, Matrix& vectors) {
  const std::size_t m = a.rows();
  vectors = Matrix(m, m);
  for (std::size_t i = 0; i < m; ++i) vectors(i, i) = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        total += a(i, j) * a(i, j);
        if (i != j) off += a(i, j) * a(i, j);
      }
    if (off <= 1e-30 * total || off == 0.0) break;
    for (std::size_t p = 0; p + 1 < m; ++p)
      for (std::size_t q = p + 1; q < m; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < m; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < m; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < m; ++k) {
          const double vkp = vectors(k, p);
          const double vkq = vectors(k, q);
          vectors(k, p) = c * vkp - s * vkq;
          vectors(k, q) = s * vkp + c * vkq;
        }
      }
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  values.resize(m);
  Matrix sorted(m, m);
  for (std::size_t c = 0; c < m; ++c) {
    values[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < m; ++r) sorted(r, c) = vectors(r, order[c]);
  }
  vectors = std::move(sorted);
}

}  // namespace tasgnn::linalg
