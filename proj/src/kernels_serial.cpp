#include <cmath>
#include <stdexcept>

#include "tasgnn/kernels.hpp"

namespace tasgnn::kernels::serial {
namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

void check_attention(std::span<const double> attention, std::size_t width) {
  if (!attention.empty() && attention.size() != 2 * width + 1)
    throw std::invalid_argument("attention vector must have length 2*width+1");
}

}  // namespace

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
  out = Matrix(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
}

void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.rows() != b.rows()) throw std::invalid_argument("matmul_at_b: row mismatch");
  out = Matrix(a.cols(), b.cols());
  for (std::size_t n = 0; n < a.rows(); ++n)
    for (std::size_t d = 0; d < a.cols(); ++d) {
      const double coef = a(n, d);
      for (std::size_t j = 0; j < b.cols(); ++j) out(d, j) += coef * b(n, j);
    }
}

void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.cols() != b.cols()) throw std::invalid_argument("matmul_a_bt: column mismatch");
  out = Matrix(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) out(i, j) = dot(a.row(i), b.row(j));
}

void spmm(const Csr& a, const Matrix& x, Matrix& out) {
  if (a.cols != x.rows()) throw std::invalid_argument("spmm: dimension mismatch");
  out = Matrix(a.rows, x.cols());
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t k = a.offsets[r]; k < a.offsets[r + 1]; ++k) {
      const double v = a.values[k];
      const auto src = x.row(a.indices[k]);
      auto dst = out.row(r);
      for (std::size_t j = 0; j < x.cols(); ++j) dst[j] += v * src[j];
    }
}

void attention_forward(const MessageEdges& edges, const Matrix& projected,
                       std::span<const double> attention, double slope, AttentionForward& fwd) {
  const std::size_t n = edges.num_nodes;
  const std::size_t h = projected.cols();
  check_attention(attention, h);
  const bool attend = !attention.empty();
  fwd.raw.assign(edges.num_slots(), 0.0);
  fwd.alpha.assign(edges.num_slots(), 0.0);
  fwd.agg = Matrix(n, h);
  fwd.out = Matrix(n, h);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t begin = edges.in_offsets[i];
    const std::size_t end = edges.in_offsets[i + 1];
    auto agg = fwd.agg.row(i);
    if (begin == end) {
      for (std::size_t k = 0; k < h; ++k) agg[k] = projected(i, k);
    } else if (!attend) {
      const double a = 1.0 / static_cast<double>(end - begin);
      for (std::size_t s = begin; s < end; ++s) fwd.alpha[s] = a;
    } else {
      const double t = dot(attention.subspan(0, h), projected.row(i));
      double max_e = -INFINITY;
      for (std::size_t s = begin; s < end; ++s) {
        const double u = dot(attention.subspan(h, h), projected.row(edges.source[s]));
        fwd.raw[s] = t + u + attention[2 * h] * edges.weight[s];
        max_e = std::max(max_e, leaky_relu(fwd.raw[s], slope));
      }
      double z = 0.0;
      for (std::size_t s = begin; s < end; ++s) {
        fwd.alpha[s] = std::exp(leaky_relu(fwd.raw[s], slope) - max_e);
        z += fwd.alpha[s];
      }
      for (std::size_t s = begin; s < end; ++s) fwd.alpha[s] /= z;
    }
    for (std::size_t s = begin; s < end; ++s) {
      const auto src = projected.row(edges.source[s]);
      for (std::size_t k = 0; k < h; ++k) agg[k] += fwd.alpha[s] * src[k];
    }
    auto out = fwd.out.row(i);
    for (std::size_t k = 0; k < h; ++k) out[k] = elu(agg[k]);
  }
}

void attention_backward(const MessageEdges& edges, const Matrix& projected,
                        std::span<const double> attention, double slope,
                        const AttentionForward& fwd, const Matrix& d_out, AttentionGrad& grad) {
  const std::size_t n = edges.num_nodes;
  const std::size_t h = projected.cols();
  check_attention(attention, h);
  const bool attend = !attention.empty();
  grad.d_projected = Matrix(n, h);
  grad.d_attention.assign(attention.size(), 0.0);
  std::vector<double> d_agg(h), d_alpha;

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < h; ++k) {
      const double x = fwd.agg(i, k);
      d_agg[k] = d_out(i, k) * (x > 0.0 ? 1.0 : std::exp(x));
    }
    const std::size_t begin = edges.in_offsets[i];
    const std::size_t end = edges.in_offsets[i + 1];
    if (begin == end) {
      for (std::size_t k = 0; k < h; ++k) grad.d_projected(i, k) += d_agg[k];
      continue;
    }
    d_alpha.assign(end - begin, 0.0);
    double mean_d_alpha = 0.0;
    for (std::size_t s = begin; s < end; ++s) {
      const std::size_t j = edges.source[s];
      for (std::size_t k = 0; k < h; ++k) grad.d_projected(j, k) += fwd.alpha[s] * d_agg[k];
      if (attend) {
        d_alpha[s - begin] = dot(d_agg, projected.row(j));
        mean_d_alpha += fwd.alpha[s] * d_alpha[s - begin];
      }
    }
    if (!attend) continue;
    for (std::size_t s = begin; s < end; ++s) {
      const std::size_t j = edges.source[s];
      const double d_e = fwd.alpha[s] * (d_alpha[s - begin] - mean_d_alpha);
      const double d_raw = d_e * (fwd.raw[s] > 0.0 ? 1.0 : slope);
      for (std::size_t k = 0; k < h; ++k) {
        grad.d_projected(i, k) += d_raw * attention[k];
        grad.d_projected(j, k) += d_raw * attention[h + k];
        grad.d_attention[k] += d_raw * projected(i, k);
        grad.d_attention[h + k] += d_raw * projected(j, k);
      }
      grad.d_attention[2 * h] += d_raw * edges.weight[s];
    }
  }
}

}  // namespace tasgnn::kernels::serial
