#include <cmath>
#include <stdexcept>

#include "tasgnn/kernels.hpp"

namespace tasgnn::kernels::parallel {
namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

using Index = std::ptrdiff_t;

}  // namespace

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
  out = Matrix(a.rows(), b.cols());
  const Index rows = static_cast<Index>(a.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < rows; ++i) {
    auto dst = out.row(static_cast<std::size_t>(i));
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(static_cast<std::size_t>(i), k);
      const auto src = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aik * src[j];
    }
  }
}

void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.rows() != b.rows()) throw std::invalid_argument("matmul_at_b: row mismatch");
  out = Matrix(a.cols(), b.cols());
  const Index dims = static_cast<Index>(a.cols());
#pragma omp parallel for schedule(static)
  for (Index d = 0; d < dims; ++d) {
    auto dst = out.row(static_cast<std::size_t>(d));
    for (std::size_t n = 0; n < a.rows(); ++n) {
      const double coef = a(n, static_cast<std::size_t>(d));
      const auto src = b.row(n);
      for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += coef * src[j];
    }
  }
}

void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.cols() != b.cols()) throw std::invalid_argument("matmul_a_bt: column mismatch");
  out = Matrix(a.rows(), b.rows());
  const Index rows = static_cast<Index>(a.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < rows; ++i) {
    const auto ai = a.row(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < b.rows(); ++j) out(static_cast<std::size_t>(i), j) = dot(ai, b.row(j));
  }
}

void spmm(const Csr& a, const Matrix& x, Matrix& out) {
  if (a.cols != x.rows()) throw std::invalid_argument("spmm: dimension mismatch");
  out = Matrix(a.rows, x.cols());
  const Index rows = static_cast<Index>(a.rows);
#pragma omp parallel for schedule(dynamic, 64)
  for (Index r = 0; r < rows; ++r) {
    auto dst = out.row(static_cast<std::size_t>(r));
    for (std::size_t k = a.offsets[r]; k < a.offsets[r + 1]; ++k) {
      const double v = a.values[k];
      const auto src = x.row(a.indices[k]);
      for (std::size_t j = 0; j < x.cols(); ++j) dst[j] += v * src[j];
    }
  }
}

void attention_forward(const MessageEdges& edges, const Matrix& projected,
                       std::span<const double> attention, double slope, AttentionForward& fwd) {
  const std::size_t n = edges.num_nodes;
  const std::size_t h = projected.cols();
  if (!attention.empty() && attention.size() != 2 * h + 1)
    throw std::invalid_argument("attention vector must have length 2*width+1");
  const bool attend = !attention.empty();
  fwd.raw.assign(edges.num_slots(), 0.0);
  fwd.alpha.assign(edges.num_slots(), 0.0);
  fwd.agg = Matrix(n, h);
  fwd.out = Matrix(n, h);

  std::vector<double> src_score(attend ? n : 0);
  const Index nodes = static_cast<Index>(n);
  if (attend) {
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < nodes; ++j)
      src_score[j] = dot(attention.subspan(h, h), projected.row(static_cast<std::size_t>(j)));
  }

#pragma omp parallel for schedule(dynamic, 64)
  for (Index ii = 0; ii < nodes; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
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
        fwd.raw[s] = t + src_score[edges.source[s]] + attention[2 * h] * edges.weight[s];
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
  if (!attention.empty() && attention.size() != 2 * h + 1)
    throw std::invalid_argument("attention vector must have length 2*width+1");
  const bool attend = !attention.empty();
  const Index nodes = static_cast<Index>(n);

  // Pass 1, per target: upstream gradient through ELU and the softmax.
  Matrix d_agg(n, h);
  std::vector<double> d_raw(attend ? edges.num_slots() : 0, 0.0);
  std::vector<double> d_target_score(attend ? n : 0, 0.0);
#pragma omp parallel for schedule(dynamic, 64)
  for (Index ii = 0; ii < nodes; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    auto dg = d_agg.row(i);
    for (std::size_t k = 0; k < h; ++k) {
      const double x = fwd.agg(i, k);
      dg[k] = d_out(i, k) * (x > 0.0 ? 1.0 : std::exp(x));
    }
    if (!attend) continue;
    const std::size_t begin = edges.in_offsets[i];
    const std::size_t end = edges.in_offsets[i + 1];
    double mean_d_alpha = 0.0;
    for (std::size_t s = begin; s < end; ++s) {
      d_raw[s] = dot(dg, projected.row(edges.source[s]));
      mean_d_alpha += fwd.alpha[s] * d_raw[s];
    }
    double total = 0.0;
    for (std::size_t s = begin; s < end; ++s) {
      const double d_e = fwd.alpha[s] * (d_raw[s] - mean_d_alpha);
      d_raw[s] = d_e * (fwd.raw[s] > 0.0 ? 1.0 : slope);
      total += d_raw[s];
    }
    d_target_score[i] = total;
  }

  // Pass 2, per source: gather every contribution to row j of dP.
  grad.d_projected = Matrix(n, h);
  std::vector<double> d_source_score(attend ? n : 0, 0.0);
#pragma omp parallel for schedule(dynamic, 64)
  for (Index jj = 0; jj < nodes; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    auto dp = grad.d_projected.row(j);
    if (edges.in_degree(j) == 0)
      for (std::size_t k = 0; k < h; ++k) dp[k] += d_agg(j, k);
    double src_total = 0.0;
    for (std::size_t o = edges.out_offsets[j]; o < edges.out_offsets[j + 1]; ++o) {
      const std::size_t s = edges.out_slots[o];
      const auto dg = d_agg.row(edges.target[s]);
      for (std::size_t k = 0; k < h; ++k) dp[k] += fwd.alpha[s] * dg[k];
      if (attend) src_total += d_raw[s];
    }
    if (attend) {
      d_source_score[j] = src_total;
      for (std::size_t k = 0; k < h; ++k)
        dp[k] += d_target_score[j] * attention[k] + src_total * attention[h + k];
    }
  }

  grad.d_attention.assign(attention.size(), 0.0);
  if (!attend) return;
  const Index width = static_cast<Index>(h);
#pragma omp parallel for schedule(static)
  for (Index kk = 0; kk < width; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    double a1 = 0.0;
    double a2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      a1 += d_target_score[i] * projected(i, k);
      a2 += d_source_score[i] * projected(i, k);
    }
    grad.d_attention[k] = a1;
    grad.d_attention[h + k] = a2;
  }
  double a3 = 0.0;
  for (std::size_t s = 0; s < edges.num_slots(); ++s) a3 += d_raw[s] * edges.weight[s];
  grad.d_attention[2 * h] = a3;
}

}  // namespace tasgnn::kernels::parallel
