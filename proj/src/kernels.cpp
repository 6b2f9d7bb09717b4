#include "tasgnn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tasgnn::kernels {

double elu(double x) noexcept { return x > 0.0 ? x : std::expm1(x); }

double leaky_relu(double x, double slope) noexcept { return x > 0.0 ? x : slope * x; }

Csr Csr::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  Csr m;
  m.rows = rows;
  m.cols = cols;
  m.offsets.assign(rows + 1, 0);
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const auto& t = triplets[i];
    if (t.row >= rows || t.col >= cols) throw std::out_of_range("Csr triplet out of range");
    if (!m.indices.empty() && i > 0 && triplets[i - 1].row == t.row &&
        triplets[i - 1].col == t.col) {
      m.values.back() += t.value;
      continue;
    }
    m.indices.push_back(t.col);
    m.values.push_back(t.value);
    ++m.offsets[t.row + 1];
  }
  for (std::size_t r = 0; r < rows; ++r) m.offsets[r + 1] += m.offsets[r];
  return m;
}

Csr Csr::transposed() const {
  std::vector<Triplet> t;
  t.reserve(values.size());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k)
      t.push_back({indices[k], static_cast<std::uint32_t>(r), values[k]});
  return from_triplets(cols, rows, std::move(t));
}

MessageEdges MessageEdges::build(std::size_t num_nodes, const std::vector<Edge>& edges) {
  MessageEdges m;
  m.num_nodes = num_nodes;
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = edges[a];
    const auto& eb = edges[b];
    return ea.target != eb.target ? ea.target < eb.target : ea.source < eb.source;
  });
  m.in_offsets.assign(num_nodes + 1, 0);
  m.source.reserve(edges.size());
  m.target.reserve(edges.size());
  m.weight.reserve(edges.size());
  for (std::size_t idx : order) {
    const auto& e = edges[idx];
    if (e.source >= num_nodes || e.target >= num_nodes)
      throw std::out_of_range("message edge references a node >= num_nodes");
    m.source.push_back(e.source);
    m.target.push_back(e.target);
    m.weight.push_back(e.weight);
    ++m.in_offsets[e.target + 1];
  }
  for (std::size_t i = 0; i < num_nodes; ++i) m.in_offsets[i + 1] += m.in_offsets[i];

  m.out_offsets.assign(num_nodes + 1, 0);
  for (auto s : m.source) ++m.out_offsets[s + 1];
  for (std::size_t i = 0; i < num_nodes; ++i) m.out_offsets[i + 1] += m.out_offsets[i];
  m.out_slots.resize(m.source.size());
  std::vector<std::size_t> cursor(m.out_offsets.begin(), m.out_offsets.end() - 1);
  for (std::size_t s = 0; s < m.source.size(); ++s) m.out_slots[cursor[m.source[s]]++] = s;
  return m;
}

void matmul(Exec exec, const Matrix& a, const Matrix& b, Matrix& out) {
  exec == Exec::kParallel ? parallel::matmul(a, b, out) : serial::matmul(a, b, out);
}
void matmul_at_b(Exec exec, const Matrix& a, const Matrix& b, Matrix& out) {
  exec == Exec::kParallel ? parallel::matmul_at_b(a, b, out) : serial::matmul_at_b(a, b, out);
}
void matmul_a_bt(Exec exec, const Matrix& a, const Matrix& b, Matrix& out) {
  exec == Exec::kParallel ? parallel::matmul_a_bt(a, b, out) : serial::matmul_a_bt(a, b, out);
}
void spmm(Exec exec, const Csr& a, const Matrix& x, Matrix& out) {
  exec == Exec::kParallel ? parallel::spmm(a, x, out) : serial::spmm(a, x, out);
}
void attention_forward(Exec exec, const MessageEdges& edges, const Matrix& projected,
                       std::span<const double> attention, double slope, AttentionForward& fwd) {
  if (exec == Exec::kParallel)
    parallel::attention_forward(edges, projected, attention, slope, fwd);
  else
    serial::attention_forward(edges, projected, attention, slope, fwd);
}
void attention_backward(Exec exec, const MessageEdges& edges, const Matrix& projected,
                        std::span<const double> attention, double slope,
                        const AttentionForward& fwd, const Matrix& d_out, AttentionGrad& grad) {
  if (exec == Exec::kParallel)
    parallel::attention_backward(edges, projected, attention, slope, fwd, d_out, grad);
  else
    serial::attention_backward(edges, projected, attention, slope, fwd, d_out, grad);
}

}  // namespace tasgnn::kernels
