#pragma once

// Numerical kernels behind feature construction and message passing.
//
// Every kernel exists twice: `serial::` is a straightforward loop nest kept as
// the reference for tests, `parallel::` is the OpenMP version the model runs.
// The parallel variants only ever write disjoint output rows (gather rather
// than scatter), so results do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tasgnn/matrix.hpp"

namespace tasgnn::kernels {

enum class Exec { kSerial, kParallel };

// Compressed sparse rows; column indices ascending within each row.
struct Csr {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    double value;
  };
  static Csr from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
  Csr transposed() const;
};

// In-edge lists of one message-passing channel. Slot s is the s-th entry of
// the in-CSR: edge source[s] -> target[s] carrying weight[s]. The out view
// lists, per source node, the slots it feeds.
struct MessageEdges {
  std::size_t num_nodes = 0;
  std::vector<std::size_t> in_offsets;
  std::vector<std::uint32_t> source;
  std::vector<std::uint32_t> target;
  std::vector<double> weight;
  std::vector<std::size_t> out_offsets;
  std::vector<std::size_t> out_slots;

  std::size_t num_slots() const noexcept { return source.size(); }
  std::size_t in_degree(std::size_t node) const noexcept {
    return in_offsets[node + 1] - in_offsets[node];
  }

  struct Edge {
    std::uint32_t source;
    std::uint32_t target;
    double weight;
  };
  // Slots within a target are ordered by ascending source, then input order.
  static MessageEdges build(std::size_t num_nodes, const std::vector<Edge>& edges);
};

// Attention-weighted aggregation over one channel.
//   raw_s   = a[0:h]·P_target + a[h:2h]·P_source + a[2h]·weight_s
//   alpha_s = softmax over the target's slots of LeakyReLU(raw_s)
//   agg_i   = sum_s alpha_s P_source   (P_i itself when i has no in-slots)
//   out_i   = ELU(agg_i)
// An empty `attention` span selects uniform mean pooling; raw is then unused.
struct AttentionForward {
  std::vector<double> raw;
  std::vector<double> alpha;
  Matrix agg;
  Matrix out;
};

struct AttentionGrad {
  Matrix d_projected;
  std::vector<double> d_attention;
};

double elu(double x) noexcept;
double leaky_relu(double x, double slope) noexcept;

namespace serial {
void matmul(const Matrix& a, const Matrix& b, Matrix& out);       // a * b
void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out);  // a^T * b
void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out);  // a * b^T
void spmm(const Csr& a, const Matrix& x, Matrix& out);
void attention_forward(const MessageEdges& edges, const Matrix& projected,
                       std::span<const double> attention, double slope, AttentionForward& fwd);
void attention_backward(const MessageEdges& edges, const Matrix& projected,
                        std::span<const double> attention, double slope,
                        const AttentionForward& fwd, const Matrix& d_out, AttentionGrad& grad);
}  // namespace serial

namespace parallel {
void matmul(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out);
void spmm(const Csr& a, const Matrix& x, Matrix& out);
void attention_forward(const MessageEdges& edges, const Matrix& projected,
                       std::span<const double> attention, double slope, AttentionForward& fwd);
void attention_backward(const MessageEdges& edges, const Matrix& projected,
                        std::span<const double> attention, double slope,
                        const AttentionForward& fwd, const Matrix& d_out, AttentionGrad& grad);
}  // namespace parallel

// Dispatch helpers used by the library code.
void matmul(Exec exec, const Matrix& a, const Matrix& b, Matrix& out);
void matmul_at_b(Exec exec, const Matrix& a, const Matrix& b, Matrix& out);
void matmul_a_bt(Exec exec, const Matrix& a, const Matrix& b, Matrix& out);
void spmm(Exec exec, const Csr& a, const Matrix& x, Matrix& out);
void attention_forward(Exec exec, const MessageEdges& edges, const Matrix& projected,
                       std::span<const double> attention, double slope, AttentionForward& fwd);
void attention_backward(Exec exec, const MessageEdges& edges, const Matrix& projected,
                        std::span<const double> attention, double slope,
                        const AttentionForward& fwd, const Matrix& d_out, AttentionGrad& grad);

}  // namespace tasgnn::kernels
