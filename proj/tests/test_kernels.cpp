#include <doctest.h>

#include <Eigen/Dense>
#include <omp.h>

#include "support.hpp"
#include "tasgnn/kernels.hpp"

using namespace tasgnn;
using namespace tasgnn::kernels;
using testing::max_abs_diff;
using testing::random_matrix;

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

double max_abs_diff(const Matrix& a, const Eigen::MatrixXd& b) {
  return (to_eigen(a) - b).cwiseAbs().maxCoeff();
}

MessageEdges random_edges(std::size_t n, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> node(0, static_cast<std::uint32_t>(n - 1));
  std::uniform_int_distribution<int> rating(-10, 10);
  std::vector<MessageEdges::Edge> edges;
  for (std::size_t i = 0; i < m; ++i) {
    const auto s = node(rng), t = node(rng);
    const int r = rating(rng);
    if (s != t && r != 0) edges.push_back({s, t, std::abs(r) / 10.0});
  }
  return MessageEdges::build(n, edges);
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 0.7);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Direct transcription of the aggregation rule, one target at a time.
Matrix naive_attention(const MessageEdges& e, const Matrix& p, const std::vector<double>& a,
                       double slope) {
  const std::size_t n = p.rows(), h = p.cols();
  Matrix out(n, h);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> slots;
    for (std::size_t s = 0; s < e.num_slots(); ++s)
      if (e.target[s] == i) slots.push_back(s);
    if (slots.empty()) {
      for (std::size_t c = 0; c < h; ++c) out(i, c) = elu(p(i, c));
      continue;
    }
    std::vector<double> score;
    for (std::size_t s : slots) {
      if (a.empty()) {
        score.push_back(0.0);
        continue;
      }
      double raw = a[2 * h] * e.weight[s];
      for (std::size_t c = 0; c < h; ++c) raw += a[c] * p(i, c) + a[h + c] * p(e.source[s], c);
      score.push_back(raw > 0 ? raw : slope * raw);
    }
    const double mx = *std::max_element(score.begin(), score.end());
    double z = 0;
    for (double& x : score) z += (x = std::exp(x - mx));
    for (std::size_t c = 0; c < h; ++c) {
      double acc = 0;
      for (std::size_t k = 0; k < slots.size(); ++k) acc += score[k] / z * p(e.source[slots[k]], c);
      out(i, c) = elu(acc);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("dense products match Eigen in both execution modes") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 5 + seed * 3, k = 3 + seed % 7, m = 2 + seed % 5;
    const auto a = random_matrix(n, k, seed), b = random_matrix(k, m, seed + 1);
    const auto c = random_matrix(n, m, seed + 2);
    for (Exec ex : {Exec::kSerial, Exec::kParallel}) {
      Matrix out;
      matmul(ex, a, b, out);
      CHECK(max_abs_diff(out, to_eigen(a) * to_eigen(b)) < 1e-12);
      matmul_at_b(ex, a, c, out);
      CHECK(max_abs_diff(out, to_eigen(a).transpose() * to_eigen(c)) < 1e-12);
      matmul_a_bt(ex, c, b, out);
      CHECK(max_abs_diff(out, to_eigen(c) * to_eigen(b).transpose()) < 1e-12);
    }
  }
}

TEST_CASE("sparse product matches the dense one") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 10 + seed;
    std::vector<Csr::Triplet> t;
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < 4 * n; ++i) {
      const auto r = static_cast<std::uint32_t>(rng() % n), c = static_cast<std::uint32_t>(rng() % n);
      const double v = static_cast<double>(rng() % 100) / 10.0;
      t.push_back({r, c, v});
      dense(r, c) += v;
    }
    const auto a = Csr::from_triplets(n, n, t);
    const auto x = random_matrix(n, 4, seed);
    for (Exec ex : {Exec::kSerial, Exec::kParallel}) {
      Matrix out;
      spmm(ex, a, x, out);
      CHECK(max_abs_diff(out, dense * to_eigen(x)) < 1e-12);
      spmm(ex, a.transposed(), x, out);
      CHECK(max_abs_diff(out, dense.transpose() * to_eigen(x)) < 1e-12);
    }
  }
}

TEST_CASE("message edge slots are grouped by target and sorted by source") {
  const auto e = MessageEdges::build(4, {{3, 1, 0.2}, {0, 1, 0.5}, {2, 0, 0.1}, {0, 3, 0.9}});
  CHECK(e.num_slots() == 4);
  CHECK(e.in_degree(1) == 2);
  CHECK(e.in_degree(2) == 0);
  const std::size_t s = e.in_offsets[1];
  CHECK(e.source[s] == 0);
  CHECK(e.source[s + 1] == 3);
  std::size_t fed_by_zero = e.out_offsets[1] - e.out_offsets[0];
  CHECK(fed_by_zero == 2);
}

TEST_CASE("attention forward matches the direct formula") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 8 + seed % 9, h = 1 + seed % 5;
    const auto e = random_edges(n, 3 * n, seed);
    const auto p = random_matrix(n, h, seed + 10);
    const auto a = seed % 4 == 0 ? std::vector<double>{} : random_vector(2 * h + 1, seed + 20);
    for (Exec ex : {Exec::kSerial, Exec::kParallel}) {
      AttentionForward f;
      attention_forward(ex, e, p, a, 0.2, f);
      CHECK(max_abs_diff(f.out, naive_attention(e, p, a, 0.2)) < 1e-12);
    }
  }
}

TEST_CASE("attention weights form a distribution over each neighbourhood") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const std::size_t n = 5 + seed % 20, h = 1 + seed % 6;
    const auto e = random_edges(n, 1 + seed % (4 * n), seed + 1000);
    const auto p = random_matrix(n, h, seed, 1.0 + static_cast<double>(seed % 7));
    const auto a = random_vector(2 * h + 1, seed + 5);
    AttentionForward f;
    attention_forward(Exec::kParallel, e, p, a, 0.2, f);
    for (std::size_t i = 0; i < n; ++i) {
      if (!e.in_degree(i)) continue;
      double sum = 0;
      for (std::size_t s = e.in_offsets[i]; s < e.in_offsets[i + 1]; ++s) {
        CHECK(f.alpha[s] >= 0.0);
        CHECK(f.alpha[s] <= 1.0);
        sum += f.alpha[s];
      }
      CHECK(std::abs(sum - 1.0) < 1e-12);
      if (e.in_degree(i) == 1) CHECK(f.alpha[e.in_offsets[i]] == 1.0);
    }
  }
}

TEST_CASE("attention backward matches finite differences") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t n = 7, h = 3;
    const auto e = random_edges(n, 18, seed + 3);
    auto p = random_matrix(n, h, seed);
    auto a = seed % 3 == 0 ? std::vector<double>{} : random_vector(2 * h + 1, seed + 1);
    const auto up = random_matrix(n, h, seed + 2);
    auto loss = [&]() {
      AttentionForward f;
      attention_forward(Exec::kSerial, e, p, a, 0.2, f);
      double l = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < h; ++c) l += up(i, c) * f.out(i, c);
      return l;
    };
    AttentionForward f;
    attention_forward(Exec::kSerial, e, p, a, 0.2, f);
    AttentionGrad g;
    attention_backward(Exec::kSerial, e, p, a, 0.2, f, up, g);
    const double step = 1e-6;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < h; ++c) {
        const double keep = p(i, c);
        p(i, c) = keep + step;
        const double lp = loss();
        p(i, c) = keep - step;
        const double lm = loss();
        p(i, c) = keep;
        CHECK(std::abs((lp - lm) / (2 * step) - g.d_projected(i, c)) < 1e-6);
      }
    CHECK(g.d_attention.size() == a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double keep = a[j];
      a[j] = keep + step;
      const double lp = loss();
      a[j] = keep - step;
      const double lm = loss();
      a[j] = keep;
      CHECK(std::abs((lp - lm) / (2 * step) - g.d_attention[j]) < 1e-6);
    }
  }
}

TEST_CASE("serial and parallel attention agree for any thread count") {
  for (int threads : {1, 2, 3, 8}) {
    omp_set_num_threads(threads);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const std::size_t n = 200, h = 8;
      const auto e = random_edges(n, 1500, seed);
      const auto p = random_matrix(n, h, seed);
      const auto a = random_vector(2 * h + 1, seed);
      const auto up = random_matrix(n, h, seed + 9);
      AttentionForward fs, fp;
      attention_forward(Exec::kSerial, e, p, a, 0.2, fs);
      attention_forward(Exec::kParallel, e, p, a, 0.2, fp);
      CHECK(max_abs_diff(fs.out, fp.out) < 1e-13);
      AttentionGrad gs, gp;
      attention_backward(Exec::kSerial, e, p, a, 0.2, fs, up, gs);
      attention_backward(Exec::kParallel, e, p, a, 0.2, fp, up, gp);
      CHECK(max_abs_diff(gs.d_projected, gp.d_projected) < 1e-12);
      for (std::size_t j = 0; j < a.size(); ++j)
        CHECK(std::abs(gs.d_attention[j] - gp.d_attention[j]) < 1e-10);
    }
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("parallel results do not depend on the thread count") {
  const auto e = random_edges(300, 2000, 77);
  const auto p = random_matrix(300, 16, 1);
  const auto a = random_vector(33, 2);
  const auto up = random_matrix(300, 16, 3);
  AttentionForward ref_f;
  AttentionGrad ref_g;
  omp_set_num_threads(1);
  attention_forward(Exec::kParallel, e, p, a, 0.2, ref_f);
  attention_backward(Exec::kParallel, e, p, a, 0.2, ref_f, up, ref_g);
  for (int threads : {2, 4, 7}) {
    omp_set_num_threads(threads);
    AttentionForward f;
    AttentionGrad g;
    attention_forward(Exec::kParallel, e, p, a, 0.2, f);
    attention_backward(Exec::kParallel, e, p, a, 0.2, f, up, g);
    CHECK(f.out == ref_f.out);
    CHECK(g.d_projected == ref_g.d_projected);
    CHECK(g.d_attention == ref_g.d_attention);
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("activation helpers") {
  CHECK(elu(1.5) == 1.5);
  CHECK(elu(-1.0) == doctest::Approx(std::exp(-1.0) - 1.0));
  CHECK(leaky_relu(-2.0, 0.2) == doctest::Approx(-0.4));
  CHECK(leaky_relu(3.0, 0.2) == 3.0);
}
