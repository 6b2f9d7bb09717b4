#include "tasgnn/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>

#include "tasgnn/error.hpp"
#include "tasgnn/linalg.hpp"

namespace tasgnn {

void SvdConfig::validate(std::size_t num_nodes) const {
  if (k_svd < 1 || k_svd > 64)
    fail(ErrorCategory::kConfig, "k_svd must be in [1, 64], got " + std::to_string(k_svd));
  if (k_svd > num_nodes)
    fail(ErrorCategory::kConfig, "k_svd=" + std::to_string(k_svd) + " exceeds node count " +
                                     std::to_string(num_nodes));
  if (iters < 2) fail(ErrorCategory::kConfig, "svd iters must be >= 2");
}

Matrix signed_degree_stats(const SignedGraph& graph) {
  const std::size_t n = graph.num_nodes();
  Matrix out(n, 4);
  for (NodeId v = 0; v < n; ++v) {
    out(v, 0) = static_cast<double>(graph.degree(v, Sign::kPositive, Direction::kIn));
    out(v, 1) = static_cast<double>(graph.degree(v, Sign::kNegative, Direction::kIn));
    out(v, 2) = static_cast<double>(graph.degree(v, Sign::kPositive, Direction::kOut));
    out(v, 3) = static_cast<double>(graph.degree(v, Sign::kNegative, Direction::kOut));
  }
  return out;
}

Matrix rating_moments(const SignedGraph& graph) {
  const std::size_t n = graph.num_nodes();
  std::vector<double> sum(n, 0.0), sum_sq(n, 0.0);
  std::vector<std::size_t> count(n, 0);
  for (const auto& e : graph.edges()) {
    sum[e.target] += e.weight();
    ++count[e.target];
  }
  Matrix out(n, 2);
  for (std::size_t v = 0; v < n; ++v)
    if (count[v]) out(v, 0) = sum[v] / static_cast<double>(count[v]);
  // Second pass around the mean keeps the variance free of cancellation.
  for (const auto& e : graph.edges()) {
    const double d = e.weight() - out(e.target, 0);
    sum_sq[e.target] += d * d;
  }
  for (std::size_t v = 0; v < n; ++v)
    if (count[v]) out(v, 1) = sum_sq[v] / static_cast<double>(count[v]);
  return out;
}

kernels::Csr unsigned_adjacency(const SignedGraph& graph) {
  std::vector<kernels::Csr::Triplet> t;
  t.reserve(graph.num_edges());
  for (const auto& e : graph.edges()) t.push_back({e.source, e.target, std::abs(e.weight())});
  return kernels::Csr::from_triplets(graph.num_nodes(), graph.num_nodes(), std::move(t));
}

SvdResult randomized_svd(const SignedGraph& graph, const SvdConfig& config, kernels::Exec exec) {
  const std::size_t n = graph.num_nodes();
  config.validate(n);
  const std::size_t k = config.k_svd;
  const std::size_t l = std::min(n, k + config.oversample);

  const kernels::Csr a = unsigned_adjacency(graph);
  const kernels::Csr at = a.transposed();

  Matrix omega(n, l);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& x : omega.data()) x = normal(rng);

  Matrix q, z;
  kernels::spmm(exec, a, omega, q);
  linalg::orthonormalize(q);
  for (std::size_t it = 0; it < config.iters; ++it) {
    kernels::spmm(exec, at, q, z);
    linalg::orthonormalize(z);
    kernels::spmm(exec, a, z, q);
    linalg::orthonormalize(q);
  }
  // B^T = A^T Q, so B B^T = (A^T Q)^T (A^T Q).
  Matrix bt;
  kernels::spmm(exec, at, q, bt);
  Matrix gram;
  kernels::matmul_at_b(exec, bt, bt, gram);
  std::vector<double> lambda;
  Matrix eigvec;
  linalg::symmetric_eigen(gram, lambda, eigvec);

  SvdResult out;
  out.u = Matrix(n, k);
  out.v = Matrix(n, k);
  out.sigma.assign(k, 0.0);
  Matrix u_full, v_full;
  kernels::matmul(exec, q, eigvec, u_full);
  kernels::matmul(exec, bt, eigvec, v_full);
  for (std::size_t c = 0; c < k; ++c) {
    const double sigma = std::sqrt(std::max(lambda[c], 0.0));
    out.sigma[c] = sigma;
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < n; ++r)
      if (std::abs(u_full(r, c)) > best + 1e-14) {
        best = std::abs(u_full(r, c));
        arg = r;
      }
    const double sgn = u_full(arg, c) < 0.0 ? -1.0 : 1.0;
    const bool live = sigma > 1e-12 * std::max(1.0, std::sqrt(std::max(lambda[0], 0.0)));
    for (std::size_t r = 0; r < n; ++r) {
      out.u(r, c) = live ? sgn * u_full(r, c) : 0.0;
      out.v(r, c) = live ? sgn * v_full(r, c) / sigma : 0.0;
    }
    if (!live) out.sigma[c] = 0.0;
  }
  return out;
}

Matrix truncated_svd(const SignedGraph& graph, const SvdConfig& config, kernels::Exec exec) {
  SvdResult r = randomized_svd(graph, config, exec);
  for (std::size_t row = 0; row < r.u.rows(); ++row)
    for (std::size_t c = 0; c < r.u.cols(); ++c) r.u(row, c) *= r.sigma[c];
  return std::move(r.u);
}

void standardize_columns(Matrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += m(r, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) var += (m(r, c) - mean) * (m(r, c) - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    const bool constant = !(sd > 1e-12 * std::max(1.0, std::abs(mean)));
    for (std::size_t r = 0; r < n; ++r) m(r, c) = constant ? 0.0 : (m(r, c) - mean) / sd;
  }
}

FeatureMatrix assemble_features(const SignedGraph& graph, const SvdConfig& config) {
  config.validate(graph.num_nodes());
  FeatureMatrix f;
  f.data = hconcat(hconcat(signed_degree_stats(graph), rating_moments(graph)),
                   truncated_svd(graph, config));
  standardize_columns(f.data);
  for (const auto& d : f.data.data())
    if (!std::isfinite(d)) fail(ErrorCategory::kNumerical, "non-finite feature value");
  f.column_schema = {"d_in_pos", "d_in_neg", "d_out_pos", "d_out_neg", "mu", "sigma2"};
  for (std::size_t j = 1; j <= config.k_svd; ++j) f.column_schema.push_back("svd_" + std::to_string(j));
  return f;
}

FeatureMatrix random_features(std::size_t rows, std::size_t dim, std::uint64_t seed) {
  FeatureMatrix f;
  f.data = Matrix(rows, dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& x : f.data.data()) x = normal(rng);
  for (std::size_t j = 0; j < dim; ++j) f.column_schema.push_back("rand_" + std::to_string(j + 1));
  return f;
}

void write_features(std::ostream& out, const FeatureMatrix& features) {
  out << "node_id";
  for (const auto& name : features.column_schema) out << ',' << name;
  out << '\n' << std::setprecision(17);
  for (std::size_t r = 0; r < features.rows(); ++r) {
    out << r;
    for (double v : features.data.row(r)) out << ',' << v;
    out << '\n';
  }
}

void save_features(const std::filesystem::path& path, const FeatureMatrix& features) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCategory::kIo, "cannot write " + path.string());
  write_features(out, features);
}

}  // namespace tasgnn
