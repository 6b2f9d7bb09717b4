#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tasgnn/graph.hpp"
#include "tasgnn/kernels.hpp"
#include "tasgnn/matrix.hpp"

namespace tasgnn {

struct SvdConfig {
  std::size_t k_svd = 32;
  std::size_t iters = 30;
  std::size_t oversample = 10;
  std::uint64_t seed = 7;

  void validate(std::size_t num_nodes) const;
};

struct FeatureMatrix {
  Matrix data;
  std::vector<std::string> column_schema;

  std::size_t rows() const noexcept { return data.rows(); }
  std::size_t dim() const noexcept { return data.cols(); }
};

// Columns: [d_in+, d_in-, d_out+, d_out-].
Matrix signed_degree_stats(const SignedGraph& graph);

// Columns: [mean, population variance] of incoming normalized ratings.
Matrix rating_moments(const SignedGraph& graph);

struct SvdResult {
  Matrix u;                   // N x k, unit columns
  std::vector<double> sigma;  // descending
  Matrix v;                   // N x k
};

// Sparse |A| (entrywise absolute normalized weights) as CSR.
kernels::Csr unsigned_adjacency(const SignedGraph& graph);

// Randomized subspace iteration on |A|. Each left singular vector is signed
// so that its largest-magnitude entry is positive; v follows u.
SvdResult randomized_svd(const SignedGraph& graph, const SvdConfig& config,
                         kernels::Exec exec = kernels::Exec::kParallel);

// U_k * Sigma_k.
Matrix truncated_svd(const SignedGraph& graph, const SvdConfig& config,
                     kernels::Exec exec = kernels::Exec::kParallel);

// Zero mean, unit population variance per column; constant columns become 0.
void standardize_columns(Matrix& m);

FeatureMatrix assemble_features(const SignedGraph& graph, const SvdConfig& config);

// Fixed standard-normal features of the given shape, for the ablation that
// strips the topological descriptors.
FeatureMatrix random_features(std::size_t rows, std::size_t dim, std::uint64_t seed);

void write_features(std::ostream& out, const FeatureMatrix& features);
void save_features(const std::filesystem::path& path, const FeatureMatrix& features);

}  // namespace tasgnn
