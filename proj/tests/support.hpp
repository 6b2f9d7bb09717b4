#pragma once

// Shared generators and reference implementations for the test binaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "tasgnn/graph.hpp"
#include "tasgnn/matrix.hpp"

namespace tasgnn::testing {

inline std::vector<std::int64_t> identity_ids(std::size_t n) {
  std::vector<std::int64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::int64_t>(i);
  return ids;
}

// Random signed digraph without self loops or parallel edges. Ratings are
// drawn from [-10,10] \ {0} with `negative_share` of them negative.
inline SignedGraph random_graph(std::size_t n, std::size_t m, std::uint64_t seed,
                                double negative_share = 0.3) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> node(0, n - 1);
  std::uniform_int_distribution<int> mag(1, 10);
  std::bernoulli_distribution neg(negative_share);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<EdgeRecord> edges;
  const std::size_t cap = n * (n - 1);
  while (edges.size() < std::min(m, cap)) {
    const std::size_t s = node(rng), t = node(rng);
    if (s == t || !seen.insert({s, t}).second) continue;
    const int r = neg(rng) ? -mag(rng) : mag(rng);
    edges.push_back({static_cast<NodeId>(s), static_cast<NodeId>(t), r,
                     static_cast<std::int64_t>(edges.size())});
  }
  return SignedGraph::from_edges(n, std::move(edges), identity_ids(n));
}

inline SignedGraph make_graph(std::size_t n, std::vector<EdgeRecord> edges) {
  return SignedGraph::from_edges(n, std::move(edges), identity_ids(n));
}

// Relabels node v as perm[v].
inline SignedGraph permute_graph(const SignedGraph& g, const std::vector<NodeId>& perm) {
  std::vector<EdgeRecord> edges;
  for (const auto& e : g.edges())
    edges.push_back({perm[e.source], perm[e.target], e.raw_rating, e.timestamp});
  return make_graph(g.num_nodes(), std::move(edges));
}

inline std::vector<NodeId> random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<NodeId> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<NodeId>(i);
  std::mt19937_64 rng(seed);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

inline Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, scale);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

}  // namespace tasgnn::testing
