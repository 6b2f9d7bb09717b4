#include "tasgnn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include "tasgnn/error.hpp"

namespace tasgnn {

BaselineScore lowest_pct_heuristic(const SignedGraph& graph, double pct) {
  if (!(pct > 0.0 && pct < 1.0)) fail(ErrorCategory::kConfig, "pct must be in (0,1)");
  const std::size_t n = graph.num_nodes();
  std::vector<double> sum(n, 0.0);
  std::vector<std::size_t> in_count(n, 0);
  for (const auto& e : graph.edges()) {
    sum[e.target] += e.weight();
    ++in_count[e.target];
  }
  BaselineScore out;
  out.method = "lowest_pct";
  std::ostringstream params;
  params << "pct=" << pct;
  out.parameters = params.str();
  out.score.assign(n, 0.0);
  out.flag.assign(n, 0);
  std::vector<NodeId> rated;
  std::vector<double> mean(n, 0.0);
  for (NodeId v = 0; v < n; ++v) {
    if (!in_count[v]) continue;
    mean[v] = sum[v] / static_cast<double>(in_count[v]);
    out.score[v] = -mean[v];
    rated.push_back(v);
  }
  std::sort(rated.begin(), rated.end(), [&](NodeId a, NodeId b) {
    if (mean[a] != mean[b]) return mean[a] < mean[b];
    if (in_count[a] != in_count[b]) return in_count[a] > in_count[b];
    return a < b;
  });
  const auto flagged = static_cast<std::size_t>(std::ceil(pct * static_cast<double>(rated.size()) - 1e-12));
  for (std::size_t i = 0; i < flagged && i < rated.size(); ++i) out.flag[rated[i]] = 1;
  return out;
}

BaselineScore badrank(const SignedGraph& graph, const BadRankConfig& config) {
  if (graph.num_negative() == 0)
    fail(ErrorCategory::kData, "BadRank needs at least one negative edge");
  if (!(config.damping > 0.0 && config.damping < 1.0))
    fail(ErrorCategory::kConfig, "damping must be in (0,1)");
  const std::size_t n = graph.num_nodes();
  std::vector<double> teleport(n, 0.0), out_weight(n, 0.0);
  std::size_t targets = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (graph.degree(v, Sign::kNegative, Direction::kIn) > 0) {
      teleport[v] = 1.0;
      ++targets;
    }
    for (const auto& nb : graph.neighbors(v, Sign::kNegative, Direction::kOut))
      out_weight[v] += std::abs(nb.weight);
  }
  for (auto& t : teleport) t /= static_cast<double>(targets);

  const double d = config.damping;
  const double uniform = 1.0 / static_cast<double>(n);
  std::vector<double> b(teleport), next(n);
  for (std::size_t iter = 0; iter < config.max_iter; ++iter) {
    double dangling = 0.0;
    for (NodeId v = 0; v < n; ++v)
      if (out_weight[v] == 0.0) dangling += b[v];
    for (NodeId v = 0; v < n; ++v) {
      double acc = 0.0;
      for (const auto& nb : graph.neighbors(v, Sign::kNegative, Direction::kIn))
        acc += b[nb.node] * std::abs(nb.weight) / out_weight[nb.node];
      next[v] = (1.0 - d) * teleport[v] + d * (acc + dangling * uniform);
    }
    double delta = 0.0;
    for (std::size_t v = 0; v < n; ++v) delta += std::abs(next[v] - b[v]);
    b.swap(next);
    if (delta < config.tol) break;
  }
  const double total = std::accumulate(b.begin(), b.end(), 0.0);
  for (auto& x : b) x /= total;

  BaselineScore out;
  out.method = "badrank";
  std::ostringstream params;
  params << "damping=" << d << ";flag_pct=" << config.flag_pct;
  out.parameters = params.str();
  out.score = b;
  out.flag.assign(n, 0);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::sort(order.begin(), order.end(),
            [&](NodeId x, NodeId y) { return b[x] != b[y] ? b[x] > b[y] : x < y; });
  const auto flagged = static_cast<std::size_t>(std::ceil(config.flag_pct * static_cast<double>(n) - 1e-12));
  for (std::size_t i = 0; i < flagged && i < n; ++i) out.flag[order[i]] = 1;
  return out;
}

ModelConfig unsigned_gcn_config(const ModelConfig& base) {
  ModelConfig c = base;
  c.channels = ChannelMode::kUnsigned;
  c.attention = false;
  return c;
}

GcnBaseline unsigned_gcn(const SignedGraph& graph, const MessageGraph& messages,
                         const Matrix& features, const LabelSet& labels,
                         const SplitAssignment& split, const ModelConfig& base,
                         const TrainConfig& train_config, const LossConfig& loss_config) {
  GcnBaseline out;
  out.config = unsigned_gcn_config(base);
  out.trained = train(graph, messages, features, labels, split, out.config, train_config, loss_config);
  out.score.method = "unsigned_gcn";
  out.score.parameters = "seed=" + std::to_string(base.seed);
  out.score.score = predict(out.trained.best, out.config, messages, features);
  out.score.flag.resize(out.score.score.size());
  for (std::size_t i = 0; i < out.score.score.size(); ++i)
    out.score.flag[i] = out.score.score[i] >= 0.5 ? 1 : 0;
  return out;
}

void write_scores(std::ostream& out, const BaselineScore& score) {
  out << "node_id,score,flag,method\n" << std::setprecision(17);
  for (std::size_t v = 0; v < score.score.size(); ++v)
    out << v << ',' << score.score[v] << ',' << score.flag[v] << ',' << score.method << '\n';
}

void save_scores(const std::filesystem::path& path, const BaselineScore& score) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCategory::kIo, "cannot write " + path.string());
  write_scores(out, score);
}

}  // namespace tasgnn
