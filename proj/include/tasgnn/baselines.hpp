#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tasgnn/graph.hpp"
#include "tasgnn/labeling.hpp"
#include "tasgnn/model.hpp"
#include "tasgnn/training.hpp"

namespace tasgnn {

struct BaselineScore {
  std::string method;
  std::string parameters;
  std::vector<double> score;  // higher = more anomalous
  std::vector<int> flag;
};

// score_i = -mean incoming normalized rating (0 without in-edges). Flags the
// ceil(pct * rated) lowest-rated nodes; ties go to the node with more
// in-ratings, then the smaller id.
BaselineScore lowest_pct_heuristic(const SignedGraph& graph, double pct = 0.05);

struct BadRankConfig {
  double damping = 0.85;
  double tol = 1e-10;
  std::size_t max_iter = 200;
  double flag_pct = 0.05;  // flag the top fraction by badness
};

// b = (1-d) e + d M b. e is uniform over nodes that received a negative
// rating; M moves badness from rater to rated along negative edges in
// proportion to |w|; raters without negative out-edges spread uniformly.
BaselineScore badrank(const SignedGraph& graph, const BadRankConfig& config = {});

// Unsigned GCN: one mean-pooled channel over every edge with weight |w|,
// sharing the TAS-GNN classifier head, loss and trainer.
ModelConfig unsigned_gcn_config(const ModelConfig& base);

struct GcnBaseline {
  TrainResult trained;
  ModelConfig config;
  BaselineScore score;
};

GcnBaseline unsigned_gcn(const SignedGraph& graph, const MessageGraph& messages,
                         const Matrix& features, const LabelSet& labels,
                         const SplitAssignment& split, const ModelConfig& base,
                         const TrainConfig& train_config, const LossConfig& loss_config);

// CSV `node_id,score,flag,method`.
void write_scores(std::ostream& out, const BaselineScore& score);
void save_scores(const std::filesystem::path& path, const BaselineScore& score);

}  // namespace tasgnn
