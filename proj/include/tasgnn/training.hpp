#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tasgnn/graph.hpp"
#include "tasgnn/labeling.hpp"
#include "tasgnn/model.hpp"

namespace tasgnn {

struct LossConfig {
  double lambda = 0.1;
  std::optional<double> w_fraud;  // unset: |benign_train| / |fraud_train|
  std::size_t link_sample_size = 0;  // 0: every eligible edge

  void validate() const;
};

struct TrainConfig {
  double lr = 0.001;
  double weight_decay = 5e-4;
  std::size_t max_epochs = 2000;
  std::size_t patience = 20;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::array<double, 3> split_fractions{0.70, 0.15, 0.15};
  std::uint64_t split_seed = 42;
  std::vector<std::uint64_t> model_seeds{1, 2, 3};
  bool log_timing = true;
  double min_improvement = 1e-4;

  void validate() const;
};

enum class SplitRole : std::uint8_t { kNone, kTrain, kVal, kTest };

struct SplitAssignment {
  std::vector<SplitRole> role;  // per node; kNone for unlabeled nodes
  std::vector<NodeId> train, val, test;

  const std::vector<NodeId>& members(SplitRole r) const;
  // FNV-1a over the role vector, for auditing that variants share a split.
  std::uint64_t checksum() const;
};

SplitAssignment make_splits(const LabelSet& labels, const TrainConfig& config);

// Edges eligible for the link-sign loss: neither endpoint is in the test split.
std::vector<std::size_t> link_eligible_edges(const SignedGraph& graph,
                                             const SplitAssignment& split);

struct LossParts {
  double total = 0.0;
  double wbce = 0.0;
  double link = 0.0;
  double w_fraud = 1.0;
};

struct LossResult {
  LossParts parts;
  LossGrads grads;
};

double resolve_w_fraud(const LabelSet& labels, const SplitAssignment& split,
                       const LossConfig& config);

// total = wbce + lambda * link. wbce sums over the train split with fraud
// terms scaled by w_fraud; link is the mean BCE of sign(w) against
// sigmoid(z_i . z_j) over link_edges.
LossResult compute_loss(const ForwardTrace& trace, const LabelSet& labels,
                        const SplitAssignment& split, const SignedGraph& graph,
                        const LossConfig& config, const std::vector<std::size_t>& link_edges);

// Convenience overload using every eligible edge.
LossResult compute_loss(const ForwardTrace& trace, const LabelSet& labels,
                        const SplitAssignment& split, const SignedGraph& graph,
                        const LossConfig& config);

struct EpochRecord {
  std::size_t epoch = 0;
  double wbce = 0.0;
  double link = 0.0;
  double total = 0.0;
  double val_auc = 0.0;
  double val_f1 = 0.0;
  double lr = 0.0;
  double elapsed_ms = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val_auc = 0.0;
};

void write_train_log(std::ostream& out, const TrainLog& log, bool with_timing = true);

struct TrainResult {
  ModelParams best;
  TrainLog log;
};

// Full-graph training with AdamW and early stopping on validation AUC.
TrainResult train(const SignedGraph& graph, const MessageGraph& messages, const Matrix& features,
                  const LabelSet& labels, const SplitAssignment& split,
                  const ModelConfig& model_config, const TrainConfig& train_config,
                  const LossConfig& loss_config);

TrainResult train(const SignedGraph& graph, const Matrix& features, const LabelSet& labels,
                  const ModelConfig& model_config, const TrainConfig& train_config,
                  const LossConfig& loss_config);

// Eval-mode fraud probabilities for every node.
std::vector<double> predict(const ModelParams& params, const ModelConfig& config,
                            const MessageGraph& messages, const Matrix& features);

// Adam with decoupled weight decay on tensors flagged `decay`.
class AdamW {
 public:
  AdamW(const ModelParams& like, const TrainConfig& config);
  void step(ModelParams& params, const ModelParams& grads);

 private:
  TrainConfig config_;
  std::size_t t_ = 0;
  ModelParams m_;
  ModelParams v_;
};

}  // namespace tasgnn
