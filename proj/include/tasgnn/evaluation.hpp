#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "tasgnn/features.hpp"
#include "tasgnn/graph.hpp"
#include "tasgnn/labeling.hpp"
#include "tasgnn/metrics.hpp"
#include "tasgnn/model.hpp"
#include "tasgnn/training.hpp"

namespace tasgnn {

struct EvalReport {
  std::string method;
  std::string split;
  std::uint64_t seed = 0;
  double auc_roc = 0.0;
  double macro_f1 = 0.0;
  std::array<ClassStats, 2> per_class{};
  ConfusionMatrix confusion;
};

// Scores and hard predictions restricted to `nodes`; labels must be benign or fraud there.
EvalReport evaluate_scores(const std::string& method, const std::string& split_name,
                           const std::vector<double>& scores, const std::vector<int>& preds,
                           const LabelSet& labels, const std::vector<NodeId>& nodes);

// Thresholds probabilities at 0.5.
EvalReport evaluate_probabilities(const std::string& method, const std::string& split_name,
                                  const std::vector<double>& probs, const LabelSet& labels,
                                  const std::vector<NodeId>& nodes);

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // population
  double median = 0.0;
};

MetricSummary summarize(const std::vector<double>& values);

struct MethodSummary {
  std::string method;
  std::size_t n_seeds = 0;
  MetricSummary auc;
  MetricSummary f1;
};

std::vector<MethodSummary> aggregate(const std::vector<EvalReport>& reports);

struct AblationSuite {
  std::vector<EvalReport> runs;            // one per (variant, seed), test split
  std::vector<MethodSummary> summary;      // one per variant
  std::vector<std::uint64_t> split_checksums;  // one per run, same order as runs
  std::vector<TrainLog> logs;                  // one per run, same order as runs
  std::vector<ModelParams> full_params;        // per seed, when requested
  // Relative drop of the median versus the full model, in percent.
  struct Drop {
    std::string variant;
    double auc_pct = 0.0;
    double f1_pct = 0.0;
  };
  std::vector<Drop> drops;
};

struct AblationInputs {
  const SignedGraph* graph = nullptr;
  const FeatureMatrix* features = nullptr;
  const LabelSet* labels = nullptr;
  ModelConfig model;
  TrainConfig train;
  LossConfig loss;
  std::vector<AblationKind> variants{AblationKind::kFull, AblationKind::kNoNegativeChannel,
                                     AblationKind::kNoAttention, AblationKind::kNoStatusFeatures};
  std::uint64_t random_feature_seed = 99;
  bool keep_full_params = false;
};

AblationSuite run_ablation_suite(const AblationInputs& inputs,
                                 const std::vector<std::uint64_t>& seeds);

// Top-2 principal components of the centered rows.
Matrix pca_2d(const Matrix& embeddings);

struct SeparationStats {
  double centroid_distance = 0.0;       // |c_fraud - c_benign|
  double mean_intra_distance = 0.0;     // mean over classes of mean pairwise distance
  double mean_intra_to_centroid = 0.0;  // mean distance of a point to its class centroid
  bool separated() const noexcept { return centroid_distance > mean_intra_distance; }
};

SeparationStats separation(const Matrix& embeddings, const LabelSet& labels);

struct EmbeddingExport {
  Matrix z;
  Matrix projection;
  SeparationStats stats;
};

EmbeddingExport export_embeddings(const ModelParams& params, const ModelConfig& config,
                                  const MessageGraph& messages, const Matrix& features,
                                  const LabelSet& labels);

void write_embeddings(std::ostream& out, const Matrix& z, const LabelSet& labels);
void write_projection(std::ostream& out, const Matrix& projection, const LabelSet& labels);

// Reference rows from the published comparison table, rendered as a
// separately marked column.
struct ReferenceRow {
  std::string category;
  std::string method;
  double auc;
  double f1;
  bool implemented;  // a measured row exists in this toolkit
};
const std::vector<ReferenceRow>& reference_table();

struct TableRow {
  std::string category;
  std::string method;
  MethodSummary measured;
  bool has_measured = false;
  double ref_auc = -1.0;
  double ref_f1 = -1.0;
};

std::string render_comparison_table(const std::vector<TableRow>& rows);
std::string render_ablation_table(const AblationSuite& suite);

nlohmann::ordered_json to_json(const EvalReport& r);
nlohmann::ordered_json to_json(const MethodSummary& s);

}  // namespace tasgnn
