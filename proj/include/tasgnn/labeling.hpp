#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tasgnn/graph.hpp"

namespace tasgnn {

enum class Label : int { kBenign = 0, kFraud = 1, kUnlabeled = -1 };

std::string_view label_name(Label label);

enum class ConflictRule { kBenignWins, kFraudWins };

struct SeedConfig {
  std::size_t k = 10;
  double damping = 0.85;
  double pr_tol = 1e-10;
  std::size_t pr_max_iter = 200;
  ConflictRule conflict = ConflictRule::kBenignWins;

  void validate(std::size_t num_nodes) const;
};

// Why a node carries its label: the rater that certified it, the weight of the
// certifying edge and the number of trust hops from the seed set.
struct Provenance {
  std::optional<NodeId> labeler;
  double weight = 0.0;
  std::size_t depth = 0;
};

struct LabelSet {
  std::vector<Label> labels;
  std::vector<NodeId> seeds;
  std::vector<Provenance> provenance;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t count(Label label) const;
};

// Power iteration on the positive subgraph; transitions are proportional to
// the normalized positive weight. Dangling mass is spread uniformly.
std::vector<double> pagerank_positive(const SignedGraph& graph, const SeedConfig& config);

// Top-k by score, descending; equal scores go to the smaller id.
std::vector<NodeId> select_seeds(const std::vector<double>& scores, const SeedConfig& config);

inline constexpr double kTrustThreshold = 0.5;
inline constexpr double kDistrustThreshold = -0.5;

LabelSet propagate_labels(const SignedGraph& graph, const std::vector<NodeId>& seeds,
                          ConflictRule conflict = ConflictRule::kBenignWins);

// Convenience: PageRank, seed selection and propagation in one call.
LabelSet generate_labels(const SignedGraph& graph, const SeedConfig& config);

struct LabelSummary {
  std::size_t benign = 0;
  std::size_t fraud = 0;
  std::size_t unlabeled = 0;
  double fraud_ratio = 0.0;  // fraud / (benign + fraud)
  std::size_t max_depth = 0;
};

LabelSummary label_report(const LabelSet& labels);
std::string format_label_summary(const LabelSummary& summary);

// CSV `node_id,label,labeler,weight,depth`; labeler is empty for seeds and
// unlabeled nodes.
void write_labels(std::ostream& out, const LabelSet& labels);
void save_labels(const std::filesystem::path& path, const LabelSet& labels);
LabelSet read_labels(std::istream& in);
LabelSet load_labels(const std::filesystem::path& path);

}  // namespace tasgnn
