#include "tasgnn/labeling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include "tasgnn/error.hpp"

namespace tasgnn {

std::string_view label_name(Label label) {
  switch (label) {
    case Label::kBenign: return "benign";
    case Label::kFraud: return "fraud";
    case Label::kUnlabeled: return "unlabeled";
  }
  return "unlabeled";
}

void SeedConfig::validate(std::size_t num_nodes) const {
  if (k < 1 || k > num_nodes)
    fail(ErrorCategory::kConfig, "seed count k=" + std::to_string(k) + " must be in [1, " +
                                     std::to_string(num_nodes) + "]");
  if (!(damping > 0.0 && damping < 1.0)) fail(ErrorCategory::kConfig, "damping must be in (0,1)");
  if (!(pr_tol > 0.0)) fail(ErrorCategory::kConfig, "pr_tol must be positive");
}

std::size_t LabelSet::count(Label label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

std::vector<double> pagerank_positive(const SignedGraph& graph, const SeedConfig& config) {
  const std::size_t n = graph.num_nodes();
  if (graph.num_positive() == 0)
    fail(ErrorCategory::kData, "positive subgraph is empty; no trust structure to rank");
  if (!(config.damping > 0.0 && config.damping < 1.0))
    fail(ErrorCategory::kConfig, "damping must be in (0,1)");

  std::vector<double> out_weight(n, 0.0);
  for (NodeId v = 0; v < n; ++v)
    for (const auto& nb : graph.neighbors(v, Sign::kPositive, Direction::kOut))
      out_weight[v] += nb.weight;

  const double d = config.damping;
  const double uniform = 1.0 / static_cast<double>(n);
  std::vector<double> rank(n, uniform), next(n);
  for (std::size_t iter = 0; iter < config.pr_max_iter; ++iter) {
    double dangling = 0.0;
    for (NodeId v = 0; v < n; ++v)
      if (out_weight[v] == 0.0) dangling += rank[v];
    const double base = (1.0 - d) * uniform + d * dangling * uniform;
    // Pull formulation: each node reads its positive in-neighbours.
    for (NodeId v = 0; v < n; ++v) {
      double acc = 0.0;
      for (const auto& nb : graph.neighbors(v, Sign::kPositive, Direction::kIn))
        acc += rank[nb.node] * nb.weight / out_weight[nb.node];
      next[v] = base + d * acc;
    }
    double delta = 0.0;
    for (std::size_t v = 0; v < n; ++v) delta += std::abs(next[v] - rank[v]);
    rank.swap(next);
    if (delta < config.pr_tol) break;
  }
  const double total = std::accumulate(rank.begin(), rank.end(), 0.0);
  for (auto& r : rank) r /= total;
  return rank;
}

std::vector<NodeId> select_seeds(const std::vector<double>& scores, const SeedConfig& config) {
  if (config.k > scores.size() || config.k == 0)
    fail(ErrorCategory::kConfig, "cannot select " + std::to_string(config.k) + " seeds from " +
                                     std::to_string(scores.size()) + " nodes");
  for (double s : scores)
    if (!std::isfinite(s)) fail(ErrorCategory::kNumerical, "non-finite PageRank score");
  std::vector<NodeId> order(scores.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(config.k),
                    order.end(), [&](NodeId a, NodeId b) {
                      return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
                    });
  order.resize(config.k);
  return order;
}

LabelSet propagate_labels(const SignedGraph& graph, const std::vector<NodeId>& seeds,
                          ConflictRule conflict) {
  const std::size_t n = graph.num_nodes();
  LabelSet out;
  out.labels.assign(n, Label::kUnlabeled);
  out.provenance.assign(n, Provenance{});
  out.seeds = seeds;

  // Seeds are processed in id order so the BFS tree (and hence provenance)
  // does not depend on the order the caller listed them in.
  std::vector<NodeId> sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  std::vector<char> benign(n, 0);
  std::deque<NodeId> queue;
  for (NodeId s : sorted) {
    if (s >= n) fail(ErrorCategory::kIndex, "seed " + std::to_string(s) + " out of range");
    if (benign[s]) continue;
    benign[s] = 1;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (const auto& nb : graph.neighbors(u, Sign::kPositive, Direction::kOut)) {
      if (nb.weight < kTrustThreshold || benign[nb.node]) continue;
      benign[nb.node] = 1;
      out.provenance[nb.node] = Provenance{u, nb.weight, out.provenance[u].depth + 1};
      queue.push_back(nb.node);
    }
  }

  std::vector<char> fraud(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    // Only distrust issued by the trusted community counts.
    for (const auto& nb : graph.neighbors(v, Sign::kNegative, Direction::kIn)) {
      if (nb.weight > kDistrustThreshold || !benign[nb.node]) continue;
      if (!fraud[v]) {
        fraud[v] = 1;
        if (!benign[v] || conflict == ConflictRule::kFraudWins)
          out.provenance[v] = Provenance{nb.node, nb.weight, out.provenance[nb.node].depth + 1};
      }
    }
  }

  for (NodeId v = 0; v < n; ++v) {
    const bool is_seed = std::binary_search(sorted.begin(), sorted.end(), v);
    if (benign[v] && fraud[v] && !is_seed) {
      out.labels[v] = conflict == ConflictRule::kBenignWins ? Label::kBenign : Label::kFraud;
    } else if (benign[v]) {
      out.labels[v] = Label::kBenign;
    } else if (fraud[v]) {
      out.labels[v] = Label::kFraud;
    }
  }
  return out;
}

LabelSet generate_labels(const SignedGraph& graph, const SeedConfig& config) {
  config.validate(graph.num_nodes());
  const auto scores = pagerank_positive(graph, config);
  return propagate_labels(graph, select_seeds(scores, config), config.conflict);
}

LabelSummary label_report(const LabelSet& labels) {
  LabelSummary s;
  s.benign = labels.count(Label::kBenign);
  s.fraud = labels.count(Label::kFraud);
  s.unlabeled = labels.count(Label::kUnlabeled);
  const std::size_t labeled = s.benign + s.fraud;
  s.fraud_ratio = labeled ? static_cast<double>(s.fraud) / static_cast<double>(labeled) : 0.0;
  for (std::size_t v = 0; v < labels.size(); ++v)
    if (labels.labels[v] != Label::kUnlabeled)
      s.max_depth = std::max(s.max_depth, labels.provenance[v].depth);
  return s;
}

std::string format_label_summary(const LabelSummary& s) {
  std::ostringstream os;
  os << "benign       " << s.benign << '\n'
     << "fraud        " << s.fraud << '\n'
     << "unlabeled    " << s.unlabeled << '\n'
     << "fraud ratio  " << std::fixed << std::setprecision(4) << s.fraud_ratio << '\n'
     << "max depth    " << s.max_depth << '\n';
  return os.str();
}

void write_labels(std::ostream& out, const LabelSet& labels) {
  out << "node_id,label,labeler,weight,depth\n";
  for (std::size_t v = 0; v < labels.size(); ++v) {
    const auto& p = labels.provenance[v];
    out << v << ',' << label_name(labels.labels[v]) << ',';
    if (labels.labels[v] != Label::kUnlabeled && p.labeler) out << *p.labeler;
    out << ',';
    if (labels.labels[v] != Label::kUnlabeled && p.labeler) out << p.weight;
    out << ',' << (labels.labels[v] != Label::kUnlabeled ? p.depth : 0) << '\n';
  }
}

void save_labels(const std::filesystem::path& path, const LabelSet& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCategory::kIo, "cannot write " + path.string());
  write_labels(out, labels);
}

LabelSet read_labels(std::istream& in) {
  LabelSet out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() == 4 && line.back() == ',') f.emplace_back();
    if (f.size() != 5) fail(ErrorCategory::kParse, "labels line " + std::to_string(line_no));
    const std::size_t node = std::stoul(f[0]);
    if (node != out.labels.size())
      fail(ErrorCategory::kParse, "labels must be listed in node order (line " +
                                      std::to_string(line_no) + ")");
    Label label = Label::kUnlabeled;
    if (f[1] == "benign") label = Label::kBenign;
    else if (f[1] == "fraud") label = Label::kFraud;
    else if (f[1] != "unlabeled") fail(ErrorCategory::kParse, "unknown label '" + f[1] + "'");
    Provenance p;
    if (!f[2].empty()) p.labeler = static_cast<NodeId>(std::stoul(f[2]));
    if (!f[3].empty()) p.weight = std::stod(f[3]);
    p.depth = std::stoul(f[4]);
    out.labels.push_back(label);
    out.provenance.push_back(p);
    if (label == Label::kBenign && !p.labeler) out.seeds.push_back(static_cast<NodeId>(node));
  }
  return out;
}

LabelSet load_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::kIo, "cannot open labels " + path.string());
  return read_labels(in);
}

}  // namespace tasgnn
