#include "tasgnn/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "tasgnn/error.hpp"
#include "tasgnn/linalg.hpp"

namespace tasgnn {

EvalReport evaluate_scores(const std::string& method, const std::string& split_name,
                           const std::vector<double>& scores, const std::vector<int>& preds,
                           const LabelSet& labels, const std::vector<NodeId>& nodes) {
  std::vector<double> s;
  std::vector<int> p, y;
  for (NodeId v : nodes) {
    if (labels.labels[v] == Label::kUnlabeled)
      fail(ErrorCategory::kData, "evaluation split contains unlabeled node " + std::to_string(v));
    s.push_back(scores[v]);
    p.push_back(preds[v]);
    y.push_back(labels.labels[v] == Label::kFraud ? 1 : 0);
  }
  EvalReport r;
  r.method = method;
  r.split = split_name;
  r.auc_roc = auc_roc(s, y);
  r.confusion = confusion(p, y);
  r.per_class = per_class_stats(r.confusion);
  r.macro_f1 = 0.5 * (r.per_class[0].f1 + r.per_class[1].f1);
  return r;
}

EvalReport evaluate_probabilities(const std::string& method, const std::string& split_name,
                                  const std::vector<double>& probs, const LabelSet& labels,
                                  const std::vector<NodeId>& nodes) {
  std::vector<int> preds(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) preds[i] = probs[i] >= 0.5 ? 1 : 0;
  return evaluate_scores(method, split_name, probs, preds, labels, nodes);
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  for (double v : values) s.std += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(s.std / n);
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return s;
}

std::vector<MethodSummary> aggregate(const std::vector<EvalReport>& reports) {
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_method;
  for (const auto& r : reports) {
    if (!by_method.count(r.method)) order.push_back(r.method);
    by_method[r.method].first.push_back(r.auc_roc);
    by_method[r.method].second.push_back(r.macro_f1);
  }
  std::vector<MethodSummary> out;
  for (const auto& m : order) {
    const auto& [auc, f1] = by_method[m];
    out.push_back(MethodSummary{m, auc.size(), summarize(auc), summarize(f1)});
  }
  return out;
}

AblationSuite run_ablation_suite(const AblationInputs& in, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) fail(ErrorCategory::kConfig, "ablation suite needs at least one seed");
  if (!in.graph || !in.features || !in.labels)
    fail(ErrorCategory::kConfig, "ablation suite inputs are incomplete");
  const auto messages = MessageGraph::build(*in.graph);
  const auto split = make_splits(*in.labels, in.train);
  const auto random =
      random_features(in.features->rows(), in.features->dim(), in.random_feature_seed);

  AblationSuite suite;
  for (std::uint64_t seed : seeds) {
    for (AblationKind kind : in.variants) {
      Wiring wiring = ablation_variant(in.model, kind);
      wiring.config.seed = seed;
      const Matrix& x = wiring.random_features ? random.data : in.features->data;
      const auto trained =
          train(*in.graph, messages, x, *in.labels, split, wiring.config, in.train, in.loss);
      const auto probs = predict(trained.best, wiring.config, messages, x);
      auto report = evaluate_probabilities(std::string(ablation_name(kind)), "test", probs,
                                           *in.labels, split.test);
      report.seed = seed;
      suite.runs.push_back(report);
      suite.split_checksums.push_back(split.checksum());
      suite.logs.push_back(trained.log);
      if (in.keep_full_params && kind == AblationKind::kFull) suite.full_params.push_back(trained.best);
    }
  }
  suite.summary = aggregate(suite.runs);
  const auto full = std::find_if(suite.summary.begin(), suite.summary.end(),
                                 [](const MethodSummary& s) { return s.method == "full"; });
  if (full != suite.summary.end()) {
    for (const auto& s : suite.summary) {
      if (s.method == "full") continue;
      const double auc_drop = 100.0 * (full->auc.median - s.auc.median) / full->auc.median;
      const double f1_drop =
          full->f1.median > 0 ? 100.0 * (full->f1.median - s.f1.median) / full->f1.median : 0.0;
      suite.drops.push_back({s.method, auc_drop, f1_drop});
    }
  }
  return suite;
}

Matrix pca_2d(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  // Shift by the first row before taking the mean so constant columns
  // center to exact zeros.
  Matrix centered = x;
  for (std::size_t c = 0; c < d && n > 0; ++c) {
    const double origin = x(0, c);
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += (centered(r, c) -= origin);
    mean /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) centered(r, c) -= mean;
  }
  Matrix cov(d, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) cov(a, b) += centered(r, a) * centered(r, b);
  std::vector<double> values;
  Matrix vectors;
  linalg::symmetric_eigen(cov, values, vectors);
  Matrix out(n, 2);
  for (std::size_t comp = 0; comp < std::min<std::size_t>(2, d); ++comp) {
    std::size_t arg = 0;
    for (std::size_t a = 1; a < d; ++a)
      if (std::abs(vectors(a, comp)) > std::abs(vectors(arg, comp)) + 1e-14) arg = a;
    const double sgn = vectors(arg, comp) < 0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) {
      double p = 0.0;
      for (std::size_t a = 0; a < d; ++a) p += centered(r, a) * vectors(a, comp);
      out(r, comp) = sgn * p;
    }
  }
  return out;
}

SeparationStats separation(const Matrix& z, const LabelSet& labels) {
  std::array<std::vector<NodeId>, 2> members;
  for (NodeId v = 0; v < labels.size(); ++v) {
    if (labels.labels[v] == Label::kBenign) members[0].push_back(v);
    if (labels.labels[v] == Label::kFraud) members[1].push_back(v);
  }
  if (members[0].empty() || members[1].empty())
    fail(ErrorCategory::kData, "separation needs both classes");
  const std::size_t d = z.cols();
  auto dist = [&](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
  };
  std::array<std::vector<double>, 2> centroid{std::vector<double>(d, 0.0),
                                              std::vector<double>(d, 0.0)};
  SeparationStats s;
  for (int c = 0; c < 2; ++c) {
    for (NodeId v : members[c])
      for (std::size_t k = 0; k < d; ++k) centroid[c][k] += z(v, k);
    for (auto& x : centroid[c]) x /= static_cast<double>(members[c].size());
  }
  s.centroid_distance = dist(centroid[0], centroid[1]);
  for (int c = 0; c < 2; ++c) {
    const auto& m = members[c];
    double pair_sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = i + 1; j < m.size(); ++j) {
        pair_sum += dist(z.row(m[i]), z.row(m[j]));
        ++pairs;
      }
    s.mean_intra_distance += (pairs ? pair_sum / static_cast<double>(pairs) : 0.0) / 2.0;
    double to_c = 0.0;
    for (NodeId v : m) to_c += dist(z.row(v), centroid[c]);
    s.mean_intra_to_centroid += to_c / static_cast<double>(m.size()) / 2.0;
  }
  return s;
}

EmbeddingExport export_embeddings(const ModelParams& params, const ModelConfig& config,
                                  const MessageGraph& messages, const Matrix& features,
                                  const LabelSet& labels) {
  EmbeddingExport out;
  out.z = forward(params, config, messages, features, Mode::kEval).z;
  out.projection = pca_2d(out.z);
  out.stats = separation(out.z, labels);
  return out;
}

void write_embeddings(std::ostream& out, const Matrix& z, const LabelSet& labels) {
  out << "node_id,label";
  for (std::size_t k = 0; k < z.cols(); ++k) out << ",z" << k + 1;
  out << '\n' << std::setprecision(17);
  for (std::size_t v = 0; v < z.rows(); ++v) {
    out << v << ',' << label_name(labels.labels[v]);
    for (double x : z.row(v)) out << ',' << x;
    out << '\n';
  }
}

void write_projection(std::ostream& out, const Matrix& p, const LabelSet& labels) {
  out << "node_id,label,pc1,pc2\n" << std::setprecision(17);
  for (std::size_t v = 0; v < p.rows(); ++v)
    out << v << ',' << label_name(labels.labels[v]) << ',' << p(v, 0) << ',' << p(v, 1) << '\n';
}

const std::vector<ReferenceRow>& reference_table() {
  static const std::vector<ReferenceRow> rows = {
      {"Heuristic", "Lowest-5%", 0.527, 0.503, true},
      {"Heuristic", "BadRank", 0.578, 0.555, true},
      {"Unsigned GNN", "GCN", 0.676, 0.630, true},
      {"Unsigned GNN", "GAT", 0.742, 0.682, false},
      {"Signed GNN", "SGCN", 0.846, 0.669, false},
      {"Signed GNN", "SiGAT", 0.896, 0.696, false},
      {"Signed GNN", "SNEA", 0.838, 0.719, false},
      {"Proposed", "TAS-GNN", 0.927, 0.747, true},
  };
  return rows;
}

std::string render_comparison_table(const std::vector<TableRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(14) << "Category" << std::setw(16) << "Model" << std::setw(20)
     << "AUC-ROC" << std::setw(20) << "Macro-F1" << "Published AUC / F1 (from paper)\n";
  os << std::string(100, '-') << '\n';
  auto fmt = [](const MetricSummary& m, std::size_t n) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << m.mean;
    if (n > 1) s << " +/- " << std::setprecision(3) << m.std;
    return s.str();
  };
  for (const auto& r : rows) {
    os << std::left << std::setw(14) << r.category << std::setw(16) << r.method;
    if (r.has_measured)
      os << std::setw(20) << fmt(r.measured.auc, r.measured.n_seeds) << std::setw(20)
         << fmt(r.measured.f1, r.measured.n_seeds);
    else
      os << std::setw(20) << "not implemented" << std::setw(20) << "-";
    if (r.ref_auc >= 0)
      os << std::fixed << std::setprecision(3) << r.ref_auc << " / " << r.ref_f1;
    os << '\n';
  }
  return os.str();
}

std::string render_ablation_table(const AblationSuite& suite) {
  std::ostringstream os;
  os << std::left << std::setw(22) << "Variant" << std::setw(6) << "Seed" << std::setw(10)
     << "AUC" << std::setw(10) << "Macro-F1" << "Split checksum\n";
  os << std::string(70, '-') << '\n';
  for (std::size_t i = 0; i < suite.runs.size(); ++i) {
    const auto& r = suite.runs[i];
    os << std::left << std::setw(22) << r.method << std::setw(6) << r.seed << std::fixed
       << std::setprecision(4) << std::setw(10) << r.auc_roc << std::setw(10) << r.macro_f1
       << std::hex << suite.split_checksums[i] << std::dec << '\n';
  }
  os << '\n'
     << std::left << std::setw(22) << "Variant" << std::setw(28) << "AUC mean+/-std (median)"
     << "F1 mean+/-std (median)\n";
  os << std::string(78, '-') << '\n';
  for (const auto& s : suite.summary) {
    std::ostringstream a, f;
    a << std::fixed << std::setprecision(4) << s.auc.mean << "+/-" << s.auc.std << " ("
      << s.auc.median << ")";
    f << std::fixed << std::setprecision(4) << s.f1.mean << "+/-" << s.f1.std << " ("
      << s.f1.median << ")";
    os << std::left << std::setw(22) << s.method << std::setw(28) << a.str() << f.str() << '\n';
  }
  if (!suite.drops.empty()) {
    os << "\nDrop versus full model (relative, median):\n";
    for (const auto& d : suite.drops) {
      std::ostringstream a;
      a << std::fixed << std::setprecision(2) << d.auc_pct << '%';
      os << "  " << std::left << std::setw(22) << d.variant << "AUC " << std::setw(10) << a.str()
         << "F1 " << std::fixed << std::setprecision(2) << d.f1_pct << "%\n";
    }
    os << "  published: no_negative_channel F1 10.67%, no_attention F1 8.00%, "
          "no_status_features AUC 10.75%\n";
  }
  return os.str();
}

nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["split"] = r.split;
  j["seed"] = r.seed;
  j["auc_roc"] = r.auc_roc;
  j["macro_f1"] = r.macro_f1;
  j["benign"] = {{"precision", r.per_class[0].precision},
                 {"recall", r.per_class[0].recall},
                 {"f1", r.per_class[0].f1}};
  j["fraud"] = {{"precision", r.per_class[1].precision},
                {"recall", r.per_class[1].recall},
                {"f1", r.per_class[1].f1}};
  j["confusion"] = {{"tn", r.confusion.tn}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn},
                    {"tp", r.confusion.tp}};
  return j;
}

nlohmann::ordered_json to_json(const MethodSummary& s) {
  nlohmann::ordered_json j;
  j["method"] = s.method;
  j["n_seeds"] = s.n_seeds;
  j["auc"] = {{"mean", s.auc.mean}, {"std", s.auc.std}, {"median", s.auc.median}};
  j["macro_f1"] = {{"mean", s.f1.mean}, {"std", s.f1.std}, {"median", s.f1.median}};
  return j;
}

}  // namespace tasgnn
