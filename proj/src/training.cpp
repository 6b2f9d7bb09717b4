#include "tasgnn/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>

#include <json.hpp>

#include "tasgnn/error.hpp"
#include "tasgnn/metrics.hpp"

namespace tasgnn {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

int as_binary(Label l) { return l == Label::kFraud ? 1 : 0; }

struct SplitEval {
  double auc = 0.0;
  double f1 = 0.0;
};

SplitEval evaluate_split(const std::vector<double>& probs, const LabelSet& labels,
                         const std::vector<NodeId>& nodes) {
  std::vector<double> scores;
  std::vector<int> y, pred;
  for (NodeId v : nodes) {
    scores.push_back(probs[v]);
    y.push_back(as_binary(labels.labels[v]));
    pred.push_back(probs[v] >= 0.5 ? 1 : 0);
  }
  return {auc_roc(scores, y), macro_f1(pred, y)};
}

void require_both_classes(const LabelSet& labels, const std::vector<NodeId>& nodes,
                          const char* which) {
  std::size_t fraud = 0;
  for (NodeId v : nodes) fraud += labels.labels[v] == Label::kFraud ? 1 : 0;
  if (fraud == 0 || fraud == nodes.size())
    fail(ErrorCategory::kData, std::string(which) + " split holds a single class");
}

}  // namespace

void LossConfig::validate() const {
  if (!(lambda >= 0.0)) fail(ErrorCategory::kConfig, "lambda must be >= 0");
  if (w_fraud && !(*w_fraud > 0.0)) fail(ErrorCategory::kConfig, "w_fraud must be > 0");
}

void TrainConfig::validate() const {
  if (!(lr >= 0.0) || !std::isfinite(lr)) fail(ErrorCategory::kConfig, "lr must be finite and >= 0");
  if (!(weight_decay >= 0.0)) fail(ErrorCategory::kConfig, "weight_decay must be >= 0");
  if (max_epochs < 1) fail(ErrorCategory::kConfig, "max_epochs must be >= 1");
  if (patience < 1) fail(ErrorCategory::kConfig, "patience must be >= 1");
  const double sum = split_fractions[0] + split_fractions[1] + split_fractions[2];
  if (std::abs(sum - 1.0) > 1e-9 || split_fractions[0] <= 0 || split_fractions[1] <= 0 ||
      split_fractions[2] <= 0)
    fail(ErrorCategory::kConfig, "split fractions must be positive and sum to 1");
  if (model_seeds.empty()) fail(ErrorCategory::kConfig, "model_seeds must not be empty");
}

const std::vector<NodeId>& SplitAssignment::members(SplitRole r) const {
  switch (r) {
    case SplitRole::kTrain: return train;
    case SplitRole::kVal: return val;
    case SplitRole::kTest: return test;
    case SplitRole::kNone: break;
  }
  fail(ErrorCategory::kConfig, "no member list for unlabeled role");
}

std::uint64_t SplitAssignment::checksum() const {
  std::uint64_t h = 1469598103934665603ull;
  for (auto r : role) {
    h ^= static_cast<std::uint8_t>(r);
    h *= 1099511628211ull;
  }
  return h;
}

SplitAssignment make_splits(const LabelSet& labels, const TrainConfig& config) {
  config.validate();
  std::vector<NodeId> benign, fraud;
  for (NodeId v = 0; v < labels.size(); ++v) {
    if (labels.labels[v] == Label::kBenign) benign.push_back(v);
    if (labels.labels[v] == Label::kFraud) fraud.push_back(v);
  }
  if (benign.size() < 10 || fraud.size() < 10)
    fail(ErrorCategory::kData, "need >= 10 labeled nodes per class for a split (benign=" +
                                   std::to_string(benign.size()) +
                                   ", fraud=" + std::to_string(fraud.size()) + ")");
  SplitAssignment s;
  s.role.assign(labels.size(), SplitRole::kNone);
  std::mt19937_64 rng(config.split_seed);
  for (auto* cls : {&benign, &fraud}) {
    std::shuffle(cls->begin(), cls->end(), rng);
    const double n = static_cast<double>(cls->size());
    const auto n_train = static_cast<std::size_t>(std::llround(config.split_fractions[0] * n));
    const auto n_val = static_cast<std::size_t>(std::llround(config.split_fractions[1] * n));
    for (std::size_t i = 0; i < cls->size(); ++i) {
      const NodeId v = (*cls)[i];
      s.role[v] = i < n_train ? SplitRole::kTrain
                  : i < n_train + n_val ? SplitRole::kVal
                                        : SplitRole::kTest;
    }
  }
  for (NodeId v = 0; v < s.role.size(); ++v) {
    if (s.role[v] == SplitRole::kTrain) s.train.push_back(v);
    if (s.role[v] == SplitRole::kVal) s.val.push_back(v);
    if (s.role[v] == SplitRole::kTest) s.test.push_back(v);
  }
  return s;
}

std::vector<std::size_t> link_eligible_edges(const SignedGraph& graph,
                                             const SplitAssignment& split) {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const auto& rec = graph.edge(e);
    if (split.role[rec.source] == SplitRole::kTest || split.role[rec.target] == SplitRole::kTest)
      continue;
    out.push_back(e);
  }
  return out;
}

double resolve_w_fraud(const LabelSet& labels, const SplitAssignment& split,
                       const LossConfig& config) {
  std::size_t fraud = 0;
  for (NodeId v : split.train) fraud += labels.labels[v] == Label::kFraud ? 1 : 0;
  const std::size_t benign = split.train.size() - fraud;
  if (fraud == 0 || benign == 0)
    fail(ErrorCategory::kData, "train split holds a single class; w_fraud undefined");
  if (config.w_fraud) return *config.w_fraud;
  return static_cast<double>(benign) / static_cast<double>(fraud);
}

LossResult compute_loss(const ForwardTrace& trace, const LabelSet& labels,
                        const SplitAssignment& split, const SignedGraph& graph,
                        const LossConfig& config, const std::vector<std::size_t>& link_edges) {
  config.validate();
  const std::size_t n = trace.logits.size();
  if (labels.size() != n || split.role.size() != n)
    fail(ErrorCategory::kConfig, "labels/split do not match the trace node count");
  LossResult r;
  r.parts.w_fraud = resolve_w_fraud(labels, split, config);
  r.grads.d_logits.assign(n, 0.0);

  // -[w y log(p) + (1-y) log(1-p)] with log p = -softplus(-s), log(1-p) = -softplus(s).
  for (NodeId v : split.train) {
    const double s = trace.logits[v];
    if (labels.labels[v] == Label::kFraud) {
      r.parts.wbce += r.parts.w_fraud * softplus(-s);
      r.grads.d_logits[v] = r.parts.w_fraud * (sigmoid(s) - 1.0);
    } else {
      r.parts.wbce += softplus(s);
      r.grads.d_logits[v] = sigmoid(s);
    }
  }

  // The link term is reported even at lambda = 0; it only feeds gradients
  // when lambda > 0.
  if (!link_edges.empty()) {
    const Matrix& z = trace.z;
    const bool with_grad = config.lambda > 0.0;
    if (with_grad) r.grads.d_z = Matrix(z.rows(), z.cols());
    const double inv = 1.0 / static_cast<double>(link_edges.size());
    for (std::size_t e : link_edges) {
      const auto& rec = graph.edge(e);
      const auto zi = z.row(rec.source);
      const auto zj = z.row(rec.target);
      double score = 0.0;
      for (std::size_t k = 0; k < zi.size(); ++k) score += zi[k] * zj[k];
      const double y = rec.raw_rating > 0 ? 1.0 : 0.0;
      r.parts.link += softplus(score) - y * score;
      if (!with_grad) continue;
      const double g = config.lambda * inv * (sigmoid(score) - y);
      auto di = r.grads.d_z.row(rec.source);
      auto dj = r.grads.d_z.row(rec.target);
      for (std::size_t k = 0; k < zi.size(); ++k) {
        di[k] += g * zj[k];
        dj[k] += g * zi[k];
      }
    }
    r.parts.link *= inv;
  }
  r.parts.total = r.parts.wbce + config.lambda * r.parts.link;
  return r;
}

LossResult compute_loss(const ForwardTrace& trace, const LabelSet& labels,
                        const SplitAssignment& split, const SignedGraph& graph,
                        const LossConfig& config) {
  return compute_loss(trace, labels, split, graph, config, link_eligible_edges(graph, split));
}

void write_train_log(std::ostream& out, const TrainLog& log, bool with_timing) {
  for (const auto& e : log.epochs) {
    nlohmann::ordered_json j;
    j["epoch"] = e.epoch;
    j["wbce"] = e.wbce;
    j["link"] = e.link;
    j["total"] = e.total;
    j["val_auc"] = e.val_auc;
    j["val_f1"] = e.val_f1;
    j["lr"] = e.lr;
    if (with_timing) j["elapsed_ms"] = e.elapsed_ms;
    out << j.dump() << '\n';
  }
}

AdamW::AdamW(const ModelParams& like, const TrainConfig& config)
    : config_(config), m_(like.zeros_like()), v_(like.zeros_like()) {}

void AdamW::step(ModelParams& params, const ModelParams& grads) {
  ++t_;
  auto p = params.tensors();
  const auto g = grads.tensors();
  auto m = m_.tensors();
  auto v = v_.tensors();
  if (p.size() != g.size()) fail(ErrorCategory::kConfig, "gradient/parameter mismatch");
  const double b1 = config_.adam_beta1;
  const double b2 = config_.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t k = 0; k < p[i].values.size(); ++k) {
      double& theta = p[i].values[k];
      const double gk = g[i].values[k];
      if (p[i].decay) theta -= config_.lr * config_.weight_decay * theta;
      m[i].values[k] = b1 * m[i].values[k] + (1.0 - b1) * gk;
      v[i].values[k] = b2 * v[i].values[k] + (1.0 - b2) * gk * gk;
      const double m_hat = m[i].values[k] / c1;
      const double v_hat = v[i].values[k] / c2;
      theta -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.adam_eps);
    }
  }
}

std::vector<double> predict(const ModelParams& params, const ModelConfig& config,
                            const MessageGraph& messages, const Matrix& features) {
  return forward(params, config, messages, features, Mode::kEval).probs;
}

TrainResult train(const SignedGraph& graph, const MessageGraph& messages, const Matrix& features,
                  const LabelSet& labels, const SplitAssignment& split,
                  const ModelConfig& model_config, const TrainConfig& train_config,
                  const LossConfig& loss_config) {
  model_config.validate();
  train_config.validate();
  loss_config.validate();
  require_both_classes(labels, split.train, "train");
  require_both_classes(labels, split.val, "validation");

  TrainResult result;
  ModelParams params = init_params(model_config, features.cols());
  AdamW optimizer(params, train_config);
  result.best = params;
  result.log.best_val_auc = -1.0;

  const auto eligible = link_eligible_edges(graph, split);
  std::vector<std::size_t> link_edges = eligible;
  const bool sample_links =
      loss_config.link_sample_size > 0 && loss_config.link_sample_size < eligible.size();
  std::mt19937_64 link_rng(splitmix64(model_config.seed ^ 0x5bd1e995ull));

  const auto start = std::chrono::steady_clock::now();
  for (std::size_t epoch = 1; epoch <= train_config.max_epochs; ++epoch) {
    if (sample_links) {
      link_edges = eligible;
      for (std::size_t i = 0; i < loss_config.link_sample_size; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, link_edges.size() - 1);
        std::swap(link_edges[i], link_edges[pick(link_rng)]);
      }
      link_edges.resize(loss_config.link_sample_size);
      std::sort(link_edges.begin(), link_edges.end());
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = train_config.lr;
    try {
      const auto trace = forward(params, model_config, messages, features, Mode::kTrain,
                                 splitmix64(model_config.seed * 1000003ull + epoch));
      const auto loss = compute_loss(trace, labels, split, graph, loss_config, link_edges);
      rec.wbce = loss.parts.wbce;
      rec.link = loss.parts.link;
      rec.total = loss.parts.total;
      if (!std::isfinite(rec.total))
        fail(ErrorCategory::kNumerical, "non-finite loss (wbce=" + std::to_string(rec.wbce) +
                                            ", link=" + std::to_string(rec.link) + ")");
      const auto grads = backward(params, model_config, messages, trace, loss.grads);
      optimizer.step(params, grads);
      const auto probs = predict(params, model_config, messages, features);
      const auto val = evaluate_split(probs, labels, split.val);
      rec.val_auc = val.auc;
      rec.val_f1 = val.f1;
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::kNumerical) throw;
      fail(ErrorCategory::kNumerical, "training aborted at epoch " + std::to_string(epoch) +
                                          ": " + e.what());
    }
    rec.elapsed_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    result.log.epochs.push_back(rec);

    if (rec.val_auc > result.log.best_val_auc + train_config.min_improvement) {
      result.log.best_val_auc = rec.val_auc;
      result.log.best_epoch = epoch;
      result.best = params;
    } else if (epoch - result.log.best_epoch >= train_config.patience) {
      break;
    }
  }
  return result;
}

TrainResult train(const SignedGraph& graph, const Matrix& features, const LabelSet& labels,
                  const ModelConfig& model_config, const TrainConfig& train_config,
                  const LossConfig& loss_config) {
  const auto messages = MessageGraph::build(graph);
  const auto split = make_splits(labels, train_config);
  return train(graph, messages, features, labels, split, model_config, train_config, loss_config);
}

}  // namespace tasgnn
