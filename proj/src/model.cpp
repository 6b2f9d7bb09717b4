#include "tasgnn/model.hpp"

#include <cmath>
#include <random>

#include "tasgnn/error.hpp"

namespace tasgnn {
namespace {

Matrix column_block(const Matrix& m, std::size_t first, std::size_t count) {
  Matrix out(m.rows(), count);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < count; ++c) out(r, c) = m(r, first + c);
  return out;
}

void add_into(Matrix& dst, const Matrix& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst.data()[i] += src.data()[i];
}

void check_finite(const Matrix& m, const std::string& where) {
  for (double v : m.data())
    if (!std::isfinite(v)) fail(ErrorCategory::kNumerical, "non-finite activation in " + where);
}

void xavier_uniform(Matrix& w, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& x : w.data()) x = dist(rng);
}

template <typename Self, typename Tensor>
std::vector<Tensor> collect_tensors(Self& self) {
  std::vector<Tensor> out;
  auto add = [&](std::string name, auto& values, std::size_t rows, std::size_t cols, bool decay) {
    if (values.empty()) return;
    out.push_back(Tensor{std::move(name), {values.data(), values.size()}, rows, cols, decay});
  };
  for (std::size_t l = 0; l < self.layers.size(); ++l) {
    auto& layer = self.layers[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    add(prefix + "trust.weight", layer.trust.weight.data(), layer.trust.weight.rows(),
        layer.trust.weight.cols(), true);
    add(prefix + "trust.attention", layer.trust.attention, 1, layer.trust.attention.size(), false);
    add(prefix + "distrust.weight", layer.distrust.weight.data(), layer.distrust.weight.rows(),
        layer.distrust.weight.cols(), true);
    add(prefix + "distrust.attention", layer.distrust.attention, 1,
        layer.distrust.attention.size(), false);
  }
  add("mlp.w1", self.mlp_w1.data(), self.mlp_w1.rows(), self.mlp_w1.cols(), true);
  add("mlp.b1", self.mlp_b1, 1, self.mlp_b1.size(), false);
  add("mlp.w2", self.mlp_w2, self.mlp_w2.size(), 1, true);
  add("mlp.b2", self.mlp_b2, 1, self.mlp_b2.size(), false);
  return out;
}

}  // namespace

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) noexcept {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void ModelConfig::validate() const {
  if (num_layers < 1) fail(ErrorCategory::kConfig, "num_layers must be >= 1");
  if (hidden_dim < 1 || mlp_hidden < 1) fail(ErrorCategory::kConfig, "layer widths must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    fail(ErrorCategory::kConfig, "dropout_rate must be in [0,1)");
  if (!(leaky_slope >= 0.0 && leaky_slope < 1.0))
    fail(ErrorCategory::kConfig, "leaky_slope must be in [0,1)");
}

std::string_view ablation_name(AblationKind kind) {
  switch (kind) {
    case AblationKind::kFull: return "full";
    case AblationKind::kNoNegativeChannel: return "no_negative_channel";
    case AblationKind::kNoAttention: return "no_attention";
    case AblationKind::kNoStatusFeatures: return "no_status_features";
  }
  return "full";
}

AblationKind parse_ablation_kind(std::string_view name) {
  for (auto kind : {AblationKind::kFull, AblationKind::kNoNegativeChannel,
                    AblationKind::kNoAttention, AblationKind::kNoStatusFeatures})
    if (ablation_name(kind) == name) return kind;
  fail(ErrorCategory::kConfig, "unknown ablation kind '" + std::string(name) + "'");
}

Wiring ablation_variant(const ModelConfig& base, AblationKind kind) {
  Wiring w{base, false};
  switch (kind) {
    case AblationKind::kFull: break;
    case AblationKind::kNoNegativeChannel: w.config.channels = ChannelMode::kPositiveOnly; break;
    case AblationKind::kNoAttention: w.config.attention = false; break;
    case AblationKind::kNoStatusFeatures: w.random_features = true; break;
  }
  return w;
}

MessageGraph MessageGraph::build(const SignedGraph& graph) {
  std::vector<kernels::MessageEdges::Edge> pos, neg, all;
  for (const auto& e : graph.edges()) {
    const kernels::MessageEdges::Edge m{e.source, e.target, e.weight()};
    (e.raw_rating > 0 ? pos : neg).push_back(m);
    all.push_back({e.source, e.target, std::abs(e.weight())});
  }
  MessageGraph g;
  g.num_nodes = graph.num_nodes();
  g.positive = kernels::MessageEdges::build(g.num_nodes, pos);
  g.negative = kernels::MessageEdges::build(g.num_nodes, neg);
  g.all = kernels::MessageEdges::build(g.num_nodes, all);
  return g;
}

const kernels::MessageEdges& MessageGraph::channel_edges(ChannelMode mode,
                                                         bool negative_channel) const {
  if (mode == ChannelMode::kUnsigned) return all;
  return negative_channel ? negative : positive;
}

std::vector<ParamTensor> ModelParams::tensors() {
  return collect_tensors<ModelParams, ParamTensor>(*this);
}

std::vector<ConstParamTensor> ModelParams::tensors() const {
  return collect_tensors<const ModelParams, ConstParamTensor>(*this);
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += t.values.size();
  return n;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  for (auto& t : z.tensors()) std::fill(t.values.begin(), t.values.end(), 0.0);
  return z;
}

bool ModelParams::same_shape(const ModelParams& other) const {
  const auto a = tensors();
  const auto b = other.tensors();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || a[i].rows != b[i].rows || a[i].cols != b[i].cols) return false;
  return true;
}

ModelParams init_params(const ModelConfig& config, std::size_t input_dim) {
  config.validate();
  if (input_dim == 0) fail(ErrorCategory::kConfig, "input dimension must be positive");
  std::mt19937_64 rng(config.seed);
  ModelParams p;
  const std::size_t h = config.hidden_dim;
  const std::size_t att = config.attention ? 2 * h + 1 : 0;
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    const std::size_t in = l == 0 ? input_dim : config.embedding_dim();
    LayerParams layer;
    layer.trust.weight = Matrix(in, h);
    xavier_uniform(layer.trust.weight, rng);
    layer.trust.attention.assign(att, 0.0);
    if (config.channels == ChannelMode::kDual) {
      layer.distrust.weight = Matrix(in, h);
      xavier_uniform(layer.distrust.weight, rng);
      layer.distrust.attention.assign(att, 0.0);
    }
    p.layers.push_back(std::move(layer));
  }
  p.mlp_w1 = Matrix(config.embedding_dim(), config.mlp_hidden);
  xavier_uniform(p.mlp_w1, rng);
  p.mlp_b1.assign(config.mlp_hidden, 0.0);
  Matrix w2(config.mlp_hidden, 1);
  xavier_uniform(w2, rng);
  p.mlp_w2 = w2.data();
  p.mlp_b2.assign(1, 0.0);
  return p;
}

ForwardTrace forward(const ModelParams& params, const ModelConfig& config,
                     const MessageGraph& graph, const Matrix& features, Mode mode,
                     std::uint64_t dropout_seed, kernels::Exec exec) {
  if (params.layers.size() != config.num_layers)
    fail(ErrorCategory::kConfig, "parameter layer count does not match config");
  if (features.rows() != graph.num_nodes)
    fail(ErrorCategory::kConfig, "feature rows (" + std::to_string(features.rows()) +
                                     ") != node count (" + std::to_string(graph.num_nodes) + ")");
  if (features.cols() != params.layers.front().trust.weight.rows())
    fail(ErrorCategory::kConfig, "feature dim " + std::to_string(features.cols()) +
                                     " does not match layer-0 input dim " +
                                     std::to_string(params.layers.front().trust.weight.rows()));
  const bool dual = config.channels == ChannelMode::kDual;

  ForwardTrace trace;
  trace.mode = mode;
  trace.layers.resize(config.num_layers);
  const Matrix* input = &features;
  Matrix next;
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    auto& lt = trace.layers[l];
    lt.input = *input;
    const auto& lp = params.layers[l];
    auto run = [&](const ChannelParams& cp, ChannelTrace& ct, bool negative) {
      kernels::matmul(exec, lt.input, cp.weight, ct.projected);
      kernels::attention_forward(exec, graph.channel_edges(config.channels, negative),
                                 ct.projected, cp.attention, config.leaky_slope, ct.attention);
    };
    run(lp.trust, lt.trust, false);
    if (dual) {
      run(lp.distrust, lt.distrust, true);
      next = hconcat(lt.trust.attention.out, lt.distrust.attention.out);
    } else {
      next = lt.trust.attention.out;
    }
    check_finite(next, "layer " + std::to_string(l + 1));
    input = &next;
  }
  trace.z = std::move(next);

  const std::size_t n = trace.z.rows();
  trace.z_dropped = trace.z;
  if (mode == Mode::kTrain && config.dropout_rate > 0.0) {
    std::mt19937_64 rng(dropout_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double keep = 1.0 / (1.0 - config.dropout_rate);
    trace.dropout_scale.resize(trace.z.size());
    for (std::size_t i = 0; i < trace.z.size(); ++i) {
      trace.dropout_scale[i] = unit(rng) < config.dropout_rate ? 0.0 : keep;
      trace.z_dropped.data()[i] *= trace.dropout_scale[i];
    }
  }

  kernels::matmul(exec, trace.z_dropped, params.mlp_w1, trace.hidden_pre);
  trace.hidden = Matrix(n, config.mlp_hidden);
  trace.logits.assign(n, params.mlp_b2[0]);
  trace.probs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < config.mlp_hidden; ++k) {
      trace.hidden_pre(i, k) += params.mlp_b1[k];
      trace.hidden(i, k) = kernels::elu(trace.hidden_pre(i, k));
      trace.logits[i] += trace.hidden(i, k) * params.mlp_w2[k];
    }
    if (!std::isfinite(trace.logits[i]))
      fail(ErrorCategory::kNumerical, "non-finite logit at classifier (layer " +
                                          std::to_string(config.num_layers + 1) + ")");
    trace.probs[i] = sigmoid(trace.logits[i]);
  }
  return trace;
}

ModelParams backward(const ModelParams& params, const ModelConfig& config,
                     const MessageGraph& graph, const ForwardTrace& trace, const LossGrads& grads,
                     kernels::Exec exec) {
  const std::size_t n = trace.z.rows();
  if (trace.layers.size() != params.layers.size() || trace.layers.size() != config.num_layers ||
      trace.z.cols() != params.mlp_w1.rows() || trace.hidden.cols() != params.mlp_w2.size())
    fail(ErrorCategory::kConfig, "forward trace does not match parameter shapes");
  if (grads.d_logits.size() != n)
    fail(ErrorCategory::kConfig, "logit gradient length does not match node count");
  if (!grads.d_z.empty() && !grads.d_z.same_shape(trace.z))
    fail(ErrorCategory::kConfig, "embedding gradient shape does not match trace");

  ModelParams g = params.zeros_like();
  const std::size_t m = config.mlp_hidden;
  Matrix d_hidden_pre(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    const double ds = grads.d_logits[i];
    g.mlp_b2[0] += ds;
    for (std::size_t k = 0; k < m; ++k) {
      g.mlp_w2[k] += ds * trace.hidden(i, k);
      const double q = trace.hidden_pre(i, k);
      d_hidden_pre(i, k) = ds * params.mlp_w2[k] * (q > 0.0 ? 1.0 : std::exp(q));
    }
  }
  kernels::matmul_at_b(exec, trace.z_dropped, d_hidden_pre, g.mlp_w1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) g.mlp_b1[k] += d_hidden_pre(i, k);

  Matrix d_h;
  kernels::matmul_a_bt(exec, d_hidden_pre, params.mlp_w1, d_h);
  if (!trace.dropout_scale.empty())
    for (std::size_t i = 0; i < d_h.size(); ++i) d_h.data()[i] *= trace.dropout_scale[i];
  if (!grads.d_z.empty()) add_into(d_h, grads.d_z);

  const bool dual = config.channels == ChannelMode::kDual;
  const std::size_t h = config.hidden_dim;
  for (std::size_t l = config.num_layers; l-- > 0;) {
    const auto& lt = trace.layers[l];
    const auto& lp = params.layers[l];
    auto& lg = g.layers[l];
    Matrix d_input(lt.input.rows(), lt.input.cols());
    auto run = [&](const ChannelParams& cp, const ChannelTrace& ct, ChannelParams& cg,
                   const Matrix& d_out, bool negative) {
      kernels::AttentionGrad ag;
      kernels::attention_backward(exec, graph.channel_edges(config.channels, negative),
                                  ct.projected, cp.attention, config.leaky_slope, ct.attention,
                                  d_out, ag);
      kernels::matmul_at_b(exec, lt.input, ag.d_projected, cg.weight);
      cg.attention = std::move(ag.d_attention);
      Matrix d_in;
      kernels::matmul_a_bt(exec, ag.d_projected, cp.weight, d_in);
      add_into(d_input, d_in);
    };
    if (dual) {
      run(lp.trust, lt.trust, lg.trust, column_block(d_h, 0, h), false);
      run(lp.distrust, lt.distrust, lg.distrust, column_block(d_h, h, h), true);
    } else {
      run(lp.trust, lt.trust, lg.trust, d_h, false);
    }
    d_h = std::move(d_input);
  }
  return g;
}

}  // namespace tasgnn
