#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tasgnn/graph.hpp"
#include "tasgnn/kernels.hpp"
#include "tasgnn/matrix.hpp"

namespace tasgnn {

// Which message-passing channels the network runs.
//   kDual          trust channel over E+ and distrust channel over E-
//   kPositiveOnly  trust channel only
//   kUnsigned      one channel over all edges with weights |w|
enum class ChannelMode { kDual, kPositiveOnly, kUnsigned };

struct ModelConfig {
  std::size_t num_layers = 2;
  std::size_t hidden_dim = 32;
  std::size_t mlp_hidden = 32;
  double leaky_slope = 0.2;
  double dropout_rate = 0.1;
  std::uint64_t seed = 1;
  ChannelMode channels = ChannelMode::kDual;
  bool attention = true;

  void validate() const;
  std::size_t num_channels() const noexcept { return channels == ChannelMode::kDual ? 2 : 1; }
  std::size_t embedding_dim() const noexcept { return num_channels() * hidden_dim; }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

enum class AblationKind { kFull, kNoNegativeChannel, kNoAttention, kNoStatusFeatures };

std::string_view ablation_name(AblationKind kind);
AblationKind parse_ablation_kind(std::string_view name);

struct Wiring {
  ModelConfig config;
  bool random_features = false;
};

Wiring ablation_variant(const ModelConfig& base, AblationKind kind);

// Message edges for each channel, built once per graph.
struct MessageGraph {
  std::size_t num_nodes = 0;
  kernels::MessageEdges positive;
  kernels::MessageEdges negative;
  kernels::MessageEdges all;  // every edge, weight |w|

  static MessageGraph build(const SignedGraph& graph);
  const kernels::MessageEdges& channel_edges(ChannelMode mode, bool negative_channel) const;
};

struct ChannelParams {
  Matrix weight;                   // in_dim x hidden_dim
  std::vector<double> attention;   // 2*hidden_dim + 1, empty without attention
};

struct LayerParams {
  ChannelParams trust;
  ChannelParams distrust;  // unused unless ChannelMode::kDual
};

template <typename T>
struct BasicParamTensor {
  std::string name;
  std::span<T> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool decay = false;  // weight decay applies to projection and MLP weights only
};
using ParamTensor = BasicParamTensor<double>;
using ConstParamTensor = BasicParamTensor<const double>;

struct ModelParams {
  std::vector<LayerParams> layers;
  Matrix mlp_w1;              // embedding_dim x mlp_hidden
  std::vector<double> mlp_b1;
  std::vector<double> mlp_w2;  // mlp_hidden
  std::vector<double> mlp_b2;  // single bias, kept as a vector for uniform access

  // Fixed traversal order, used by the optimizer and the checkpoint format.
  std::vector<ParamTensor> tensors();
  std::vector<ConstParamTensor> tensors() const;

  std::size_t parameter_count() const;
  ModelParams zeros_like() const;
  bool same_shape(const ModelParams& other) const;
};

ModelParams init_params(const ModelConfig& config, std::size_t input_dim);

enum class Mode { kTrain, kEval };

struct ChannelTrace {
  Matrix projected;  // input * W
  kernels::AttentionForward attention;
};

struct LayerTrace {
  Matrix input;
  ChannelTrace trust;
  ChannelTrace distrust;
};

struct ForwardTrace {
  Mode mode = Mode::kEval;
  std::vector<LayerTrace> layers;
  Matrix z;                         // fused embedding [h_pos | h_neg]
  std::vector<double> dropout_scale;  // per entry of z: 0 or 1/(1-p); empty in eval mode
  Matrix z_dropped;
  Matrix hidden_pre;
  Matrix hidden;
  std::vector<double> logits;
  std::vector<double> probs;
};

// Upstream gradients: dL/dlogit per node and, optionally, dL/dz from losses
// that read the embedding directly.
struct LossGrads {
  std::vector<double> d_logits;
  Matrix d_z;
};

ForwardTrace forward(const ModelParams& params, const ModelConfig& config,
                     const MessageGraph& graph, const Matrix& features, Mode mode,
                     std::uint64_t dropout_seed = 0,
                     kernels::Exec exec = kernels::Exec::kParallel);

ModelParams backward(const ModelParams& params, const ModelConfig& config,
                     const MessageGraph& graph, const ForwardTrace& trace, const LossGrads& grads,
                     kernels::Exec exec = kernels::Exec::kParallel);

double sigmoid(double x) noexcept;
double softplus(double x) noexcept;

}  // namespace tasgnn
