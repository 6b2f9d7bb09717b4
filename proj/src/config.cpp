#include "tasgnn/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "tasgnn/error.hpp"

namespace tasgnn {
namespace {

using Json = nlohmann::json;
using OJson = nlohmann::ordered_json;

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as misspellings.
class StrictObject {
 public:
  StrictObject(const Json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) fail(ErrorCategory::kConfig, where_ + " must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const Json::exception& e) {
      fail(ErrorCategory::kConfig, where_ + "." + key + ": " + e.what());
    }
  }

  const Json* child(const char* key) {
    seen_.insert(key);
    return obj_.contains(key) ? &obj_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!seen_.count(key)) fail(ErrorCategory::kConfig, "unknown key '" + where_ + "." + key + "'");
  }

 private:
  const Json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

std::string_view channel_name(ChannelMode m) {
  switch (m) {
    case ChannelMode::kDual: return "dual";
    case ChannelMode::kPositiveOnly: return "positive_only";
    case ChannelMode::kUnsigned: return "unsigned";
  }
  return "dual";
}

ChannelMode parse_channel(const std::string& s) {
  if (s == "dual") return ChannelMode::kDual;
  if (s == "positive_only") return ChannelMode::kPositiveOnly;
  if (s == "unsigned") return ChannelMode::kUnsigned;
  fail(ErrorCategory::kConfig, "unknown channel mode '" + s + "'");
}

void read_model(StrictObject& m, ModelConfig& c) {
  m.read("layers", c.num_layers);
  m.read("hidden", c.hidden_dim);
  m.read("mlp_hidden", c.mlp_hidden);
  m.read("leaky_slope", c.leaky_slope);
  m.read("dropout", c.dropout_rate);
  m.read("seed", c.seed);
  std::string channels(channel_name(c.channels));
  m.read("channels", channels);
  c.channels = parse_channel(channels);
  m.read("attention", c.attention);
  m.finish();
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  train.validate();
  loss.validate();
  if (!(labeling.damping > 0.0 && labeling.damping < 1.0))
    fail(ErrorCategory::kConfig, "labeling.damping must be in (0,1)");
  if (!(labeling.pr_tol > 0.0)) fail(ErrorCategory::kConfig, "labeling.tol must be positive");
  if (labeling.k < 1) fail(ErrorCategory::kConfig, "labeling.k must be >= 1");
  if (svd.k_svd < 1 || svd.k_svd > 64) fail(ErrorCategory::kConfig, "svd.k must be in [1,64]");
  if (svd.iters < 2) fail(ErrorCategory::kConfig, "svd.iters must be >= 2");
  if (!(eval.lowest_pct > 0.0 && eval.lowest_pct < 1.0))
    fail(ErrorCategory::kConfig, "eval.lowest_pct must be in (0,1)");
}

std::filesystem::path RunConfig::edges_path() const {
  return std::filesystem::path(paths.data_dir) / paths.edges_file;
}

std::filesystem::path RunConfig::work_path(const std::string& file) const {
  return std::filesystem::path(paths.work_dir) / file;
}

OJson to_json(const ModelConfig& c) {
  OJson j;
  j["layers"] = c.num_layers;
  j["hidden"] = c.hidden_dim;
  j["mlp_hidden"] = c.mlp_hidden;
  j["leaky_slope"] = c.leaky_slope;
  j["dropout"] = c.dropout_rate;
  j["seed"] = c.seed;
  j["channels"] = std::string(channel_name(c.channels));
  j["attention"] = c.attention;
  return j;
}

ModelConfig model_config_from_json(const Json& doc) {
  ModelConfig c;
  StrictObject m(doc, "model");
  read_model(m, c);
  return c;
}

OJson to_json(const RunConfig& c) {
  OJson j;
  j["paths"] = {{"data_dir", c.paths.data_dir},
                {"edges_file", c.paths.edges_file},
                {"work_dir", c.paths.work_dir}};
  j["ingest"] = {{"allow_header", c.ingest.allow_header}};
  j["labeling"] = {{"k", c.labeling.k},
                   {"damping", c.labeling.damping},
                   {"tol", c.labeling.pr_tol},
                   {"max_iter", c.labeling.pr_max_iter},
                   {"conflict", c.labeling.conflict == ConflictRule::kBenignWins ? "benign_wins"
                                                                                 : "fraud_wins"}};
  j["svd"] = {{"k", c.svd.k_svd},
              {"iters", c.svd.iters},
              {"oversample", c.svd.oversample},
              {"seed", c.svd.seed}};
  OJson model = to_json(c.model);
  model.erase("seed");
  model.erase("channels");
  model.erase("attention");
  j["model"] = model;
  j["train"] = {{"lr", c.train.lr},
                {"weight_decay", c.train.weight_decay},
                {"max_epochs", c.train.max_epochs},
                {"patience", c.train.patience},
                {"beta1", c.train.adam_beta1},
                {"beta2", c.train.adam_beta2},
                {"eps", c.train.adam_eps},
                {"split", c.train.split_fractions},
                {"split_seed", c.train.split_seed},
                {"model_seeds", c.train.model_seeds},
                {"log_timing", c.train.log_timing},
                {"min_improvement", c.train.min_improvement}};
  OJson loss;
  loss["lambda"] = c.loss.lambda;
  if (c.loss.w_fraud)
    loss["w_fraud"] = *c.loss.w_fraud;
  else
    loss["w_fraud"] = "auto";
  loss["link_sample_size"] = c.loss.link_sample_size;
  j["loss"] = loss;
  j["eval"] = {{"lowest_pct", c.eval.lowest_pct},
               {"badrank_damping", c.eval.badrank.damping},
               {"badrank_tol", c.eval.badrank.tol},
               {"badrank_max_iter", c.eval.badrank.max_iter},
               {"badrank_flag_pct", c.eval.badrank.flag_pct}};
  j["ablation"] = {{"random_feature_seed", c.random_feature_seed}};
  return j;
}

RunConfig run_config_from_json(const Json& doc) {
  RunConfig c;
  StrictObject root(doc, "config");
  if (const auto* p = root.child("paths")) {
    StrictObject s(*p, "paths");
    s.read("data_dir", c.paths.data_dir);
    s.read("edges_file", c.paths.edges_file);
    s.read("work_dir", c.paths.work_dir);
    s.finish();
  }
  if (const auto* p = root.child("ingest")) {
    StrictObject s(*p, "ingest");
    s.read("allow_header", c.ingest.allow_header);
    s.finish();
  }
  if (const auto* p = root.child("labeling")) {
    StrictObject s(*p, "labeling");
    s.read("k", c.labeling.k);
    s.read("damping", c.labeling.damping);
    s.read("tol", c.labeling.pr_tol);
    s.read("max_iter", c.labeling.pr_max_iter);
    std::string conflict = "benign_wins";
    s.read("conflict", conflict);
    if (conflict == "benign_wins") c.labeling.conflict = ConflictRule::kBenignWins;
    else if (conflict == "fraud_wins") c.labeling.conflict = ConflictRule::kFraudWins;
    else fail(ErrorCategory::kConfig, "labeling.conflict must be benign_wins or fraud_wins");
    s.finish();
  }
  if (const auto* p = root.child("svd")) {
    StrictObject s(*p, "svd");
    s.read("k", c.svd.k_svd);
    s.read("iters", c.svd.iters);
    s.read("oversample", c.svd.oversample);
    s.read("seed", c.svd.seed);
    s.finish();
  }
  if (const auto* p = root.child("model")) {
    StrictObject s(*p, "model");
    read_model(s, c.model);
  }
  if (const auto* p = root.child("train")) {
    StrictObject s(*p, "train");
    s.read("lr", c.train.lr);
    s.read("weight_decay", c.train.weight_decay);
    s.read("max_epochs", c.train.max_epochs);
    s.read("patience", c.train.patience);
    s.read("beta1", c.train.adam_beta1);
    s.read("beta2", c.train.adam_beta2);
    s.read("eps", c.train.adam_eps);
    s.read("split", c.train.split_fractions);
    s.read("split_seed", c.train.split_seed);
    s.read("model_seeds", c.train.model_seeds);
    s.read("log_timing", c.train.log_timing);
    s.read("min_improvement", c.train.min_improvement);
    s.finish();
  }
  if (const auto* p = root.child("loss")) {
    StrictObject s(*p, "loss");
    s.read("lambda", c.loss.lambda);
    if (const auto* w = s.child("w_fraud")) {
      if (w->is_string() && w->get<std::string>() == "auto") c.loss.w_fraud.reset();
      else if (w->is_number()) c.loss.w_fraud = w->get<double>();
      else fail(ErrorCategory::kConfig, "loss.w_fraud must be a number or \"auto\"");
    }
    s.read("link_sample_size", c.loss.link_sample_size);
    s.finish();
  }
  if (const auto* p = root.child("eval")) {
    StrictObject s(*p, "eval");
    s.read("lowest_pct", c.eval.lowest_pct);
    s.read("badrank_damping", c.eval.badrank.damping);
    s.read("badrank_tol", c.eval.badrank.tol);
    s.read("badrank_max_iter", c.eval.badrank.max_iter);
    s.read("badrank_flag_pct", c.eval.badrank.flag_pct);
    s.finish();
  }
  if (const auto* p = root.child("ablation")) {
    StrictObject s(*p, "ablation");
    s.read("random_feature_seed", c.random_feature_seed);
    s.finish();
  }
  root.finish();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open config " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorCategory::kConfig, path.string() + ": " + e.what());
  }
  return run_config_from_json(doc);
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    fail(ErrorCategory::kConfig, "override must look like section.key=value: " + assignment);
  const std::string section = assignment.substr(0, dot);
  const std::string key = assignment.substr(dot + 1, eq - dot - 1);
  const std::string text = assignment.substr(eq + 1);
  Json doc = Json::parse(to_json(config).dump());
  if (!doc.contains(section) || !doc[section].contains(key))
    fail(ErrorCategory::kConfig, "unknown key '" + section + "." + key + "'");
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  doc[section][key] = value;
  const auto seed = config.model.seed;
  const auto channels = config.model.channels;
  const auto attention = config.model.attention;
  config = run_config_from_json(doc);
  config.model.seed = seed;
  config.model.channels = channels;
  config.model.attention = attention;
}

void apply_environment(RunConfig& config) {
  if (const char* dir = std::getenv(kDataDirEnv); dir && *dir) config.paths.data_dir = dir;
}

}  // namespace tasgnn
