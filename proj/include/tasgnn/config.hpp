#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tasgnn/baselines.hpp"
#include "tasgnn/features.hpp"
#include "tasgnn/graph.hpp"
#include "tasgnn/labeling.hpp"
#include "tasgnn/model.hpp"
#include "tasgnn/training.hpp"

namespace tasgnn {

struct PathsConfig {
  std::string data_dir = "data";
  std::string edges_file = "soc-sign-bitcoinalpha.csv";
  std::string work_dir = "run";
};

struct EvalConfig {
  double lowest_pct = 0.05;
  BadRankConfig badrank;
};

// One document describing a whole run. Unknown keys are rejected.
struct RunConfig {
  PathsConfig paths;
  IngestConfig ingest;
  SeedConfig labeling;
  SvdConfig svd;
  ModelConfig model;
  TrainConfig train;
  LossConfig loss;
  EvalConfig eval;
  std::uint64_t random_feature_seed = 99;

  void validate() const;
  std::filesystem::path edges_path() const;
  std::filesystem::path work_path(const std::string& file) const;
};

inline constexpr const char* kDataDirEnv = "TASGNN_DATA_DIR";

nlohmann::ordered_json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

// `section.key=value`; value is parsed as JSON when possible, else as a string.
void apply_override(RunConfig& config, const std::string& assignment);

// Honors TASGNN_DATA_DIR when set.
void apply_environment(RunConfig& config);

nlohmann::ordered_json to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& doc);

}  // namespace tasgnn
