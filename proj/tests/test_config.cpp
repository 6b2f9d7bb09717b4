#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "gradcheck.hpp"
#include "tasgnn/checkpoint.hpp"
#include "tasgnn/config.hpp"
#include "tasgnn/error.hpp"

using namespace tasgnn;
using Json = nlohmann::json;

namespace {

std::optional<ErrorCategory> category_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.category();
  }
  return std::nullopt;
}

Checkpoint sample_checkpoint(std::uint64_t seed = 3) {
  Checkpoint ck;
  ck.config.hidden_dim = 4;
  ck.config.mlp_hidden = 5;
  ck.config.seed = seed;
  ck.input_dim = 6;
  ck.params = testing::random_params(ck.config, ck.input_dim, seed);
  return ck;
}

Json checkpoint_json(const Checkpoint& ck) {
  std::ostringstream out;
  write_checkpoint(out, ck);
  return Json::parse(out.str());
}

Checkpoint reread(const Json& doc, const std::optional<ModelConfig>& expected = {}) {
  std::istringstream in(doc.dump());
  return read_checkpoint(in, expected);
}

}  // namespace

TEST_CASE("defaults survive a JSON round trip") {
  RunConfig c;
  c.train.model_seeds = {5, 1, 9};
  c.loss.w_fraud = 3.5;
  c.labeling.conflict = ConflictRule::kFraudWins;
  const auto back = run_config_from_json(Json::parse(to_json(c).dump()));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.train.model_seeds == std::vector<std::uint64_t>{5, 1, 9});
  CHECK(back.loss.w_fraud == 3.5);
  CHECK(back.labeling.conflict == ConflictRule::kFraudWins);
}

TEST_CASE("defaults match the documented hyperparameters") {
  const RunConfig c;
  CHECK(c.train.lr == 0.001);
  CHECK(c.train.weight_decay == 5e-4);
  CHECK(c.train.max_epochs == 2000);
  CHECK(c.train.patience == 20);
  CHECK(c.loss.lambda == 0.1);
  CHECK_FALSE(c.loss.w_fraud.has_value());
  CHECK(c.labeling.k == 10);
  CHECK(c.labeling.damping == 0.85);
  CHECK(c.svd.k_svd == 32);
  CHECK(c.model.num_layers == 2);
  CHECK(c.eval.lowest_pct == 0.05);
  CHECK(c.train.model_seeds.size() == 3);
  CHECK(to_json(c)["loss"]["w_fraud"] == "auto");
}

TEST_CASE("unknown and mistyped keys are rejected") {
  CHECK(category_of([] { run_config_from_json(Json::parse(R"({"trian": {}})")); }) ==
        ErrorCategory::kConfig);
  CHECK(category_of([] { run_config_from_json(Json::parse(R"({"train": {"lrate": 0.1}})")); }) ==
        ErrorCategory::kConfig);
  CHECK(category_of([] { run_config_from_json(Json::parse(R"({"train": {"lr": "fast"}})")); }) ==
        ErrorCategory::kConfig);
  CHECK(category_of([] { run_config_from_json(Json::parse(R"({"loss": {"w_fraud": "big"}})")); }) ==
        ErrorCategory::kConfig);
  CHECK(category_of([] { run_config_from_json(Json::parse(R"({"svd": {"k": 0}})")); }) ==
        ErrorCategory::kConfig);
  CHECK(category_of([] { run_config_from_json(Json::parse(R"([1, 2])")); }) ==
        ErrorCategory::kConfig);
  const auto ok = run_config_from_json(Json::parse(R"({"train": {"patience": 4}})"));
  CHECK(ok.train.patience == 4);
  CHECK(ok.train.lr == 0.001);
}

TEST_CASE("overrides address section.key") {
  RunConfig c;
  apply_override(c, "train.max_epochs=7");
  apply_override(c, "loss.w_fraud=2.5");
  apply_override(c, "paths.work_dir=out/run 1");
  apply_override(c, "train.model_seeds=[4,2]");
  CHECK(c.train.max_epochs == 7);
  CHECK(c.loss.w_fraud == 2.5);
  CHECK(c.paths.work_dir == "out/run 1");
  CHECK(c.train.model_seeds == std::vector<std::uint64_t>{4, 2});
  apply_override(c, "loss.w_fraud=auto");
  CHECK_FALSE(c.loss.w_fraud.has_value());
  CHECK(category_of([&] { apply_override(c, "train.nope=1"); }) == ErrorCategory::kConfig);
  CHECK(category_of([&] { apply_override(c, "max_epochs=1"); }) == ErrorCategory::kConfig);
  CHECK(category_of([&] { apply_override(c, "train.patience=0"); }) == ErrorCategory::kConfig);
}

TEST_CASE("the data directory follows the environment") {
  RunConfig c;
  ::setenv(kDataDirEnv, "/tmp/elsewhere", 1);
  apply_environment(c);
  CHECK(c.paths.data_dir == "/tmp/elsewhere");
  CHECK(c.edges_path() == std::filesystem::path("/tmp/elsewhere/soc-sign-bitcoinalpha.csv"));
  ::unsetenv(kDataDirEnv);
  RunConfig d;
  apply_environment(d);
  CHECK(d.paths.data_dir == "data");
}

TEST_CASE("config files load and report their problems") {
  const auto dir = std::filesystem::temp_directory_path() / "tasgnn_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "good.json") << R"({"model": {"hidden": 16}, "ablation": {"random_feature_seed": 5}})";
    std::ofstream(dir / "bad.json") << "{ not json";
  }
  const auto c = load_run_config(dir / "good.json");
  CHECK(c.model.hidden_dim == 16);
  CHECK(c.random_feature_seed == 5);
  CHECK(category_of([&] { load_run_config(dir / "bad.json"); }) == ErrorCategory::kConfig);
  CHECK(category_of([&] { load_run_config(dir / "missing.json"); }) == ErrorCategory::kIo);
  std::filesystem::remove_all(dir);
}

TEST_CASE("model config JSON is strict and complete") {
  ModelConfig m;
  m.channels = ChannelMode::kUnsigned;
  m.attention = false;
  m.seed = 11;
  CHECK(model_config_from_json(Json::parse(to_json(m).dump())) == m);
  auto doc = Json::parse(to_json(m).dump());
  doc["channels"] = "triple";
  CHECK(category_of([&] { model_config_from_json(doc); }) == ErrorCategory::kConfig);
}

TEST_CASE("checkpoints round-trip bit for bit") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto ck = sample_checkpoint(seed);
    const auto back = reread(checkpoint_json(ck), ck.config);
    CHECK(back.config == ck.config);
    CHECK(back.input_dim == ck.input_dim);
    CHECK(params_checksum(back.params) == params_checksum(ck.params));
    const auto a = ck.params.tensors();
    const auto b = back.params.tensors();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].name == b[i].name);
      CHECK(std::equal(a[i].values.begin(), a[i].values.end(), b[i].values.begin()));
    }
  }
}

TEST_CASE("damaged or mismatched checkpoints are rejected") {
  const auto ck = sample_checkpoint();
  auto doc = checkpoint_json(ck);

  auto tampered = doc;
  tampered["tensors"][0]["values"][0] = tampered["tensors"][0]["values"][0].get<double>() + 1e-9;
  CHECK(category_of([&] { reread(tampered); }) == ErrorCategory::kValidation);

  auto versioned = doc;
  versioned["version"] = kCheckpointVersion + 1;
  CHECK(category_of([&] { reread(versioned); }) == ErrorCategory::kValidation);

  auto reshaped = doc;
  reshaped["tensors"][0]["shape"][0] = 99;
  CHECK(category_of([&] { reread(reshaped); }) == ErrorCategory::kValidation);

  auto truncated = doc;
  truncated["tensors"].erase(truncated["tensors"].size() - 1);
  CHECK(category_of([&] { reread(truncated); }) == ErrorCategory::kValidation);

  ModelConfig other = ck.config;
  other.hidden_dim = 8;
  CHECK(category_of([&] { reread(doc, other); }) == ErrorCategory::kConfig);

  std::istringstream junk("{\"format\": ");
  CHECK(category_of([&] { read_checkpoint(junk); }) == ErrorCategory::kParse);
  CHECK(category_of([] { load_checkpoint("/nonexistent/checkpoint.json"); }) ==
        ErrorCategory::kIo);
}
