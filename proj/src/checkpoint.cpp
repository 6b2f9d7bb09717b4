#include "tasgnn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "tasgnn/config.hpp"
#include "tasgnn/error.hpp"

namespace tasgnn {
namespace {

constexpr const char* kFormat = "tasgnn-checkpoint";

void fnv_mix(std::uint64_t& h, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace

std::uint64_t params_checksum(const ModelParams& params) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& t : params.tensors()) {
    fnv_mix(h, t.name.data(), t.name.size());
    fnv_mix(h, t.values.data(), t.values.size() * sizeof(double));
  }
  return h;
}

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  nlohmann::ordered_json j;
  j["format"] = kFormat;
  j["version"] = kCheckpointVersion;
  j["config"] = to_json(ck.config);
  j["input_dim"] = ck.input_dim;
  auto& tensors = j["tensors"] = nlohmann::ordered_json::array();
  for (const auto& t : ck.params.tensors()) {
    nlohmann::ordered_json e;
    e["name"] = t.name;
    e["shape"] = {t.rows, t.cols};
    e["values"] = std::vector<double>(t.values.begin(), t.values.end());
    tensors.push_back(std::move(e));
  }
  j["checksum"] = hex(params_checksum(ck.params));
  out << j.dump() << '\n';
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCategory::kIo, "cannot write checkpoint " + path.string());
  write_checkpoint(out, checkpoint);
}

Checkpoint read_checkpoint(std::istream& in, const std::optional<ModelConfig>& expected) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCategory::kParse, std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat)
      fail(ErrorCategory::kValidation, "not a tasgnn checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion)
      fail(ErrorCategory::kValidation,
           "unsupported checkpoint version " + std::to_string(j.at("version").get<int>()));
    Checkpoint ck;
    ck.config = model_config_from_json(j.at("config"));
    ck.input_dim = j.at("input_dim").get<std::size_t>();
    if (expected) {
      ModelConfig a = *expected;
      ModelConfig b = ck.config;
      a.seed = b.seed = 0;  // the seed does not change the architecture
      if (!(a == b))
        fail(ErrorCategory::kConfig, "checkpoint model config does not match the run config");
    }
    ck.params = init_params(ck.config, ck.input_dim);
    auto tensors = ck.params.tensors();
    const auto& stored = j.at("tensors");
    if (stored.size() != tensors.size())
      fail(ErrorCategory::kValidation, "checkpoint tensor count does not match its config");
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      const auto& e = stored.at(i);
      const auto values = e.at("values").get<std::vector<double>>();
      const auto shape = e.at("shape").get<std::vector<std::size_t>>();
      if (e.at("name").get<std::string>() != tensors[i].name ||
          values.size() != tensors[i].values.size() || shape.size() != 2 ||
          shape[0] != tensors[i].rows || shape[1] != tensors[i].cols)
        fail(ErrorCategory::kValidation, "checkpoint tensor '" + tensors[i].name + "' has wrong shape");
      std::copy(values.begin(), values.end(), tensors[i].values.begin());
    }
    if (j.at("checksum").get<std::string>() != hex(params_checksum(ck.params)))
      fail(ErrorCategory::kValidation, "checkpoint checksum mismatch");
    return ck;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCategory::kParse, std::string("malformed checkpoint: ") + e.what());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<ModelConfig>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::kIo, "checkpoint not found: " + path.string());
  return read_checkpoint(in, expected);
}

}  // namespace tasgnn
