#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "tasgnn/model.hpp"

namespace tasgnn {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig config;
  std::size_t input_dim = 0;
  ModelParams params;
};

// JSON document: format tag, version, model config, input dim, every tensor
// in ModelParams::tensors() order, and an FNV-1a checksum over the tensor
// names and the raw bytes of their values.
void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

// Rejects bad checksums, unknown versions, and (when `expected` is given)
// a stored model config that differs from it.
Checkpoint read_checkpoint(std::istream& in, const std::optional<ModelConfig>& expected = {});
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<ModelConfig>& expected = {});

std::uint64_t params_checksum(const ModelParams& params);

}  // namespace tasgnn
