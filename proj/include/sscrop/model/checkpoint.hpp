#pragma once

#include <filesystem>

#include "json.hpp"
#include "sscrop/model/model.hpp"

namespace sscrop {

inline constexpr int kCheckpointVersion = 1;

nlohmann::json model_config_to_json(const ModelConfig& config);
// Rejects unknown keys; missing keys take ModelConfig defaults.
ModelConfig model_config_from_json(const nlohmann::json& j);

// {"format": "sscrop-checkpoint", "version": 1, "config": {...},
//  "tensors": [{"name", "rows", "cols", "values"}, ...]}
// Doubles are written in shortest round-trip form, so load(save(m)) == m bitwise.
nlohmann::json checkpoint_to_json(const ModelGraph& model);
ModelGraph checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::filesystem::path& path, const ModelGraph& model);
ModelGraph load_checkpoint(const std::filesystem::path& path);

}  // namespace sscrop
