#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "lexblend/inference.hpp"
#include "lexblend/model.hpp"

namespace lexblend {

inline constexpr std::uint32_t kFormatVersion = 1;

// Parameters kept alongside a model: a default set plus the optimized set of
// each fold configuration that has been run.
struct ParamStore {
  ModelParams base = ModelParams::neutral(3);
  std::map<int, ModelParams> configs;

  // The config's parameters when present, otherwise the base set.
  const ModelParams& for_config(int config_id) const;
  bool operator==(const ParamStore&) const = default;
};

struct ModelBundle {
  Model model;
  ParamStore params;
};

// Canonical byte image; identical models serialize to identical bytes.
std::vector<std::uint8_t> serialize(const Model& model, const ParamStore& params);

// Throws CorruptModel (bad magic, truncation, checksum mismatch, malformed
// section) or UnsupportedVersion.
ModelBundle deserialize(std::span<const std::uint8_t> bytes);

// Writes to a temporary sibling file, then renames it over `path`.
// Throws IoError.
void save(const Model& model, const ParamStore& params, const std::filesystem::path& path);

ModelBundle load(const std::filesystem::path& path);

}  // namespace lexblend
