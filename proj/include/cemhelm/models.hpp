#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "cemhelm/reference.hpp"

namespace cemhelm {

enum class ModelId { kModel1, kModel2, kModel3, kCustom };

ModelId parse_model(std::string_view name);
std::string_view to_string(ModelId id);

struct ModelOptions {
  Index nx = 200;
  double k = 16.0;
  std::optional<std::filesystem::path> medium_path;
  std::optional<std::filesystem::path> source_path;
  bool synthesize = false;
  std::uint64_t seed = 7;
  double contrast = 1e-3;
  int channel_count = 8;
  double block_side = 0.2;  // model 3 default source
};

/// Builds one of the bundled problems:
///   model1: A = 1, f = 0, plane-wave Robin data, exact solution attached;
///   model2: raster medium, bump source at the origin, g = 0;
///   model3: high-contrast raster, piecewise-constant source, g = 0;
///   custom: medium and source rasters from files, g = 0.
ProblemSpec instantiate(ModelId model, const ModelOptions& options);

}  // namespace cemhelm
