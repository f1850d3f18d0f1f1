#include "cemhelm/models.hpp"

#include <string>

namespace cemhelm {

ModelId parse_model(std::string_view name) {
  if (name == "model1") return ModelId::kModel1;
  if (name == "model2") return ModelId::kModel2;
  if (name == "model3") return ModelId::kModel3;
  if (name == "custom") return ModelId::kCustom;
  throw Error(ErrorKind::kInvalidArgument, "unknown model '" + std::string(name) + "'");
}

std::string_view to_string(ModelId id) {
  switch (id) {
    case ModelId::kModel1: return "model1";
    case ModelId::kModel2: return "model2";
    case ModelId::kModel3: return "model3";
    case ModelId::kCustom: return "custom";
  }
  return "unknown";
}

namespace {

Medium raster_medium(const ModelOptions& o, ModelId model) {
  if (o.medium_path) return load_raster(*o.medium_path);
  if (o.synthesize) return synthesize_channels(o.nx, o.nx, o.seed, o.contrast, o.channel_count);
  throw Error(ErrorKind::kMissingRaster, std::string(to_string(model)) +
                                             " needs a medium raster or synthesize = true");
}

}  // namespace

ProblemSpec instantiate(ModelId model, const ModelOptions& o) {
  if (!(o.k >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "wavenumber must be >= 0");
  const FineGrid grid(o.nx, o.nx);
  const ComplexVector zero = ComplexVector::Zero(grid.num_nodes());
  switch (model) {
    case ModelId::kModel1: {
      ProblemSpec spec{grid, constant_medium(o.nx, o.nx, 1.0), o.k, zero,
                       robin_data_plane_wave(grid, o.k), std::nullopt};
      spec.exact = plane_wave(grid, o.k).values;
      return spec;
    }
    case ModelId::kModel2: {
      ProblemSpec spec{grid, raster_medium(o, model), o.k, bump_source(grid), zero, std::nullopt};
      spec.validate();
      return spec;
    }
    case ModelId::kModel3: {
      ComplexVector f = o.source_path ? piecewise_source(grid, *o.source_path)
                                      : piecewise_source(grid, centered_block(grid, o.block_side));
      ProblemSpec spec{grid, raster_medium(o, model), o.k, std::move(f), zero, std::nullopt};
      spec.validate();
      return spec;
    }
    case ModelId::kCustom: {
      if (!o.medium_path || !o.source_path) {
        throw Error(ErrorKind::kMissingRaster, "custom model needs medium and source rasters");
      }
      ProblemSpec spec{grid, load_raster(*o.medium_path), o.k,
                       piecewise_source(grid, *o.source_path), zero, std::nullopt};
      spec.validate();
      return spec;
    }
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown model");
}

}  // namespace cemhelm
