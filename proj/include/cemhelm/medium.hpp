#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "cemhelm/grid.hpp"

namespace cemhelm {

/// Piecewise-constant scalar diffusion coefficient, one value per fine cell
/// in lexicographic cell order (row y = 0 first).
class Medium {
 public:
  Medium(Index nx, Index ny, RealVector values);

  Index nx() const { return nx_; }
  Index ny() const { return ny_; }
  const RealVector& values() const { return values_; }
  double operator()(Index cx, Index cy) const { return values_[cy * nx_ + cx]; }
  double cell(Index c) const { return values_[c]; }

  double min() const { return values_.minCoeff(); }
  double max() const { return values_.maxCoeff(); }
  /// Contrast parameter epsilon with A in {epsilon^2, 1}: sqrt(min / max).
  double epsilon() const { return std::sqrt(min() / max()); }
  /// True when every value is either 1 or the common minimum.
  bool is_two_valued() const;

  void check_matches(const FineGrid& grid) const;

 private:
  Index nx_, ny_;
  RealVector values_;
};

/// Reads the text raster format: "nx ny" then ny rows of nx values, bottom
/// row first. Warns when values are not two-valued {eps^2, 1}.
Medium load_raster(const std::filesystem::path& path);
Medium parse_raster(const std::string& text);
void save_raster(const Medium& medium, const std::filesystem::path& path);
std::string format_raster(const Medium& medium);

/// Cell values only; used for raster-defined sources where zero is allowed.
RealVector load_raster_values(const std::filesystem::path& path, Index& nx, Index& ny,
                              bool require_positive);

Medium constant_medium(Index nx, Index ny, double value);

/// Deterministic binary medium: `channel_count` long horizontal or vertical
/// channels of value `contrast` in a background of 1.
Medium synthesize_channels(Index nx, Index ny, std::uint64_t seed, double contrast,
                           int channel_count);

enum class WeightRule {
  kScaledCoefficient,  // 24 H^-2 A on each coarse element
  kLagrangeGradient,   // A * sum_k |grad eta_k|^2, averaged per fine cell
};

/// Per-fine-cell spectral weight A-tilde.
RealVector stilde_weights(const Medium& medium, const CoarseGrid& coarse,
                          WeightRule rule = WeightRule::kScaledCoefficient);

}  // namespace cemhelm
