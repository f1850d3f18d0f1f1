#include "cemhelm/medium.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace cemhelm {

Medium::Medium(Index nx, Index ny, RealVector values)
    : nx_(nx), ny_(ny), values_(std::move(values)) {
  if (nx < 1 || ny < 1 || values_.size() != nx * ny) {
    throw Error(ErrorKind::kDimensionMismatch, "medium: value count does not match nx*ny");
  }
  for (Index i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
      throw Error(ErrorKind::kNonPositiveValue,
                  "medium: cell " + std::to_string(i) + " has non-positive value");
    }
  }
}

bool Medium::is_two_valued() const {
  const double lo = min();
  for (Index i = 0; i < values_.size(); ++i) {
    if (values_[i] != 1.0 && values_[i] != lo) return false;
  }
  return true;
}

void Medium::check_matches(const FineGrid& grid) const {
  if (grid.nx() != nx_ || grid.ny() != ny_) {
    throw Error(ErrorKind::kDimensionMismatch,
                "medium is " + std::to_string(nx_) + "x" + std::to_string(ny_) +
                    " but grid is " + std::to_string(grid.nx()) + "x" +
                    std::to_string(grid.ny()));
  }
}

namespace {

RealVector parse_values(const std::string& text, Index& nx, Index& ny, bool require_positive) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorKind::kMalformedRaster, "empty raster");
  std::istringstream hs(header);
  long long w = 0, h = 0;
  std::string extra;
  if (!(hs >> w >> h) || (hs >> extra) || w < 1 || h < 1) {
    throw Error(ErrorKind::kMalformedRaster, "bad raster header '" + header + "'");
  }
  nx = static_cast<Index>(w);
  ny = static_cast<Index>(h);
  RealVector values(nx * ny);
  std::string line;
  Index row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (row >= ny) throw Error(ErrorKind::kMalformedRaster, "too many raster rows");
    const char* p = line.data();
    const char* end = p + line.size();
    Index col = 0;
    while (true) {
      while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
      if (p == end) break;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc() || col >= nx) {
        throw Error(ErrorKind::kMalformedRaster,
                    "row " + std::to_string(row) + ": bad value or too many columns");
      }
      if (require_positive ? !(v > 0.0) : !(v >= 0.0)) {
        throw Error(ErrorKind::kNonPositiveValue,
                    "raster entry (" + std::to_string(col) + "," + std::to_string(row) +
                        ") = " + std::string(p, next));
      }
      values[row * nx + col] = v;
      ++col;
      p = next;
    }
    if (col != nx) {
      throw Error(ErrorKind::kMalformedRaster,
                  "row " + std::to_string(row) + " has " + std::to_string(col) + " values");
    }
    ++row;
  }
  if (row != ny) throw Error(ErrorKind::kMalformedRaster, "raster has too few rows");
  return values;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Medium parse_raster(const std::string& text) {
  Index nx = 0, ny = 0;
  RealVector values = parse_values(text, nx, ny, true);
  Medium m(nx, ny, std::move(values));
  if (!m.is_two_valued()) {
    warn("medium values are not two-valued {eps^2, 1}; accepted as a general positive raster");
  }
  return m;
}

Medium load_raster(const std::filesystem::path& path) { return parse_raster(read_file(path)); }

RealVector load_raster_values(const std::filesystem::path& path, Index& nx, Index& ny,
                              bool require_positive) {
  return parse_values(read_file(path), nx, ny, require_positive);
}

std::string format_raster(const Medium& medium) {
  std::string out = std::to_string(medium.nx()) + " " + std::to_string(medium.ny()) + "\n";
  char buf[32];
  for (Index cy = 0; cy < medium.ny(); ++cy) {
    for (Index cx = 0; cx < medium.nx(); ++cx) {
      // Shortest representation that parses back to the same double.
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), medium(cx, cy));
      if (cx > 0) out.push_back(' ');
      out.append(buf, end);
    }
    out.push_back('\n');
  }
  return out;
}

void save_raster(const Medium& medium, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIoError, "cannot write " + path.string());
  out << format_raster(medium);
  if (!out) throw Error(ErrorKind::kIoError, "write failed for " + path.string());
}

Medium constant_medium(Index nx, Index ny, double value) {
  if (!(value > 0.0)) throw Error(ErrorKind::kNonPositiveValue, "constant medium value <= 0");
  return Medium(nx, ny, RealVector::Constant(nx * ny, value));
}

Medium synthesize_channels(Index nx, Index ny, std::uint64_t seed, double contrast,
                           int channel_count) {
  if (!(contrast > 0.0 && contrast < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "channel contrast must lie in (0, 1)");
  }
  RealVector values = RealVector::Ones(nx * ny);
  // mt19937_64 output is fully specified; the modulo mapping below keeps the
  // raster identical across standard libraries.
  std::mt19937_64 rng(seed);
  auto pick = [&rng](Index lo, Index hi) {  // inclusive
    return lo + static_cast<Index>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  for (int c = 0; c < channel_count; ++c) {
    const bool horizontal = (rng() & 1U) != 0U;
    const Index along = horizontal ? nx : ny;
    const Index across = horizontal ? ny : nx;
    const Index width = pick(1, std::max<Index>(1, across / 200));
    const Index length = pick(along / 2, along);
    const Index start = pick(0, along - length);
    const Index offset = pick(0, across - width);
    for (Index a = start; a < start + length; ++a) {
      for (Index b = offset; b < offset + width; ++b) {
        const Index cx = horizontal ? a : b;
        const Index cy = horizontal ? b : a;
        values[cy * nx + cx] = contrast;
      }
    }
  }
  return Medium(nx, ny, std::move(values));
}

namespace {

// Mean of (1 - t)^2 + t^2 over [t0, t1].
double lagrange_gradient_mean(double t0, double t1) {
  auto primitive = [](double t) { return t - t * t + 2.0 * t * t * t / 3.0; };
  return (primitive(t1) - primitive(t0)) / (t1 - t0);
}

}  // namespace

RealVector stilde_weights(const Medium& medium, const CoarseGrid& coarse, WeightRule rule) {
  const FineGrid& fine = coarse.fine();
  medium.check_matches(fine);
  const double H = coarse.H();
  RealVector w(fine.num_cells());
  if (rule == WeightRule::kScaledCoefficient) {
    w = (24.0 / (H * H)) * medium.values();
    return w;
  }
  const Index r = coarse.cells_per_element();
  const double dt = 1.0 / static_cast<double>(r);
  for (Index cy = 0; cy < fine.ny(); ++cy) {
    const double u0 = static_cast<double>(cy % r) * dt;
    const double gy = lagrange_gradient_mean(u0, u0 + dt);
    for (Index cx = 0; cx < fine.nx(); ++cx) {
      const double t0 = static_cast<double>(cx % r) * dt;
      const double gx = lagrange_gradient_mean(t0, t0 + dt);
      w[fine.cell(cx, cy)] = medium(cx, cy) * 2.0 * (gx + gy) / (H * H);
    }
  }
  return w;
}

}  // namespace cemhelm
