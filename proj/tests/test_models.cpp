#include <doctest.h>

#include <filesystem>

#include "cemhelm/models.hpp"

using namespace cemhelm;

TEST_CASE("model names") {
  CHECK(parse_model("model1") == ModelId::kModel1);
  CHECK(parse_model("model3") == ModelId::kModel3);
  CHECK(to_string(ModelId::kCustom) == "custom");
  CHECK_THROWS_AS(parse_model("model9"), Error);
}

TEST_CASE("model 1") {
  ModelOptions o;
  o.nx = 40;
  const ProblemSpec p = instantiate(ModelId::kModel1, o);
  CHECK(p.k == 16.0);
  CHECK(p.source.norm() == 0.0);
  CHECK(p.exact.has_value());
  CHECK(p.medium.min() == 1.0);
  CHECK(p.medium.max() == 1.0);
  CHECK(p.boundary_data.norm() > 0.0);
}

TEST_CASE("model 2 and 3 with a synthesized medium") {
  ModelOptions o;
  o.nx = 50;
  o.synthesize = true;
  const ProblemSpec p2 = instantiate(ModelId::kModel2, o);
  CHECK_FALSE(p2.exact.has_value());
  CHECK(p2.boundary_data.norm() == 0.0);
  for (Index n = 0; n < p2.grid.num_nodes(); ++n) {
    if (p2.grid.coords(n).norm() >= 0.05) CHECK(p2.source[n] == Complex(0.0));
  }
  const ProblemSpec p3 = instantiate(ModelId::kModel3, o);
  CHECK(p3.medium.min() == 1e-3);
  CHECK(p3.medium.max() == 1.0);
  CHECK(p3.source.real().sum() > 0.0);
  const ProblemSpec again = instantiate(ModelId::kModel3, o);
  CHECK((again.medium.values() - p3.medium.values()).norm() == 0.0);
  CHECK((again.source - p3.source).norm() == 0.0);
}

TEST_CASE("rasters are required unless synthesized") {
  ModelOptions o;
  o.nx = 20;
  CHECK_THROWS_AS(instantiate(ModelId::kModel2, o), Error);
  try {
    instantiate(ModelId::kModel3, o);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kMissingRaster);
  }

  const auto dir = std::filesystem::temp_directory_path() / "cemhelm_models_test";
  std::filesystem::create_directories(dir);
  save_raster(synthesize_channels(20, 20, 1, 1e-2, 4), dir / "a.txt");
  save_raster(constant_medium(20, 20, 2.0), dir / "f.txt");
  o.medium_path = dir / "a.txt";
  CHECK_THROWS_AS(instantiate(ModelId::kCustom, o), Error);
  o.source_path = dir / "f.txt";
  const ProblemSpec c = instantiate(ModelId::kCustom, o);
  CHECK(c.medium.min() == doctest::Approx(1e-2));
  CHECK(c.source[0] == Complex(2.0));
  std::filesystem::remove_all(dir);
}
