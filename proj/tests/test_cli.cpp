#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cemhelm/experiment.hpp"

using namespace cemhelm;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CEMHELM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig small_model1() {
  RunConfig c;
  c.nx = 24;
  c.nh = 4;
  c.m = 1;
  c.nbf = 2;
  c.k = 4.0;
  return c;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() : path(std::filesystem::temp_directory_path() / "cemhelm_cli_test") {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("coarse size parsing") {
  CHECK(parse_coarse_size("1/20") == 20);
  CHECK(parse_coarse_size("0.05") == 20);
  CHECK(parse_coarse_size("20") == 20);
  CHECK(parse_coarse_size(" 1 / 40 ") == 40);
  CHECK_THROWS_AS(parse_coarse_size("2/20"), Error);
  CHECK_THROWS_AS(parse_coarse_size("0.3"), Error);
  CHECK_THROWS_AS(parse_coarse_size("-1"), Error);
  CHECK_THROWS_AS(parse_coarse_size(""), Error);
}

TEST_CASE("config text") {
  const RunConfig c = parse_config(
      "# comment\n"
      "model = model3\n"
      "nx = 100   # trailing\n"
      "H = 1/20\n"
      "m = 3\n"
      "nbf = 3\n"
      "synthesize = true\n"
      "test_space = adjoint\n"
      "weight_rule = lagrange\n"
      "H_list = 1/10, 1/20\n"
      "m_list = 1,2\n"
      "dump_basis = 5,1\n");
  CHECK(c.model == ModelId::kModel3);
  CHECK(c.nx == 100);
  CHECK(c.nh == 20);
  CHECK(c.m == 3);
  CHECK(c.nbf == 3);
  CHECK(c.synthesize);
  CHECK(c.test_rule == TestSpaceRule::kAdjointSolve);
  CHECK(c.weight_rule == WeightRule::kLagrangeGradient);
  CHECK(c.nh_list == std::vector<Index>{10, 20});
  CHECK(c.m_list == std::vector<Index>{1, 2});
  REQUIRE(c.dump_basis.has_value());
  CHECK(c.dump_basis->first == 5);
  CHECK(c.dump_basis->second == 1);

  RunConfig o = c;
  apply_setting(o, "m", "4");
  CHECK(o.m == 4);
  CHECK(describe(o).at("m") == "4");
  CHECK(describe(o).at("model") == "model3");

  CHECK_THROWS_AS(parse_config("bogus = 1\n"), Error);
  CHECK_THROWS_AS(parse_config("m = two\n"), Error);
  CHECK_THROWS_AS(parse_config("just text\n"), Error);
  CHECK_THROWS_AS(parse_config("reference = maybe\n"), Error);
}

TEST_CASE("config validation") {
  RunConfig c;
  c.nh = 7;
  CHECK_THROWS_AS(c.validate(), Error);
  c.nh = 10;
  c.k = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.k = 16.0;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("resolution diagnostics") {
  RunConfig c;
  c.k = 16.0;
  c.nh = 40;
  c.m = 3;
  ResolutionDiagnostics d = validate_resolution(c, 1.0);
  CHECK(d.k_h_over_eps == doctest::Approx(0.4));
  CHECK(d.resolution_ok);
  CHECK(d.log_k_over_eps == doctest::Approx(std::log(16.0)));
  CHECK(d.oversampling_ok);
  CHECK(d.warnings.empty());

  c.nh = 10;
  c.m = 2;
  d = validate_resolution(c, 1.0);
  CHECK(d.k_h_over_eps == doctest::Approx(1.6));
  CHECK_FALSE(d.resolution_ok);
  CHECK_FALSE(d.oversampling_ok);
  CHECK(d.warnings.size() == 2);

  c.nh = 40;
  c.m = 4;
  d = validate_resolution(c, 1e-3);
  CHECK_FALSE(d.resolution_ok);
  CHECK(d.log_k_over_eps == doctest::Approx(std::log(16e3)));
  CHECK_FALSE(d.oversampling_ok);
}

TEST_CASE("run report") {
  RunConfig c = small_model1();
  c.coarse_fem = true;
  const RunResult r = run(c);
  CHECK(r.reference_kind == "exact");
  CHECK(r.coarse_dofs == 32);
  CHECK(std::isfinite(r.errors.e_l2));
  CHECK(r.fine_vs_exact.has_value());
  CHECK(r.coarse_fem.has_value());
  c.deterministic = true;
  const std::string a = report_json(run(c));
  const std::string b = report_json(run(c));
  CHECK(a == b);
  CHECK(a.find("\"e_l2\"") != std::string::npos);
  CHECK(a.find("\"timings\"") != std::string::npos);

  c.reference = ReferenceRule::kFine;
  CHECK(run(c).reference_kind == "fine");

  c.nh = 5;
  try {
    run(c);
    FAIL("indivisible mesh accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIndivisibleMesh);
  }
}

TEST_CASE("sweep ordering and consistency with run") {
  RunConfig c = small_model1();
  c.nh_list = {8, 2, 4};
  c.m_list = {3, 1, 2};
  c.deterministic = true;
  const auto rows = sweep(c);
  REQUIRE(rows.size() == 9);
  for (std::size_t a = 0; a < rows.size(); ++a) {
    CHECK(rows[a].nh == std::vector<Index>{2, 4, 8}[a / 3]);
    CHECK(rows[a].m == static_cast<Index>(a % 3) + 1);
    CHECK(rows[a].failure.empty());
    CHECK(rows[a].seconds == 0.0);
  }
  RunConfig one = c;
  one.nh = 4;
  one.m = 2;
  const RunResult r = run(one);
  CHECK(rows[4].e_l2 == doctest::Approx(r.errors.e_l2).epsilon(1e-12));
  CHECK(rows[4].e_energy == doctest::Approx(r.errors.e_a).epsilon(1e-12));

  const std::string csv = sweep_csv(rows, true);
  CHECK(csv.rfind("H,m,nbf,e_l2,e_energy,coarse_dofs,seconds\n", 0) == 0);
  CHECK(csv == sweep_csv(sweep(c), true));

  c.nh_list = {4, 5};
  c.m_list = {1};
  const auto bad = sweep(c);
  CHECK(bad[0].failure.empty());
  CHECK(std::isnan(bad[1].e_l2));
  CHECK_FALSE(bad[1].failure.empty());
}

TEST_CASE("basis decay from config") {
  RunConfig c;
  c.nx = 32;
  c.nh = 8;
  c.k = 4.0;
  c.decay_element = 27;
  c.m_list = {0, 1, 2};
  const DecayReport r = basis_decay(c);
  CHECK(r.layers.size() == 3);
  const std::string csv = decay_csv(r);
  CHECK(csv.rfind("m,tail_energy,beta_hat\n", 0) == 0);
  c.decay_element = 64;
  CHECK_THROWS_AS(basis_decay(c), Error);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(1e-3) == "0.001");
}

TEST_CASE("command line binary") {
  TempDir dir;
  const std::string out = (dir.path / "r.json").string();
  CHECK(run_cli("run --nx 24 --NH 4 -m 1 --nbf 2 -k 4 --deterministic -o " + out) == 0);
  const std::string first = read_file(out);
  CHECK(first.find("\"errors\"") != std::string::npos);
  CHECK(run_cli("run --nx 24 --NH 4 -m 1 --nbf 2 -k 4 --deterministic -o " + out) == 0);
  CHECK(read_file(out) == first);

  CHECK(run_cli("run --nx 24 --NH 7") == 2);
  CHECK(run_cli("run --model model2 --nx 24 --NH 4") == 2);
  CHECK(run_cli("run --set nonsense=1") == 2);
  CHECK(run_cli("frobnicate") != 0);

  const std::string raster = (dir.path / "a.txt").string();
  CHECK(run_cli("gen-medium --nx 20 --seed 3 --contrast 0.01 -o " + raster) == 0);
  const Medium m = load_raster(raster);
  const Medium expect = synthesize_channels(20, 20, 3, 0.01, 8);
  CHECK((m.values() - expect.values()).norm() == 0.0);

  const std::string cfg = (dir.path / "c.cfg").string();
  write_text(cfg, "model = model2\nnx = 20\nNH = 4\nm = 1\nnbf = 2\nk = 4\nmedium = " + raster +
                      "\n");
  const std::string sweep_out = (dir.path / "s.csv").string();
  CHECK(run_cli("sweep -c " + cfg + " --H-list 1/2,1/4 --m-list 1 --deterministic -o " +
                sweep_out) == 0);
  const std::string csv = read_file(sweep_out);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

  const std::string decay_out = (dir.path / "d.csv").string();
  CHECK(run_cli("basis-decay --nx 32 --NH 8 -k 4 --element 27 --m-list 0,1,2 -o " + decay_out) ==
        0);
  CHECK(read_file(decay_out).rfind("m,tail_energy,beta_hat\n", 0) == 0);

  CHECK(run_cli("validate --nx 24 --NH 4") == 0);
  const std::string field = (dir.path / "ref.csv").string();
  CHECK(run_cli("reference --nx 10 -k 2 -o " + field) == 0);
  const std::string ref = read_file(field);
  CHECK(std::count(ref.begin(), ref.end(), '\n') == 122);
}
