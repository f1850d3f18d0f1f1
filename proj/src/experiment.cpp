#include "cemhelm/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace cemhelm {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorKind::kInvalidArgument, key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw Error(ErrorKind::kInvalidArgument, key + ": expected a number, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw Error(ErrorKind::kInvalidArgument, key + ": expected true/false, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<Index>& values) {
  std::string out;
  for (std::size_t a = 0; a < values.size(); ++a) {
    if (a) out += ',';
    out += std::to_string(values[a]);
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ModelOptions RunConfig::model_options() const {
  ModelOptions o;
  o.nx = nx;
  o.k = k;
  o.medium_path = medium_path;
  o.source_path = source_path;
  o.synthesize = synthesize;
  o.seed = seed;
  o.contrast = contrast;
  o.channel_count = channels;
  return o;
}

void RunConfig::validate() const {
  if (nx < 1) throw Error(ErrorKind::kInvalidArgument, "nx must be >= 1");
  if (nh < 1) throw Error(ErrorKind::kInvalidArgument, "NH must be >= 1");
  if (nx % nh != 0) {
    throw Error(ErrorKind::kIndivisibleMesh,
                "NH = " + std::to_string(nh) + " does not divide nx = " + std::to_string(nx));
  }
  if (m < 0) throw Error(ErrorKind::kInvalidArgument, "m must be >= 0");
  if (nbf < 1) throw Error(ErrorKind::kInvalidArgument, "nbf must be >= 1");
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw Error(ErrorKind::kInvalidArgument, "k must be > 0");
  }
  if (epsilon && !(*epsilon > 0.0 && *epsilon <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "epsilon must lie in (0, 1]");
  }
  if (threads < 1) throw Error(ErrorKind::kInvalidArgument, "threads must be >= 1");
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "model") {
    c.model = parse_model(value);
  } else if (key == "nx") {
    c.nx = parse_integer<Index>(key, value);
  } else if (key == "NH" || key == "nh") {
    c.nh = parse_coarse_size(value);
  } else if (key == "H") {
    c.nh = parse_coarse_size(value);
  } else if (key == "m") {
    c.m = parse_integer<Index>(key, value);
  } else if (key == "nbf" || key == "l") {
    c.nbf = parse_integer<Index>(key, value);
  } else if (key == "k") {
    c.k = parse_double(key, value);
  } else if (key == "epsilon") {
    c.epsilon = parse_double(key, value);
  } else if (key == "medium_path" || key == "medium") {
    c.medium_path = value;
  } else if (key == "source_path" || key == "source") {
    c.source_path = value;
  } else if (key == "seed") {
    c.seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "contrast") {
    c.contrast = parse_double(key, value);
  } else if (key == "channels") {
    c.channels = parse_integer<int>(key, value);
  } else if (key == "output_path" || key == "output") {
    c.output_path = value;
  } else if (key == "strict_zero_trace") {
    c.strict_zero_trace = parse_bool(key, value);
  } else if (key == "synthesize") {
    c.synthesize = parse_bool(key, value);
  } else if (key == "dump_eigs") {
    c.dump_eigs = parse_bool(key, value);
  } else if (key == "dump_basis") {
    const auto parts = split_list(value);
    if (parts.size() != 2) {
      throw Error(ErrorKind::kInvalidArgument, "dump_basis: expected 'j,i'");
    }
    c.dump_basis = std::make_pair(parse_integer<Index>(key, parts[0]),
                                  parse_integer<Index>(key, parts[1]));
  } else if (key == "deterministic") {
    c.deterministic = parse_bool(key, value);
  } else if (key == "coarse_fem") {
    c.coarse_fem = parse_bool(key, value);
  } else if (key == "reference") {
    if (value == "auto") c.reference = ReferenceRule::kAuto;
    else if (value == "exact") c.reference = ReferenceRule::kExact;
    else if (value == "fine") c.reference = ReferenceRule::kFine;
    else throw Error(ErrorKind::kInvalidArgument, "reference: expected auto, exact or fine");
  } else if (key == "test_space") {
    if (value == "conjugate") c.test_rule = TestSpaceRule::kConjugate;
    else if (value == "adjoint") c.test_rule = TestSpaceRule::kAdjointSolve;
    else throw Error(ErrorKind::kInvalidArgument, "test_space: expected conjugate or adjoint");
  } else if (key == "weight_rule") {
    if (value == "scaled") c.weight_rule = WeightRule::kScaledCoefficient;
    else if (value == "lagrange") c.weight_rule = WeightRule::kLagrangeGradient;
    else throw Error(ErrorKind::kInvalidArgument, "weight_rule: expected scaled or lagrange");
  } else if (key == "threads") {
    c.threads = parse_integer<int>(key, value);
  } else if (key == "H_list" || key == "h_list" || key == "NH_list") {
    c.nh_list.clear();
    for (const auto& item : split_list(value)) c.nh_list.push_back(parse_coarse_size(item));
  } else if (key == "m_list") {
    c.m_list.clear();
    for (const auto& item : split_list(value)) c.m_list.push_back(parse_integer<Index>(key, item));
  } else if (key == "decay_element" || key == "j") {
    c.decay_element = parse_integer<Index>(key, value);
  } else if (key == "decay_mode" || key == "i") {
    c.decay_mode = parse_integer<Index>(key, value);
  } else {
    throw Error(ErrorKind::kInvalidArgument, "unknown config key '" + key + "'");
  }
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument,
                  "config line " + std::to_string(number) + ": expected key = value");
    }
    apply_setting(base, trim(std::string_view(line).substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

std::map<std::string, std::string> describe(const RunConfig& c) {
  std::map<std::string, std::string> out;
  out["model"] = std::string(to_string(c.model));
  out["nx"] = std::to_string(c.nx);
  out["NH"] = std::to_string(c.nh);
  out["m"] = std::to_string(c.m);
  out["nbf"] = std::to_string(c.nbf);
  out["k"] = format_number(c.k);
  if (c.epsilon) out["epsilon"] = format_number(*c.epsilon);
  if (c.medium_path) out["medium_path"] = c.medium_path->string();
  if (c.source_path) out["source_path"] = c.source_path->string();
  out["seed"] = std::to_string(c.seed);
  out["synthesize"] = c.synthesize ? "true" : "false";
  if (c.synthesize) {
    out["contrast"] = format_number(c.contrast);
    out["channels"] = std::to_string(c.channels);
  }
  out["strict_zero_trace"] = c.strict_zero_trace ? "true" : "false";
  out["test_space"] = c.test_rule == TestSpaceRule::kConjugate ? "conjugate" : "adjoint";
  out["weight_rule"] = c.weight_rule == WeightRule::kScaledCoefficient ? "scaled" : "lagrange";
  out["reference"] = c.reference == ReferenceRule::kAuto    ? "auto"
                     : c.reference == ReferenceRule::kExact ? "exact"
                                                            : "fine";
  if (!c.nh_list.empty()) out["NH_list"] = join(c.nh_list);
  if (!c.m_list.empty()) out["m_list"] = join(c.m_list);
  return out;
}

Index parse_coarse_size(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw Error(ErrorKind::kInvalidArgument, "empty coarse size");
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    if (trim(s.substr(0, slash)) != "1") {
      throw Error(ErrorKind::kInvalidArgument, "coarse size must be written 1/NH, got " + s);
    }
    const Index nh = parse_integer<Index>("H", trim(s.substr(slash + 1)));
    if (nh < 1) throw Error(ErrorKind::kInvalidArgument, "NH must be >= 1");
    return nh;
  }
  const double v = parse_double("H", s);
  if (v >= 1.0) {
    if (v != std::floor(v)) throw Error(ErrorKind::kInvalidArgument, "NH must be an integer");
    return static_cast<Index>(v);
  }
  if (!(v > 0.0)) throw Error(ErrorKind::kInvalidArgument, "H must be positive");
  const double inv = 1.0 / v;
  const double rounded = std::round(inv);
  if (std::abs(inv - rounded) > 1e-9 * rounded) {
    throw Error(ErrorKind::kInvalidArgument, "H = " + s + " is not 1/NH for an integer NH");
  }
  return static_cast<Index>(rounded);
}

ResolutionDiagnostics validate_resolution(const RunConfig& c, double epsilon) {
  ResolutionDiagnostics d;
  d.epsilon = epsilon;
  const double H = 1.0 / static_cast<double>(c.nh);
  d.k_h_over_eps = c.k * H / epsilon;
  d.log_k_over_eps = std::abs(std::log(c.k / epsilon));
  d.resolution_ok = d.k_h_over_eps <= 1.0;
  d.oversampling_ok = static_cast<double>(c.m) >= d.log_k_over_eps;
  if (!d.resolution_ok) {
    d.warnings.push_back("resolution condition: k H / epsilon = " + format_number(d.k_h_over_eps) +
                         " > 1");
  }
  if (!d.oversampling_ok) {
    d.warnings.push_back("oversampling condition: m = " + std::to_string(c.m) +
                         " < |log(k / epsilon)| = " + format_number(d.log_k_over_eps));
  }
  for (const auto& w : d.warnings) warn(w);
  return d;
}

ResolutionDiagnostics validate_resolution(const RunConfig& c) {
  if (c.epsilon) return validate_resolution(c, *c.epsilon);
  if (c.model == ModelId::kModel1) return validate_resolution(c, 1.0);
  return validate_resolution(c, instantiate(c.model, c.model_options()).medium.epsilon());
}

Problem make_problem(const RunConfig& config) {
  return Problem{instantiate(config.model, config.model_options()), std::nullopt};
}

namespace {

bool use_exact(const RunConfig& c, const ProblemSpec& spec) {
  switch (c.reference) {
    case ReferenceRule::kAuto: return spec.exact.has_value();
    case ReferenceRule::kExact:
      if (!spec.exact) {
        throw Error(ErrorKind::kInvalidArgument, "reference = exact but the model has no exact field");
      }
      return true;
    case ReferenceRule::kFine: return false;
  }
  return false;
}

}  // namespace

RunResult run(const RunConfig& config) {
  std::optional<Problem> problem;
  try {
    config.validate();
    problem = make_problem(config);
  } catch (const Error& e) {
    throw e.in_stage("model");
  }
  return run(config, *problem);
}

RunResult run(const RunConfig& config, Problem& problem) {
  using clock = std::chrono::steady_clock;
  const char* stage = "config";
  try {
    config.validate();
    const ProblemSpec& spec = problem.spec;
    if (spec.grid.nx() != config.nx) {
      throw Error(ErrorKind::kDimensionMismatch, "problem grid does not match nx");
    }
    RunResult result;
    result.config = config;
    result.diagnostics =
        validate_resolution(config, config.epsilon.value_or(spec.medium.epsilon()));

    stage = "setup";
    auto t = clock::now();
    const CoarseGrid coarse(spec.grid, config.nh);
    const RealVector stilde = stilde_weights(spec.medium, coarse, config.weight_rule);
    const DiscreteForms forms = DiscreteForms::build(spec.grid, spec.medium, stilde, spec.k);
    const ComplexVector load = assemble_load(forms, spec);
    result.timings.setup = seconds_since(t);

    stage = "spectral";
    t = clock::now();
    const ProjectionOperator projection =
        build_projection(coarse, spec.medium, stilde, config.nbf, config.threads);
    result.timings.spectral = seconds_since(t);

    stage = "basis";
    t = clock::now();
    CemOptions options;
    options.layers = config.m;
    options.trace = config.strict_zero_trace ? PatchTrace::kStrict : PatchTrace::kInteriorOnly;
    options.test_rule = config.test_rule;
    options.threads = config.threads;
    const MultiscaleSpace space = build_space(coarse, forms, projection, options);
    result.timings.basis = seconds_since(t);

    stage = "coarse assembly";
    t = clock::now();
    const CoarseSystem system = assemble_coarse(space, forms, load, config.threads);
    result.timings.coarse_assembly = seconds_since(t);

    stage = "coarse solve";
    t = clock::now();
    MultiscaleResult ms = solve_multiscale(system, space);
    result.timings.coarse_solve = seconds_since(t);
    result.coarse_dofs = space.size();

    stage = "reference";
    t = clock::now();
    const bool exact = use_exact(config, spec);
    if (!exact || spec.exact) {
      if (!problem.fine) problem.fine = solve_fine(forms, load);
    }
    result.timings.reference = seconds_since(t);

    stage = "errors";
    if (exact) {
      result.reference = {*spec.exact, SolutionKind::kExact};
      result.reference_kind = "exact";
      result.fine_vs_exact = relative_errors(forms, *spec.exact, problem.fine->values);
    } else {
      result.reference = *problem.fine;
      result.reference_kind = "fine";
    }
    result.errors = relative_errors(forms, result.reference.values, ms.solution.values);
    result.norm_l2 = l2_norm(forms, ms.solution.values);
    result.norm_a = a_norm(forms, ms.solution.values);
    if (config.coarse_fem) {
      result.coarse_fem =
          relative_errors(forms, result.reference.values, solve_coarse_fem(spec, config.nh).values);
    }
    if (config.dump_eigs) result.eigen = projection.bases();
    if (config.dump_basis) {
      const auto [j, i] = *config.dump_basis;
      coarse.check_element(j);
      if (i < 0 || i >= config.nbf) {
        throw Error(ErrorKind::kInvalidArgument, "dump_basis: mode index out of range");
      }
      result.basis_field = space.trial(space.index(j, i));
    }
    result.multiscale = std::move(ms.solution);
    if (config.deterministic) result.timings = {};
    return result;
  } catch (const Error& e) {
    throw e.in_stage(stage);
  }
}

std::vector<SweepRow> sweep(const RunConfig& config) {
  if (config.nh_list.empty() || config.m_list.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "sweep needs nonempty H and m lists");
  }
  std::vector<Index> nhs = config.nh_list;
  std::sort(nhs.begin(), nhs.end());
  nhs.erase(std::unique(nhs.begin(), nhs.end()), nhs.end());
  std::vector<Index> ms = config.m_list;
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());

  Problem problem = make_problem(config);
  if (!use_exact(config, problem.spec) || problem.spec.exact) {
    // Shared by every cell; computed once up front.
    problem.fine = solve_fine(problem.spec);
  }

  std::vector<SweepRow> rows;
  for (Index nh : nhs) {
    for (Index m : ms) {
      SweepRow row;
      row.nh = nh;
      row.m = m;
      row.nbf = config.nbf;
      rows.push_back(row);
    }
  }
  const int outer = std::min<int>(config.threads, static_cast<int>(rows.size()));
  parallel_for(static_cast<Index>(rows.size()), outer, [&](Index r) {
    SweepRow& row = rows[static_cast<std::size_t>(r)];
    RunConfig cell = config;
    cell.nh = row.nh;
    cell.m = row.m;
    cell.threads = std::max(1, config.threads / outer);
    cell.dump_eigs = false;
    cell.dump_basis.reset();
    const auto start = std::chrono::steady_clock::now();
    try {
      Problem local{problem.spec, problem.fine};
      const RunResult result = run(cell, local);
      row.e_l2 = result.errors.e_l2;
      row.e_energy = result.errors.e_a;
      row.coarse_dofs = result.coarse_dofs;
    } catch (const std::exception& e) {
      row.e_l2 = std::numeric_limits<double>::quiet_NaN();
      row.e_energy = std::numeric_limits<double>::quiet_NaN();
      row.coarse_dofs = row.nh * row.nh * row.nbf;
      row.failure = e.what();
      warn("sweep cell H=1/" + std::to_string(row.nh) + " m=" + std::to_string(row.m) +
           " failed: " + e.what());
    }
    row.seconds = config.deterministic ? 0.0 : seconds_since(start);
  });
  return rows;
}

DecayReport basis_decay(const RunConfig& config) {
  config.validate();
  const ProblemSpec spec = instantiate(config.model, config.model_options());
  const CoarseGrid coarse(spec.grid, config.nh);
  const RealVector stilde = stilde_weights(spec.medium, coarse, config.weight_rule);
  const DiscreteForms forms = DiscreteForms::build(spec.grid, spec.medium, stilde, spec.k);
  const ProjectionOperator projection =
      build_projection(coarse, spec.medium, stilde, config.nbf, config.threads);
  coarse.check_element(config.decay_element);
  std::vector<Index> layers = config.m_list;
  if (layers.empty()) layers = {1, 2, 3};
  return measure_decay(coarse, spec.medium, forms, projection, config.decay_element,
                       config.decay_mode, layers);
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string report_json(const RunResult& r) {
  using json = nlohmann::ordered_json;
  auto errors_json = [](const ErrorReport& e) {
    json j;
    j["e_l2"] = e.e_l2;
    j["e_energy"] = e.e_a;
    j["difference_l2"] = e.difference_l2;
    j["difference_energy"] = e.difference_a;
    return j;
  };
  json out;
  json config;
  for (const auto& [key, value] : describe(r.config)) config[key] = value;
  out["config"] = config;

  json errors = errors_json(r.errors);
  errors["reference"] = r.reference_kind;
  if (r.fine_vs_exact) errors["fine_vs_exact"] = errors_json(*r.fine_vs_exact);
  if (r.coarse_fem) errors["q1_coarse"] = errors_json(*r.coarse_fem);
  out["errors"] = errors;

  json norms;
  norms["reference_l2"] = r.errors.reference_l2;
  norms["reference_energy"] = r.errors.reference_a;
  norms["multiscale_l2"] = r.norm_l2;
  norms["multiscale_energy"] = r.norm_a;
  norms["coarse_dofs"] = r.coarse_dofs;
  out["norms"] = norms;

  json diagnostics;
  diagnostics["epsilon"] = r.diagnostics.epsilon;
  diagnostics["k_H_over_epsilon"] = r.diagnostics.k_h_over_eps;
  diagnostics["log_k_over_epsilon"] = r.diagnostics.log_k_over_eps;
  diagnostics["warnings"] = r.diagnostics.warnings;
  out["diagnostics"] = diagnostics;

  json timings;
  timings["setup"] = r.timings.setup;
  timings["spectral"] = r.timings.spectral;
  timings["basis_build"] = r.timings.basis;
  timings["coarse_assembly"] = r.timings.coarse_assembly;
  timings["coarse_solve"] = r.timings.coarse_solve;
  timings["reference_solve"] = r.timings.reference;
  timings["total"] = r.timings.total();
  out["timings"] = timings;
  return out.dump(2) + "\n";
}

std::string sweep_csv(const std::vector<SweepRow>& rows, bool deterministic) {
  std::string out = "H,m,nbf,e_l2,e_energy,coarse_dofs,seconds\n";
  for (const auto& row : rows) {
    out += format_number(1.0 / static_cast<double>(row.nh)) + ',' + std::to_string(row.m) + ',' +
           std::to_string(row.nbf) + ',' + format_number(row.e_l2) + ',' +
           format_number(row.e_energy) + ',' + std::to_string(row.coarse_dofs) + ',' +
           format_number(deterministic ? 0.0 : row.seconds) + '\n';
  }
  return out;
}

std::string decay_csv(const DecayReport& report) {
  std::string out = "m,tail_energy,beta_hat\n";
  for (std::size_t a = 0; a < report.layers.size(); ++a) {
    out += std::to_string(report.layers[a]) + ',' + format_number(report.tail_energy[a]) + ',' +
           format_number(report.beta_hat) + '\n';
  }
  return out;
}

std::string field_csv(const FineGrid& grid, const ComplexVector& field) {
  std::string out = "x,y,re,im\n";
  out.reserve(static_cast<std::size_t>(field.size()) * 48);
  for (Index n = 0; n < field.size(); ++n) {
    const auto x = grid.coords(n);
    out += format_number(x.x()) + ',' + format_number(x.y()) + ',' +
           format_number(field[n].real()) + ',' + format_number(field[n].imag()) + '\n';
  }
  return out;
}

std::string basis_csv(const FineGrid& grid, const ComplexVector& field) {
  std::string out = "node,x,y,re,im\n";
  for (Index n = 0; n < field.size(); ++n) {
    const auto x = grid.coords(n);
    out += std::to_string(n) + ',' + format_number(x.x()) + ',' + format_number(x.y()) + ',' +
           format_number(field[n].real()) + ',' + format_number(field[n].imag()) + '\n';
  }
  return out;
}

std::string eigs_csv(const std::vector<AuxiliaryBasis>& bases) {
  std::string out = "element,index,lambda\n";
  for (const auto& b : bases) {
    for (Index i = 0; i < b.eigenvalues.size(); ++i) {
      out += std::to_string(b.element) + ',' + std::to_string(i) + ',' +
             format_number(b.eigenvalues[i]) + '\n';
    }
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::kIoError, "write failed for " + path.string());
}

}  // namespace cemhelm
