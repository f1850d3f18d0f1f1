// cemhelm command line: run, sweep, basis-decay, gen-medium, reference, validate.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cemhelm/experiment.hpp"

namespace {

using namespace cemhelm;

// Options shared by every subcommand. Values are kept as text and applied
// through the same parser as the config file, so flags simply override keys.
struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> values;
  bool strict_zero_trace = false;
  bool synthesize = false;
  bool dump_eigs = false;
  bool deterministic = false;
  bool coarse_fem = false;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("-c,--config", o.config_path, "key = value config file");
  app->add_option("--set", o.sets, "override one config key (key=value)");
  const std::vector<std::pair<std::string, std::string>> keyed = {
      {"--model", "model"},         {"--nx", "nx"},
      {"--H", "H"},                 {"--NH", "NH"},
      {"-m,--layers", "m"},         {"--nbf", "nbf"},
      {"-k,--wavenumber", "k"},     {"--epsilon", "epsilon"},
      {"--medium", "medium_path"},  {"--source", "source_path"},
      {"--seed", "seed"},           {"--contrast", "contrast"},
      {"--channels", "channels"},   {"-o,--output", "output_path"},
      {"--threads", "threads"},     {"--reference", "reference"},
      {"--test-space", "test_space"}, {"--weight-rule", "weight_rule"},
      {"--H-list", "H_list"},       {"--m-list", "m_list"},
      {"--dump-basis", "dump_basis"}, {"--element", "decay_element"},
      {"--mode", "decay_mode"},
  };
  for (const auto& [flag, key] : keyed) {
    app->add_option_function<std::string>(
        flag, [&o, key = key](const std::string& v) { o.values[key] = v; }, "config key " + key);
  }
  app->add_flag("--strict-zero-trace", o.strict_zero_trace,
                "constrain the whole patch boundary, including parts on the outer boundary");
  app->add_flag("--synthesize", o.synthesize, "generate a channel medium instead of reading one");
  app->add_flag("--dump-eigs", o.dump_eigs, "write element,index,lambda CSV");
  app->add_flag("--deterministic", o.deterministic, "report zero timings");
  app->add_flag("--coarse-fem", o.coarse_fem, "also report the Q1 solution on the coarse grid");
}

RunConfig resolve(const CommonOptions& o) {
  RunConfig config;
  if (!o.config_path.empty()) config = load_config(o.config_path);
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument, "--set expects key=value, got '" + s + "'");
    }
    apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
  }
  for (const auto& [key, value] : o.values) apply_setting(config, key, value);
  if (o.strict_zero_trace) config.strict_zero_trace = true;
  if (o.synthesize) config.synthesize = true;
  if (o.dump_eigs) config.dump_eigs = true;
  if (o.deterministic) config.deterministic = true;
  if (o.coarse_fem) config.coarse_fem = true;
  return config;
}

void emit(const std::optional<std::filesystem::path>& path, const std::string& text) {
  if (path) {
    write_text(*path, text);
  } else {
    std::cout << text;
  }
}

std::filesystem::path sibling(const std::optional<std::filesystem::path>& output,
                              const std::string& suffix) {
  if (!output) return suffix.substr(1);
  std::filesystem::path p = *output;
  p.replace_extension();
  p += suffix;
  return p;
}

int cmd_run(const RunConfig& config, const std::string& field_path) {
  const RunResult result = run(config);
  emit(config.output_path, report_json(result));
  const FineGrid grid(config.nx, config.nx);
  if (!field_path.empty()) write_text(field_path, field_csv(grid, result.multiscale.values));
  if (config.dump_eigs) write_text(sibling(config.output_path, ".eigs.csv"), eigs_csv(result.eigen));
  if (result.basis_field) {
    write_text(sibling(config.output_path, ".basis.csv"), basis_csv(grid, *result.basis_field));
  }
  const bool finite = std::isfinite(result.errors.e_l2) && std::isfinite(result.errors.e_a);
  return finite ? 0 : 1;
}

int cmd_sweep(const RunConfig& config) {
  const auto rows = sweep(config);
  emit(config.output_path, sweep_csv(rows, config.deterministic));
  for (const auto& row : rows) {
    if (!row.failure.empty() || !std::isfinite(row.e_l2) || !std::isfinite(row.e_energy)) return 1;
  }
  return 0;
}

int cmd_decay(const RunConfig& config) {
  const DecayReport report = basis_decay(config);
  emit(config.output_path, decay_csv(report));
  return 0;
}

int cmd_gen_medium(const RunConfig& config) {
  if (!config.output_path) {
    throw Error(ErrorKind::kInvalidArgument, "gen-medium needs --output");
  }
  save_raster(synthesize_channels(config.nx, config.nx, config.seed, config.contrast,
                                  config.channels),
              *config.output_path);
  return 0;
}

int cmd_reference(const RunConfig& config) {
  if (config.nx < 1) throw Error(ErrorKind::kInvalidArgument, "nx must be >= 1");
  if (!(config.k > 0.0)) throw Error(ErrorKind::kInvalidArgument, "k must be > 0");
  const ProblemSpec spec = instantiate(config.model, config.model_options());
  emit(config.output_path, field_csv(spec.grid, solve_fine(spec).values));
  return 0;
}

int cmd_validate(const RunConfig& config) {
  config.validate();
  const ResolutionDiagnostics d = validate_resolution(config);
  std::cout << "epsilon = " << format_number(d.epsilon) << "\n"
            << "k H / epsilon = " << format_number(d.k_h_over_eps)
            << (d.resolution_ok ? " (ok)" : " (exceeds 1)") << "\n"
            << "|log(k / epsilon)| = " << format_number(d.log_k_over_eps) << ", m = " << config.m
            << (d.oversampling_ok ? " (ok)" : " (too few layers)") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale (CEM) solver for heterogeneous Helmholtz problems"};
  app.require_subcommand(1);

  CommonOptions run_o, sweep_o, decay_o, gen_o, ref_o, val_o;
  std::string field_path;
  auto* run_cmd = app.add_subcommand("run", "one multiscale solve with a JSON report");
  add_common(run_cmd, run_o);
  run_cmd->add_option("--field", field_path, "write the multiscale field as x,y,re,im CSV");
  auto* sweep_cmd = app.add_subcommand("sweep", "errors over lists of H and m");
  add_common(sweep_cmd, sweep_o);
  auto* decay_cmd = app.add_subcommand("basis-decay", "tail energy of one global basis");
  add_common(decay_cmd, decay_o);
  auto* gen_cmd = app.add_subcommand("gen-medium", "write a synthetic channel medium raster");
  add_common(gen_cmd, gen_o);
  auto* ref_cmd = app.add_subcommand("reference", "fine-grid reference field as CSV");
  add_common(ref_cmd, ref_o);
  auto* val_cmd = app.add_subcommand("validate", "check the resolution conditions");
  add_common(val_cmd, val_o);

  CLI11_PARSE(app, argc, argv);

  const char* name = "cemhelm";
  try {
    if (*run_cmd) {
      name = "run";
      return cmd_run(resolve(run_o), field_path);
    }
    if (*sweep_cmd) {
      name = "sweep";
      return cmd_sweep(resolve(sweep_o));
    }
    if (*decay_cmd) {
      name = "basis-decay";
      return cmd_decay(resolve(decay_o));
    }
    if (*gen_cmd) {
      name = "gen-medium";
      return cmd_gen_medium(resolve(gen_o));
    }
    if (*ref_cmd) {
      name = "reference";
      return cmd_reference(resolve(ref_o));
    }
    if (*val_cmd) {
      name = "validate";
      return cmd_validate(resolve(val_o));
    }
  } catch (const Error& e) {
    std::cerr << "error (" << name << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error (" << name << "): " << e.what() << "\n";
    return 3;
  }
  return 0;
}
