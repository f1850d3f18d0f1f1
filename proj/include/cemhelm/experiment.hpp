#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cemhelm/cem.hpp"
#include "cemhelm/metrics.hpp"
#include "cemhelm/models.hpp"

namespace cemhelm {

enum class ReferenceRule {
  kAuto,   // exact field when the model has one, fine solve otherwise
  kExact,
  kFine,
};

struct RunConfig {
  ModelId model = ModelId::kModel1;
  Index nx = 200;
  Index nh = 10;
  Index m = 2;
  Index nbf = 4;
  double k = 16.0;
  std::optional<double> epsilon;  // contrast used by `validate`; measured when unset
  std::optional<std::filesystem::path> medium_path;
  std::optional<std::filesystem::path> source_path;
  std::uint64_t seed = 7;
  double contrast = 1e-3;
  int channels = 8;
  std::optional<std::filesystem::path> output_path;
  bool strict_zero_trace = false;
  bool synthesize = false;
  bool dump_eigs = false;
  std::optional<std::pair<Index, Index>> dump_basis;  // (j, i)
  bool deterministic = false;  // write zero timings
  bool coarse_fem = false;     // also report the Q1 solution on the coarse grid
  ReferenceRule reference = ReferenceRule::kAuto;
  TestSpaceRule test_rule = TestSpaceRule::kConjugate;
  WeightRule weight_rule = WeightRule::kScaledCoefficient;
  int threads = 1;
  std::vector<Index> nh_list;  // sweep
  std::vector<Index> m_list;   // sweep and basis-decay
  Index decay_element = 0;
  Index decay_mode = 0;

  ModelOptions model_options() const;
  void validate() const;
};

/// Flat "key = value" text, '#' starts a comment. Unknown keys are errors.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
/// Canonical key/value listing of the configuration (report header).
std::map<std::string, std::string> describe(const RunConfig& config);

/// "1/20", "0.05" or "20" all give NH = 20.
Index parse_coarse_size(std::string_view text);

struct ResolutionDiagnostics {
  double epsilon = 1.0;
  double k_h_over_eps = 0.0;  // k H / epsilon
  double log_k_over_eps = 0.0;  // |log(k / epsilon)|
  bool resolution_ok = true;
  bool oversampling_ok = true;
  std::vector<std::string> warnings;
};

/// Checks k H / eps <= 1 and m >= |log(k / eps)|. Emits warnings only.
ResolutionDiagnostics validate_resolution(const RunConfig& config, double epsilon);
ResolutionDiagnostics validate_resolution(const RunConfig& config);

struct StageTimings {
  double setup = 0.0;
  double spectral = 0.0;
  double basis = 0.0;
  double coarse_assembly = 0.0;
  double coarse_solve = 0.0;
  double reference = 0.0;

  double total() const {
    return setup + spectral + basis + coarse_assembly + coarse_solve + reference;
  }
};

struct RunResult {
  RunConfig config;
  ErrorReport errors;
  std::string reference_kind;  // "exact" or "fine"
  std::optional<ErrorReport> fine_vs_exact;
  std::optional<ErrorReport> coarse_fem;
  Index coarse_dofs = 0;
  double norm_l2 = 0.0;  // of u_ms
  double norm_a = 0.0;
  StageTimings timings;
  ResolutionDiagnostics diagnostics;
  Solution multiscale;
  Solution reference;
  std::vector<AuxiliaryBasis> eigen;  // filled when dump_eigs
  std::optional<ComplexVector> basis_field;
};

/// Shared per-problem data, reused across the cells of a sweep.
struct Problem {
  ProblemSpec spec;
  std::optional<Solution> fine;  // lazily computed reference
};

Problem make_problem(const RunConfig& config);

RunResult run(const RunConfig& config);
RunResult run(const RunConfig& config, Problem& problem);

struct SweepRow {
  Index nh = 0;
  Index m = 0;
  Index nbf = 0;
  double e_l2 = 0.0;
  double e_energy = 0.0;
  Index coarse_dofs = 0;
  double seconds = 0.0;
  std::string failure;  // empty on success
};

/// One row per (NH, m) in the order H descending, m ascending; failing
/// cells carry NaN errors and a message.
std::vector<SweepRow> sweep(const RunConfig& config);

DecayReport basis_decay(const RunConfig& config);

/// Report and CSV writers; all formatting is locale-free and deterministic.
std::string format_number(double value);
std::string report_json(const RunResult& result);
std::string sweep_csv(const std::vector<SweepRow>& rows, bool deterministic);
std::string decay_csv(const DecayReport& report);
std::string field_csv(const FineGrid& grid, const ComplexVector& field);
std::string basis_csv(const FineGrid& grid, const ComplexVector& field);
std::string eigs_csv(const std::vector<AuxiliaryBasis>& bases);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace cemhelm
