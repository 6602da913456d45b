#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmf/dataset.hpp"
#include "gmf/scoring.hpp"
#include "gmf/validation.hpp"

namespace gmf {

/// Pinned random stream: per trial t, an mt19937_64 engine seeded with
/// splitmix64 applied to (seed, t); uniforms take the high 53 bits of each
/// output. Trials therefore draw from independent streams and results do
/// not depend on evaluation order.
inline constexpr std::string_view kGeneratorId =
    "mt19937_64(splitmix64(seed,trial))/u53";

struct PerturbationConfig {
  /// Maximum relative weight perturbation; each weight is multiplied by a
  /// factor drawn uniformly from [1 - epsilon, 1 + epsilon]. Zero keeps
  /// every trial at the baseline.
  double epsilon = 0.1;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
};

struct ProgramStability {
  std::string program;
  double baseline_gmf = 0.0;
  Stage baseline_stage = Stage::Experimental;
  double gmf_mean = 0.0;
  double gmf_stddev = 0.0;  // population stddev across successful trials
  double gmf_min = 0.0;
  double gmf_max = 0.0;
  Stage stage_mode = Stage::Experimental;  // ties resolve to the lower stage
  double stage_flip_fraction = 0.0;
};

struct PairReversal {
  std::string a;
  std::string b;
  std::size_t count = 0;  // trials strictly inverting the baseline order
};

struct TrialFailure {
  std::size_t trial = 0;
  std::string error;
};

struct SpearmanSummary {
  double mean = 1.0;
  double min = 1.0;
  double max = 1.0;
};

/// One comparison run: an alternative normalization method or a dataset
/// with one indicator left out.
struct ComparisonRun {
  std::string label;  // method name, or the removed indicator id
  bool skipped = false;
  double spearman = 1.0;                  // vs the baseline ordering
  std::map<std::string, double> gmf;      // program -> normalized GMF
  std::map<std::string, Stage> stage;     // program -> stage
  std::map<std::string, double> delta_gmf;  // leave-one-out only
};

/// Robustness report shared by the three analyses; serialized as one JSON
/// document embedding the full configuration so runs can be reproduced.
struct StabilityReport {
  std::string analysis;  // "perturb" | "compare_normalizations" | "leave_one_out"
  std::optional<PerturbationConfig> config;
  std::string generator;        // perturb only
  std::string baseline_method;  // normalization used by the baseline run
  std::map<std::string, double> baseline_gmf;
  std::map<std::string, Stage> baseline_stage;

  std::vector<ProgramStability> programs;   // perturb only
  std::vector<PairReversal> reversals;      // perturb only
  std::optional<SpearmanSummary> spearman;  // perturb only
  std::size_t successful_trials = 0;

  std::vector<ComparisonRun> runs;  // compare/leave-one-out only
  std::vector<TrialFailure> failures;
  std::vector<Finding> warnings;

  /// Leave-one-out deltas keyed by indicator id (skipped runs excluded).
  std::map<std::string, std::map<std::string, double>> loo_deltas() const;
};

/// Monte Carlo weight perturbation. Per trial every weight is scaled by a
/// factor from [1 - eps, 1 + eps], groups renormalized, the pipeline re-run
/// and the statistics accumulated. Failed trials are recorded, never
/// dropped. Identical inputs (seed included) give byte-identical reports.
StabilityReport perturb_weights(const Dataset& d, const WeightScheme& base,
                                const ScoringOptions& options,
                                const PerturbationConfig& cfg);

/// Runs the pipeline once per method and correlates each ordering with the
/// MinMax baseline. Needs at least two methods.
StabilityReport compare_normalizations(const Dataset& d,
                                       const WeightScheme& scheme,
                                       const ScoringOptions& options,
                                       std::span<const NormalizationMethod> methods);

/// Removes one indicator at a time, renormalizes its rubric's weights and
/// reports the per-program GMF deltas. An indicator whose rubric would lose
/// its last scored member is skipped with a warning; descriptive indicators
/// are included and show zero deltas.
StabilityReport leave_one_out(const Dataset& d, const WeightScheme& scheme,
                              const ScoringOptions& options);

}  // namespace gmf
