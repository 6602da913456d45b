#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmf/dataset.hpp"
#include "gmf/validation.hpp"

namespace gmf {

enum class NormalizationMethod { MinMax, ZScore, Rank };
enum class MissingPolicy { Renormalize, Strict };

std::string_view to_string(NormalizationMethod m);
std::optional<NormalizationMethod> normalization_from_string(std::string_view s);
std::string_view to_string(MissingPolicy p);
std::optional<MissingPolicy> missing_policy_from_string(std::string_view s);

struct ScoringOptions {
  NormalizationMethod method = NormalizationMethod::MinMax;
  MissingPolicy missing = MissingPolicy::Renormalize;
  /// Output for a constant min-max/rank column. Z-score degenerates to 0.
  double degenerate_value = 0.5;

  friend bool operator==(const ScoringOptions&, const ScoringOptions&) = default;
};

/// Normalized weights over rubrics and over each rubric's non-descriptive
/// indicators. Groups sum to 1 (tolerance 1e-9); every weight lies in
/// [0, 1]. EqualDefault assigns 1/n within each rubric and 1/m across the
/// m scored rubrics.
class WeightScheme {
 public:
  enum class Mode { EqualDefault, Explicit };

  static WeightScheme equal_default(const Dataset& d);

  /// Explicit weights. Empty maps fall back to equal weights; a provided
  /// group must cover its members exactly. Weights are validated (finite,
  /// nonnegative, group sum > 0) and normalized per group.
  static WeightScheme explicit_weights(
      const Dataset& d, const std::map<Rubric, double>& rubric_weights,
      const std::map<Rubric, std::map<std::string, double>>& indicator_weights);

  Mode mode() const { return mode_; }
  const std::map<Rubric, double>& rubric_weights() const { return rubric_; }
  const std::map<Rubric, std::map<std::string, double>>& indicator_weights()
      const {
    return indicator_;
  }
  double rubric_weight(Rubric r) const;
  double indicator_weight(Rubric r, const std::string& id) const;
  /// Scored indicator ids of one rubric in dataset order.
  const std::vector<std::string>& indicator_order(Rubric r) const;
  std::vector<Rubric> rubrics() const;

  /// True when the scheme covers exactly the scored indicators of d.
  bool covers(const Dataset& d) const;

  /// Scheme for a sub-dataset: absent indicators are dropped and every
  /// touched group renormalized. EqualDefault recomputes equal weights.
  WeightScheme restricted_to(const Dataset& d) const;

  /// Each weight multiplied by next_factor() (call order: rubrics in
  /// canonical order, then each rubric's indicators in dataset order),
  /// groups renormalized.
  WeightScheme perturbed(const std::function<double()>& next_factor) const;

  friend bool operator==(const WeightScheme&, const WeightScheme&) = default;

 private:
  Mode mode_ = Mode::EqualDefault;
  std::map<Rubric, double> rubric_;
  std::map<Rubric, std::map<std::string, double>> indicator_;
  std::map<Rubric, std::vector<std::string>> order_;
};

/// Maturity stages over the normalized composite, quartile bands with the
/// last interval closed at 1.
enum class Stage { Experimental, Foundational, Developmental, Advanced };

std::string_view to_string(Stage s);
std::optional<Stage> stage_from_string(std::string_view s);

struct StageRange {
  Stage stage;
  double lo;
  double hi;
  bool closed_hi;
};

const std::array<StageRange, 4>& stage_ranges();

/// Experimental [0, 0.25), Foundational [0.25, 0.5), Developmental
/// [0.5, 0.75), Advanced [0.75, 1]. Throws OutOfRangeError outside [0, 1].
Stage classify_stage(double normalized_gmf);

/// One indicator's per-program values; index matches ValueMatrix::programs.
struct IndicatorColumn {
  std::string indicator;
  std::vector<std::optional<double>> values;

  friend bool operator==(const IndicatorColumn&,
                         const IndicatorColumn&) = default;
};

struct ValueMatrix {
  std::vector<std::string> programs;    // dataset order
  std::vector<IndicatorColumn> columns; // dataset indicator order

  const IndicatorColumn* find(std::string_view indicator) const;

  friend bool operator==(const ValueMatrix&, const ValueMatrix&) = default;
};

/// Encoded values for every indicator (descriptive included).
ValueMatrix encode_dataset(const Dataset& d);

/// Restriction to non-descriptive indicators.
ValueMatrix scored_subset(const ValueMatrix& m, const Dataset& d);

/// Higher-better values pass through; lower-better values are negated so a
/// later min-max yields (max - x) / (max - min). Missing passes through.
ValueMatrix orient_values(const ValueMatrix& m, const Dataset& d);

struct NormalizedColumn {
  std::vector<std::optional<double>> values;
  bool degenerate = false;
};

/// Normalizes one column over its non-missing entries; missing entries stay
/// missing. Throws EmptyColumnError when every entry is missing.
///
/// MinMax: (x - min) / (max - min); constant column -> degenerate_value.
/// ZScore: (x - mean) / population stddev; zero stddev -> 0.
/// Rank:   average rank scaled onto [0, 1]; constant column ->
///         degenerate_value.
NormalizedColumn normalize_column(std::span<const std::optional<double>> column,
                                  NormalizationMethod method,
                                  double degenerate_value);

/// normalize_column over every column; degenerate columns append a
/// DegenerateColumn warning naming the indicator.
ValueMatrix normalize_matrix(const ValueMatrix& m, NormalizationMethod method,
                             double degenerate_value,
                             std::vector<Finding>& warnings);

/// Weight actually applied to one indicator in one (program, rubric) cell.
struct RubricContribution {
  std::string indicator;
  double weight;

  friend bool operator==(const RubricContribution&,
                         const RubricContribution&) = default;
};

struct RubricCellProvenance {
  std::vector<RubricContribution> contributions;
  std::vector<std::string> missing;  // indicator ids missing for this cell
  bool missing_renormalized = false;

  friend bool operator==(const RubricCellProvenance&,
                         const RubricCellProvenance&) = default;
};

/// Composite rubric scores: raw weighted sums and their per-rubric min-max
/// normalization, with per-cell provenance.
struct RubricScores {
  std::vector<std::string> programs;  // dataset order
  std::vector<Rubric> rubrics;        // canonical order
  std::vector<std::vector<double>> raw;         // [program][rubric]
  std::vector<std::vector<double>> normalized;  // empty until second stage
  std::vector<std::vector<RubricCellProvenance>> provenance;

  std::size_t program_index(std::string_view id) const;
  std::size_t rubric_index(Rubric r) const;
  double raw_at(std::string_view program, Rubric r) const;
  double normalized_at(std::string_view program, Rubric r) const;

  friend bool operator==(const RubricScores&, const RubricScores&) = default;
};

/// raw_crs(i, k) = sum_j w_jk x'_ijk over the non-missing indicators of
/// rubric k; when cells are missing the weights of present indicators are
/// renormalized to sum to 1 and the provenance records it. Descriptive
/// indicators never contribute.
///
/// Throws AllMissingRubricError when a program has no non-missing indicator
/// in some rubric, MissingValueError under MissingPolicy::Strict.
RubricScores compute_rubric_scores(const ValueMatrix& normalized,
                                   const Dataset& d, const WeightScheme& w,
                                   MissingPolicy policy);

/// Second-stage normalization: per rubric, min-max of the raw column across
/// programs, with the same degenerate rule as normalize_column.
void normalize_rubric_scores(RubricScores& scores, double degenerate_value,
                             std::vector<Finding>& warnings);

/// Composite per program: additive = unweighted sum of raw rubric scores;
/// normalized = rubric-weighted sum of normalized rubric scores.
struct CompositeScore {
  std::string program;
  double additive;
  double normalized;

  friend bool operator==(const CompositeScore&, const CompositeScore&) = default;
};

std::vector<CompositeScore> compute_gmf(const RubricScores& scores,
                                        const WeightScheme& w);

struct MaturityScore {
  std::string program;
  double additive_gmf = 0.0;
  double normalized_gmf = 0.0;
  Stage stage = Stage::Experimental;

  friend bool operator==(const MaturityScore&, const MaturityScore&) = default;
};

std::vector<MaturityScore> classify_scores(std::span<const CompositeScore> s);

/// Full pipeline output with every intermediate matrix, the warnings
/// raised along the way, and enough provenance to audit each number.
struct ScoreReport {
  std::vector<Program> programs;
  std::vector<IndicatorDefinition> indicators;
  WeightScheme scheme;
  ScoringOptions options;
  ValueMatrix encoded;     // all indicators
  ValueMatrix oriented;    // scored indicators only
  ValueMatrix normalized;  // scored indicators only
  RubricScores rubric_scores;
  std::vector<MaturityScore> maturity;
  std::vector<Finding> warnings;

  const MaturityScore* find_maturity(std::string_view program) const;
};

/// encode -> orient -> normalize_indicator -> compute_rubric_scores ->
/// normalize_rubric_scores -> compute_gmf -> classify_stage.
///
/// The dataset is validated first (DatasetInvalidError on Errors); any
/// stage failure is rethrown as PipelineError naming the step. The
/// pipeline is a pure function: identical inputs give bit-identical
/// reports.
ScoreReport run_pipeline(const Dataset& d, const WeightScheme& scheme,
                         const ScoringOptions& options = {});

}  // namespace gmf
