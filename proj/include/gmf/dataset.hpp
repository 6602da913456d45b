#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gmf/validation.hpp"

namespace gmf {

/// The six assessment rubrics. The set is closed: every indicator belongs
/// to exactly one of them.
enum class Rubric { FAO, PSO, GOV, EFI, TAC, COM };

inline constexpr std::array<Rubric, 6> kRubrics = {
    Rubric::FAO, Rubric::PSO, Rubric::GOV,
    Rubric::EFI, Rubric::TAC, Rubric::COM};

std::string_view to_string(Rubric r);
std::string_view rubric_title(Rubric r);
std::optional<Rubric> rubric_from_string(std::string_view s);

/// Whether larger raw values indicate higher maturity.
enum class Polarity { HigherBetter, LowerBetter };

enum class ValueKind { Numeric, Boolean, Ordinal };

std::string_view to_string(Polarity p);
std::optional<Polarity> polarity_from_string(std::string_view s);
std::string_view to_string(ValueKind k);
std::optional<ValueKind> value_kind_from_string(std::string_view s);

/// One of the data points collected per program.
///
/// `weight` is the raw weight recorded with the definition; zero means the
/// indicator is descriptive-only: it is reported for context but never
/// scored. Scoring weights come from a WeightScheme, which by default
/// assigns equal weights to all non-descriptive indicators of a rubric.
struct IndicatorDefinition {
  std::string id;
  std::string name;
  Rubric rubric = Rubric::FAO;
  Polarity polarity = Polarity::HigherBetter;
  ValueKind kind = ValueKind::Numeric;
  std::vector<std::string> levels;  // Ordinal only; ordered low -> high
  std::string unit;                 // Numeric only; display label, optional
  double weight = 1.0;
  bool descriptive = false;  // invariant: weight == 0 <=> descriptive

  friend bool operator==(const IndicatorDefinition&,
                         const IndicatorDefinition&) = default;
};

struct Program {
  std::string id;
  std::string name;
  std::string ecosystem;
  std::map<std::string, std::string> metadata;

  friend bool operator==(const Program&, const Program&) = default;
};

/// Explicit missing marker. Missingness is first-class: a dataset must
/// record it, never omit the cell.
struct Missing {
  friend bool operator==(Missing, Missing) { return true; }
};

/// A cell holds exactly one of: nothing, a number, a flag, or an ordinal
/// level label.
using CellValue = std::variant<Missing, double, bool, std::string>;

inline bool is_missing(const CellValue& v) {
  return std::holds_alternative<Missing>(v);
}

struct IndicatorValue {
  std::string program;
  std::string indicator;
  CellValue value;

  friend bool operator==(const IndicatorValue&,
                         const IndicatorValue&) = default;
};

/// Programs x indicators value table. Immutable by convention: nothing in
/// the engine mutates a dataset after construction, so sharing across
/// threads is safe.
struct Dataset {
  std::vector<Program> programs;
  std::vector<IndicatorDefinition> indicators;
  std::vector<IndicatorValue> values;

  const Program* find_program(std::string_view id) const;
  const IndicatorDefinition* find_indicator(std::string_view id) const;
  const CellValue* find_value(std::string_view program,
                              std::string_view indicator) const;

  /// Rubrics owning at least one indicator, in canonical order.
  std::vector<Rubric> rubrics_present() const;
  /// Rubrics owning at least one non-descriptive indicator.
  std::vector<Rubric> rubrics_scored() const;
  /// Ids of non-descriptive indicators of one rubric, in dataset order.
  std::vector<std::string> scored_indicators(Rubric r) const;

  /// Copy of the dataset without one indicator and its values.
  Dataset without_indicator(std::string_view id) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Checks every dataset invariant and returns findings instead of throwing.
///
/// Errors: duplicate ids, unresolved references, duplicate or absent
/// (program, indicator) cells, kind mismatches, weight/descriptive
/// inconsistencies, ordinal indicators with fewer than two levels, and
/// rubrics represented only by descriptive indicators.
/// Warnings: a program with more than 50% missing values.
ValidationReport validate_dataset(const Dataset& d);

/// Maps a cell onto the common numeric scale used by normalization:
/// Boolean -> {0, 1}; Ordinal with L levels -> rank / (L - 1); Numeric ->
/// unchanged. Missing propagates as nullopt.
///
/// Throws KindMismatchError when the variant disagrees with def.kind or an
/// ordinal label is not one of the declared levels.
std::optional<double> encode_value(const CellValue& v,
                                   const IndicatorDefinition& def);

}  // namespace gmf
