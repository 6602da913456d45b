#include "gmf/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmf/errors.hpp"
#include "gmf/stats.hpp"

namespace gmf {

namespace {

// Weighted sums of [0,1] values may spill past the interval by a few ulps;
// snap those back without touching genuinely out-of-range values.
constexpr double kUnitSnap = 1e-9;

double snap_unit(double x) {
  if (x < 0.0 && x > -kUnitSnap) return 0.0;
  if (x > 1.0 && x < 1.0 + kUnitSnap) return 1.0;
  return x;
}

// Groups whose sum already equals 1 within this tolerance are left alone,
// which makes normalization idempotent and keeps round-tripped weights
// bit-identical.
constexpr double kNormalizeSkip = 1e-12;

// Key printer for the group validator below.
std::ostream& operator<<(std::ostream& os, Rubric r) {
  return os << to_string(r);
}

template <typename Map>
void validate_and_normalize_group(Map& weights, const std::string& group) {
  double sum = 0.0;
  for (const auto& [key, w] : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      std::ostringstream msg;
      msg << group << ": weight for '" << key
          << "' must be a finite nonnegative number";
      throw SchemaError(msg.str());
    }
    sum += w;
  }
  if (sum <= 0.0) {
    throw SchemaError(group + ": weights must not all be zero");
  }
  if (std::abs(sum - 1.0) <= kNormalizeSkip) return;
  for (auto& [key, w] : weights) w /= sum;
}

}  // namespace

std::string_view to_string(NormalizationMethod m) {
  switch (m) {
    case NormalizationMethod::MinMax: return "minmax";
    case NormalizationMethod::ZScore: return "zscore";
    case NormalizationMethod::Rank: return "rank";
  }
  return "?";
}

std::optional<NormalizationMethod> normalization_from_string(
    std::string_view s) {
  if (s == "minmax") return NormalizationMethod::MinMax;
  if (s == "zscore") return NormalizationMethod::ZScore;
  if (s == "rank") return NormalizationMethod::Rank;
  return std::nullopt;
}

std::string_view to_string(MissingPolicy p) {
  return p == MissingPolicy::Renormalize ? "renormalize" : "strict";
}

std::optional<MissingPolicy> missing_policy_from_string(std::string_view s) {
  if (s == "renormalize") return MissingPolicy::Renormalize;
  if (s == "strict") return MissingPolicy::Strict;
  return std::nullopt;
}

WeightScheme WeightScheme::equal_default(const Dataset& d) {
  std::vector<Rubric> rubrics = d.rubrics_scored();
  if (rubrics.empty()) {
    throw SchemaError("dataset has no scored (non-descriptive) indicator");
  }
  WeightScheme out;
  out.mode_ = Mode::EqualDefault;
  double wk = 1.0 / static_cast<double>(rubrics.size());
  for (Rubric r : rubrics) {
    out.rubric_[r] = wk;
    std::vector<std::string> ids = d.scored_indicators(r);
    double wj = 1.0 / static_cast<double>(ids.size());
    for (const std::string& id : ids) out.indicator_[r][id] = wj;
    out.order_[r] = std::move(ids);
  }
  return out;
}

WeightScheme WeightScheme::explicit_weights(
    const Dataset& d, const std::map<Rubric, double>& rubric_weights,
    const std::map<Rubric, std::map<std::string, double>>& indicator_weights) {
  WeightScheme out = equal_default(d);
  out.mode_ = Mode::Explicit;

  if (!rubric_weights.empty()) {
    for (const auto& [r, w] : rubric_weights) {
      if (out.rubric_.find(r) == out.rubric_.end()) {
        throw SchemaError(std::string("rubric_weights: rubric '") +
                          std::string(to_string(r)) +
                          "' has no scored indicator in the dataset");
      }
    }
    if (rubric_weights.size() != out.rubric_.size()) {
      for (const auto& [r, w] : out.rubric_) {
        if (rubric_weights.find(r) == rubric_weights.end()) {
          throw SchemaError(std::string("rubric_weights: missing weight for "
                                        "rubric '") +
                            std::string(to_string(r)) + "'");
        }
      }
    }
    std::map<Rubric, double> group = rubric_weights;
    validate_and_normalize_group(group, "rubric_weights");
    out.rubric_ = std::move(group);
  }

  for (const auto& [r, given] : indicator_weights) {
    auto it = out.indicator_.find(r);
    if (it == out.indicator_.end()) {
      throw SchemaError(std::string("indicator_weights: rubric '") +
                        std::string(to_string(r)) +
                        "' has no scored indicator in the dataset");
    }
    std::string group = "indicator_weights[" + std::string(to_string(r)) + "]";
    for (const auto& [id, w] : given) {
      const IndicatorDefinition* def = d.find_indicator(id);
      if (def == nullptr || def->rubric != r) {
        throw SchemaError(group + ": unknown indicator '" + id + "'");
      }
      if (def->descriptive) {
        throw SchemaError(group + ": indicator '" + id +
                          "' is descriptive and cannot carry weight");
      }
    }
    for (const auto& [id, w] : it->second) {
      if (given.find(id) == given.end()) {
        throw SchemaError(group + ": missing weight for indicator '" + id +
                          "'");
      }
    }
    std::map<std::string, double> normalized = given;
    validate_and_normalize_group(normalized, group);
    it->second = std::move(normalized);
  }

  return out;
}

double WeightScheme::rubric_weight(Rubric r) const {
  auto it = rubric_.find(r);
  return it == rubric_.end() ? 0.0 : it->second;
}

double WeightScheme::indicator_weight(Rubric r, const std::string& id) const {
  auto it = indicator_.find(r);
  if (it == indicator_.end()) return 0.0;
  auto jt = it->second.find(id);
  return jt == it->second.end() ? 0.0 : jt->second;
}

const std::vector<std::string>& WeightScheme::indicator_order(Rubric r) const {
  static const std::vector<std::string> kEmpty;
  auto it = order_.find(r);
  return it == order_.end() ? kEmpty : it->second;
}

std::vector<Rubric> WeightScheme::rubrics() const {
  std::vector<Rubric> out;
  for (const auto& [r, w] : rubric_) out.push_back(r);
  return out;
}

bool WeightScheme::covers(const Dataset& d) const {
  std::vector<Rubric> scored = d.rubrics_scored();
  if (scored.size() != rubric_.size()) return false;
  for (Rubric r : scored) {
    auto it = indicator_.find(r);
    if (it == indicator_.end()) return false;
    std::vector<std::string> ids = d.scored_indicators(r);
    if (ids.size() != it->second.size()) return false;
    for (const std::string& id : ids) {
      if (it->second.find(id) == it->second.end()) return false;
    }
  }
  return true;
}

WeightScheme WeightScheme::restricted_to(const Dataset& d) const {
  if (mode_ == Mode::EqualDefault) return equal_default(d);

  WeightScheme out;
  out.mode_ = Mode::Explicit;
  std::vector<Rubric> rubrics = d.rubrics_scored();
  if (rubrics.empty()) {
    throw SchemaError("dataset has no scored (non-descriptive) indicator");
  }
  std::map<Rubric, double> rw;
  for (Rubric r : rubrics) {
    auto it = rubric_.find(r);
    if (it == rubric_.end()) {
      throw SchemaError(std::string("weight scheme lacks rubric '") +
                        std::string(to_string(r)) + "'");
    }
    rw[r] = it->second;
  }
  validate_and_normalize_group(rw, "rubric_weights");
  out.rubric_ = std::move(rw);

  for (Rubric r : rubrics) {
    std::vector<std::string> ids = d.scored_indicators(r);
    std::map<std::string, double> group;
    for (const std::string& id : ids) {
      double w = indicator_weight(r, id);
      if (indicator_.at(r).find(id) == indicator_.at(r).end()) {
        throw SchemaError("weight scheme lacks indicator '" + id + "'");
      }
      group[id] = w;
    }
    validate_and_normalize_group(group,
                                 "indicator_weights[" +
                                     std::string(to_string(r)) + "]");
    out.indicator_[r] = std::move(group);
    out.order_[r] = std::move(ids);
  }
  return out;
}

WeightScheme WeightScheme::perturbed(
    const std::function<double()>& next_factor) const {
  WeightScheme out = *this;
  out.mode_ = Mode::Explicit;
  for (auto& [r, w] : out.rubric_) w *= next_factor();
  validate_and_normalize_group(out.rubric_, "rubric_weights");
  for (auto& [r, group] : out.indicator_) {
    for (const std::string& id : out.order_.at(r)) group.at(id) *= next_factor();
    validate_and_normalize_group(group,
                                 "indicator_weights[" +
                                     std::string(to_string(r)) + "]");
  }
  return out;
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Experimental: return "Experimental";
    case Stage::Foundational: return "Foundational";
    case Stage::Developmental: return "Developmental";
    case Stage::Advanced: return "Advanced";
  }
  return "?";
}

std::optional<Stage> stage_from_string(std::string_view s) {
  for (const StageRange& r : stage_ranges()) {
    if (s == to_string(r.stage)) return r.stage;
  }
  return std::nullopt;
}

const std::array<StageRange, 4>& stage_ranges() {
  static const std::array<StageRange, 4> kRanges = {{
      {Stage::Experimental, 0.0, 0.25, false},
      {Stage::Foundational, 0.25, 0.5, false},
      {Stage::Developmental, 0.5, 0.75, false},
      {Stage::Advanced, 0.75, 1.0, true},
  }};
  return kRanges;
}

Stage classify_stage(double normalized_gmf) {
  if (!(normalized_gmf >= 0.0 && normalized_gmf <= 1.0)) {
    std::ostringstream msg;
    msg << "normalized GMF " << normalized_gmf << " outside [0, 1]";
    throw OutOfRangeError(msg.str());
  }
  if (normalized_gmf < 0.25) return Stage::Experimental;
  if (normalized_gmf < 0.5) return Stage::Foundational;
  if (normalized_gmf < 0.75) return Stage::Developmental;
  return Stage::Advanced;
}

const IndicatorColumn* ValueMatrix::find(std::string_view indicator) const {
  for (const IndicatorColumn& c : columns) {
    if (c.indicator == indicator) return &c;
  }
  return nullptr;
}

ValueMatrix encode_dataset(const Dataset& d) {
  ValueMatrix out;
  for (const Program& p : d.programs) out.programs.push_back(p.id);
  for (const IndicatorDefinition& def : d.indicators) {
    IndicatorColumn col;
    col.indicator = def.id;
    col.values.reserve(d.programs.size());
    for (const Program& p : d.programs) {
      const CellValue* v = d.find_value(p.id, def.id);
      if (v == nullptr) {
        throw SchemaError("no value for pair (" + p.id + ", " + def.id + ")");
      }
      col.values.push_back(encode_value(*v, def));
    }
    out.columns.push_back(std::move(col));
  }
  return out;
}

ValueMatrix scored_subset(const ValueMatrix& m, const Dataset& d) {
  ValueMatrix out;
  out.programs = m.programs;
  for (const IndicatorColumn& c : m.columns) {
    const IndicatorDefinition* def = d.find_indicator(c.indicator);
    if (def != nullptr && !def->descriptive) out.columns.push_back(c);
  }
  return out;
}

ValueMatrix orient_values(const ValueMatrix& m, const Dataset& d) {
  ValueMatrix out = m;
  for (IndicatorColumn& c : out.columns) {
    const IndicatorDefinition* def = d.find_indicator(c.indicator);
    if (def == nullptr) {
      throw SchemaError("unknown indicator '" + c.indicator + "'");
    }
    if (def->polarity == Polarity::LowerBetter) {
      for (auto& v : c.values) {
        if (v) v = -*v;
      }
    }
  }
  return out;
}

NormalizedColumn normalize_column(
    std::span<const std::optional<double>> column, NormalizationMethod method,
    double degenerate_value) {
  std::vector<double> present;
  for (const auto& v : column) {
    if (v) present.push_back(*v);
  }
  if (present.empty()) {
    throw EmptyColumnError("every entry of the column is missing");
  }

  NormalizedColumn out;
  out.values.assign(column.begin(), column.end());
  auto [mn_it, mx_it] = std::minmax_element(present.begin(), present.end());
  double mn = *mn_it, mx = *mx_it;

  switch (method) {
    case NormalizationMethod::MinMax: {
      if (mn == mx) {
        out.degenerate = true;
        for (auto& v : out.values) {
          if (v) v = degenerate_value;
        }
        return out;
      }
      for (auto& v : out.values) {
        if (v) v = (*v - mn) / (mx - mn);
      }
      return out;
    }
    case NormalizationMethod::ZScore: {
      double m = stats::mean(present);
      double sd = stats::population_stddev(present);
      if (sd == 0.0) {
        out.degenerate = true;
        for (auto& v : out.values) {
          if (v) v = 0.0;
        }
        return out;
      }
      for (auto& v : out.values) {
        if (v) v = (*v - m) / sd;
      }
      return out;
    }
    case NormalizationMethod::Rank: {
      if (mn == mx) {
        out.degenerate = true;
        for (auto& v : out.values) {
          if (v) v = degenerate_value;
        }
        return out;
      }
      std::vector<double> ranks = stats::average_ranks(present);
      double n = static_cast<double>(present.size());
      std::size_t next = 0;
      for (auto& v : out.values) {
        if (v) v = (ranks[next++] - 1.0) / (n - 1.0);
      }
      return out;
    }
  }
  throw Error("unknown normalization method");
}

ValueMatrix normalize_matrix(const ValueMatrix& m, NormalizationMethod method,
                             double degenerate_value,
                             std::vector<Finding>& warnings) {
  ValueMatrix out;
  out.programs = m.programs;
  for (const IndicatorColumn& c : m.columns) {
    NormalizedColumn norm;
    try {
      norm = normalize_column(c.values, method, degenerate_value);
    } catch (const EmptyColumnError&) {
      throw EmptyColumnError("indicator '" + c.indicator +
                             "' has no non-missing value");
    }
    if (norm.degenerate) {
      std::ostringstream msg;
      msg << "all values equal; mapped to "
          << (method == NormalizationMethod::ZScore ? 0.0 : degenerate_value);
      warnings.push_back({Severity::Warning, "DegenerateColumn",
                          "indicator(" + c.indicator + ")", msg.str()});
    }
    out.columns.push_back({c.indicator, std::move(norm.values)});
  }
  return out;
}

std::size_t RubricScores::program_index(std::string_view id) const {
  for (std::size_t i = 0; i < programs.size(); ++i) {
    if (programs[i] == id) return i;
  }
  throw Error("unknown program '" + std::string(id) + "'");
}

std::size_t RubricScores::rubric_index(Rubric r) const {
  for (std::size_t k = 0; k < rubrics.size(); ++k) {
    if (rubrics[k] == r) return k;
  }
  throw Error(std::string("rubric '") + std::string(to_string(r)) +
              "' not scored");
}

double RubricScores::raw_at(std::string_view program, Rubric r) const {
  return raw[program_index(program)][rubric_index(r)];
}

double RubricScores::normalized_at(std::string_view program, Rubric r) const {
  return normalized[program_index(program)][rubric_index(r)];
}

RubricScores compute_rubric_scores(const ValueMatrix& normalized,
                                   const Dataset& d, const WeightScheme& w,
                                   MissingPolicy policy) {
  RubricScores out;
  out.programs = normalized.programs;
  out.rubrics = w.rubrics();

  std::map<std::string_view, const IndicatorColumn*> columns;
  for (const IndicatorColumn& c : normalized.columns) {
    columns[c.indicator] = &c;
  }

  for (std::size_t i = 0; i < out.programs.size(); ++i) {
    std::vector<double> row;
    std::vector<RubricCellProvenance> prov_row;
    for (Rubric r : out.rubrics) {
      RubricCellProvenance prov;
      double weighted = 0.0;
      double present_weight = 0.0;
      std::vector<std::pair<std::string, double>> present;
      for (const std::string& id : w.indicator_order(r)) {
        auto it = columns.find(id);
        if (it == columns.end()) {
          throw SchemaError("weight scheme names indicator '" + id +
                            "' absent from the value matrix");
        }
        const auto& cell = it->second->values[i];
        if (!cell) {
          if (policy == MissingPolicy::Strict) {
            throw MissingValueError("value (" + out.programs[i] + ", " + id +
                                    ") is missing under the strict policy");
          }
          prov.missing.push_back(id);
          continue;
        }
        double wj = w.indicator_weight(r, id);
        present.emplace_back(id, wj);
        present_weight += wj;
        weighted += wj * *cell;
      }
      if (present.empty()) {
        throw AllMissingRubricError(
            "program '" + out.programs[i] + "' has no non-missing indicator "
            "in rubric " + std::string(to_string(r)));
      }
      prov.missing_renormalized = !prov.missing.empty();
      double crs;
      if (prov.missing_renormalized) {
        // Renormalize the weights of present indicators to sum to 1.
        crs = 0.0;
        for (auto& [id, wj] : present) {
          wj /= present_weight;
          crs += wj * *columns.at(id)->values[i];
        }
      } else {
        crs = weighted;
      }
      for (auto& [id, wj] : present) prov.contributions.push_back({id, wj});
      row.push_back(snap_unit(crs));
      prov_row.push_back(std::move(prov));
    }
    out.raw.push_back(std::move(row));
    out.provenance.push_back(std::move(prov_row));
  }
  return out;
}

void normalize_rubric_scores(RubricScores& scores, double degenerate_value,
                             std::vector<Finding>& warnings) {
  scores.normalized.assign(scores.raw.size(),
                           std::vector<double>(scores.rubrics.size(), 0.0));
  for (std::size_t k = 0; k < scores.rubrics.size(); ++k) {
    std::vector<std::optional<double>> column;
    column.reserve(scores.raw.size());
    for (const auto& row : scores.raw) column.emplace_back(row[k]);
    NormalizedColumn norm = normalize_column(
        column, NormalizationMethod::MinMax, degenerate_value);
    if (norm.degenerate) {
      std::ostringstream msg;
      msg << "all raw rubric scores equal; mapped to " << degenerate_value;
      warnings.push_back({Severity::Warning, "DegenerateColumn",
                          "rubric(" +
                              std::string(to_string(scores.rubrics[k])) + ")",
                          msg.str()});
    }
    for (std::size_t i = 0; i < scores.raw.size(); ++i) {
      scores.normalized[i][k] = *norm.values[i];
    }
  }
}

std::vector<CompositeScore> compute_gmf(const RubricScores& scores,
                                        const WeightScheme& w) {
  if (scores.normalized.size() != scores.raw.size()) {
    throw Error("normalized rubric scores not filled");
  }
  std::vector<CompositeScore> out;
  for (std::size_t i = 0; i < scores.programs.size(); ++i) {
    double additive = 0.0;
    double normalized = 0.0;
    for (std::size_t k = 0; k < scores.rubrics.size(); ++k) {
      additive += scores.raw[i][k];
      normalized += w.rubric_weight(scores.rubrics[k]) *
                    scores.normalized[i][k];
    }
    out.push_back({scores.programs[i], additive, snap_unit(normalized)});
  }
  return out;
}

std::vector<MaturityScore> classify_scores(std::span<const CompositeScore> s) {
  std::vector<MaturityScore> out;
  out.reserve(s.size());
  for (const CompositeScore& c : s) {
    out.push_back({c.program, c.additive, c.normalized,
                   classify_stage(c.normalized)});
  }
  return out;
}

const MaturityScore* ScoreReport::find_maturity(
    std::string_view program) const {
  for (const MaturityScore& m : maturity) {
    if (m.program == program) return &m;
  }
  return nullptr;
}

ScoreReport run_pipeline(const Dataset& d, const WeightScheme& scheme,
                         const ScoringOptions& options) {
  ValidationReport validation = validate_dataset(d);
  if (validation.has_errors()) {
    std::ostringstream msg;
    msg << "dataset fails validation with " << validation.error_count()
        << " error(s); first: ";
    for (const Finding& f : validation.findings) {
      if (f.severity == Severity::Error) {
        msg << f.context << " — " << f.message;
        break;
      }
    }
    throw DatasetInvalidError(msg.str());
  }
  if (!scheme.covers(d)) {
    throw SchemaError(
        "weight scheme does not cover the dataset's scored indicators");
  }

  ScoreReport report;
  report.programs = d.programs;
  report.indicators = d.indicators;
  report.scheme = scheme;
  report.options = options;

  auto step = [](const char* name, auto&& fn) -> decltype(fn()) {
    try {
      return fn();
    } catch (const PipelineError&) {
      throw;
    } catch (const std::exception& e) {
      throw PipelineError(name, e.what());
    }
  };

  report.encoded = step("encode", [&] { return encode_dataset(d); });
  ValueMatrix scored = scored_subset(report.encoded, d);
  report.oriented = step("orient", [&] { return orient_values(scored, d); });
  report.normalized = step("normalize_indicator", [&] {
    return normalize_matrix(report.oriented, options.method,
                            options.degenerate_value, report.warnings);
  });
  report.rubric_scores = step("compute_rubric_scores", [&] {
    return compute_rubric_scores(report.normalized, d, scheme,
                                 options.missing);
  });
  step("normalize_rubric_scores", [&] {
    normalize_rubric_scores(report.rubric_scores, options.degenerate_value,
                            report.warnings);
    return 0;
  });
  std::vector<CompositeScore> composites = step(
      "compute_gmf", [&] { return compute_gmf(report.rubric_scores, scheme); });
  report.maturity = step("classify_stage",
                         [&] { return classify_scores(composites); });
  return report;
}

}  // namespace gmf
