#include "gmf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "gmf/errors.hpp"

namespace gmf {

std::string_view to_string(Severity s) {
  return s == Severity::Error ? "error" : "warning";
}

bool ValidationReport::has_errors() const { return error_count() > 0; }

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(
      std::count_if(findings.begin(), findings.end(), [](const Finding& f) {
        return f.severity == Severity::Error;
      }));
}

std::size_t ValidationReport::warning_count() const {
  return findings.size() - error_count();
}

std::string_view to_string(Rubric r) {
  switch (r) {
    case Rubric::FAO: return "FAO";
    case Rubric::PSO: return "PSO";
    case Rubric::GOV: return "GOV";
    case Rubric::EFI: return "EFI";
    case Rubric::TAC: return "TAC";
    case Rubric::COM: return "COM";
  }
  return "?";
}

std::string_view rubric_title(Rubric r) {
  switch (r) {
    case Rubric::FAO: return "Focus Areas, Objectives";
    case Rubric::PSO: return "Program Structure";
    case Rubric::GOV: return "Governance";
    case Rubric::EFI: return "Effectiveness, Impact";
    case Rubric::TAC: return "Transparency";
    case Rubric::COM: return "Community Engagement";
  }
  return "?";
}

std::optional<Rubric> rubric_from_string(std::string_view s) {
  for (Rubric r : kRubrics) {
    if (s == to_string(r)) return r;
  }
  return std::nullopt;
}

std::string_view to_string(Polarity p) {
  return p == Polarity::HigherBetter ? "higher_better" : "lower_better";
}

std::optional<Polarity> polarity_from_string(std::string_view s) {
  if (s == "higher_better") return Polarity::HigherBetter;
  if (s == "lower_better") return Polarity::LowerBetter;
  return std::nullopt;
}

std::string_view to_string(ValueKind k) {
  switch (k) {
    case ValueKind::Numeric: return "numeric";
    case ValueKind::Boolean: return "boolean";
    case ValueKind::Ordinal: return "ordinal";
  }
  return "?";
}

std::optional<ValueKind> value_kind_from_string(std::string_view s) {
  if (s == "numeric") return ValueKind::Numeric;
  if (s == "boolean") return ValueKind::Boolean;
  if (s == "ordinal") return ValueKind::Ordinal;
  return std::nullopt;
}

const Program* Dataset::find_program(std::string_view id) const {
  for (const Program& p : programs) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const IndicatorDefinition* Dataset::find_indicator(std::string_view id) const {
  for (const IndicatorDefinition& def : indicators) {
    if (def.id == id) return &def;
  }
  return nullptr;
}

const CellValue* Dataset::find_value(std::string_view program,
                                     std::string_view indicator) const {
  for (const IndicatorValue& v : values) {
    if (v.program == program && v.indicator == indicator) return &v.value;
  }
  return nullptr;
}

std::vector<Rubric> Dataset::rubrics_present() const {
  std::vector<Rubric> out;
  for (Rubric r : kRubrics) {
    bool present = std::any_of(
        indicators.begin(), indicators.end(),
        [r](const IndicatorDefinition& d) { return d.rubric == r; });
    if (present) out.push_back(r);
  }
  return out;
}

std::vector<Rubric> Dataset::rubrics_scored() const {
  std::vector<Rubric> out;
  for (Rubric r : kRubrics) {
    bool scored = std::any_of(indicators.begin(), indicators.end(),
                              [r](const IndicatorDefinition& d) {
                                return d.rubric == r && !d.descriptive;
                              });
    if (scored) out.push_back(r);
  }
  return out;
}

std::vector<std::string> Dataset::scored_indicators(Rubric r) const {
  std::vector<std::string> out;
  for (const IndicatorDefinition& d : indicators) {
    if (d.rubric == r && !d.descriptive) out.push_back(d.id);
  }
  return out;
}

Dataset Dataset::without_indicator(std::string_view id) const {
  Dataset out;
  out.programs = programs;
  for (const IndicatorDefinition& d : indicators) {
    if (d.id != id) out.indicators.push_back(d);
  }
  for (const IndicatorValue& v : values) {
    if (v.indicator != id) out.values.push_back(v);
  }
  return out;
}

namespace {

std::string cell_context(std::string_view program, std::string_view indicator) {
  std::string out = "value(";
  out += program;
  out += ", ";
  out += indicator;
  out += ")";
  return out;
}

/// Kind check without encoding; returns a description of the mismatch or
/// empty when the value is acceptable.
std::string kind_mismatch(const CellValue& v, const IndicatorDefinition& def) {
  if (is_missing(v)) return {};
  switch (def.kind) {
    case ValueKind::Numeric:
      if (!std::holds_alternative<double>(v)) {
        return "expects a numeric value";
      }
      return {};
    case ValueKind::Boolean:
      if (!std::holds_alternative<bool>(v)) {
        return "expects a boolean value";
      }
      return {};
    case ValueKind::Ordinal: {
      const auto* s = std::get_if<std::string>(&v);
      if (s == nullptr) return "expects an ordinal level label";
      if (std::find(def.levels.begin(), def.levels.end(), *s) ==
          def.levels.end()) {
        return "has no level named '" + *s + "'";
      }
      return {};
    }
  }
  return {};
}

}  // namespace

ValidationReport validate_dataset(const Dataset& d) {
  ValidationReport report;
  auto error = [&](std::string code, std::string context, std::string message) {
    report.findings.push_back({Severity::Error, std::move(code),
                               std::move(context), std::move(message)});
  };
  auto warning = [&](std::string code, std::string context,
                     std::string message) {
    report.findings.push_back({Severity::Warning, std::move(code),
                               std::move(context), std::move(message)});
  };

  if (d.programs.empty()) {
    error("NoPrograms", "dataset", "dataset defines no program");
  }
  if (d.indicators.empty()) {
    error("NoIndicators", "dataset", "dataset defines no indicator");
  }

  std::set<std::string> program_ids;
  for (const Program& p : d.programs) {
    if (p.id.empty()) {
      error("EmptyId", "program", "program with empty id");
    } else if (!program_ids.insert(p.id).second) {
      error("DuplicateProgramId", "program(" + p.id + ")",
            "program id appears more than once");
    }
  }

  std::set<std::string> indicator_ids;
  for (const IndicatorDefinition& def : d.indicators) {
    std::string ctx = "indicator(" + def.id + ")";
    if (def.id.empty()) {
      error("EmptyId", "indicator", "indicator with empty id");
    } else if (!indicator_ids.insert(def.id).second) {
      error("DuplicateIndicatorId", ctx, "indicator id appears more than once");
    }
    if (!(def.weight >= 0.0) || !std::isfinite(def.weight)) {
      error("InvalidWeight", ctx, "weight must be a finite nonnegative number");
    } else if ((def.weight == 0.0) != def.descriptive) {
      error("WeightDescriptiveMismatch", ctx,
            "weight == 0 must coincide with descriptive == true");
    }
    if (def.kind == ValueKind::Ordinal) {
      std::set<std::string_view> distinct(def.levels.begin(), def.levels.end());
      if (def.levels.size() < 2 || distinct.size() != def.levels.size()) {
        error("OrdinalLevels", ctx,
              "ordinal indicator needs at least two distinct levels");
      }
    } else if (!def.levels.empty()) {
      error("LevelsOnNonOrdinal", ctx,
            "levels are only valid for ordinal indicators");
    }
  }

  // Each rubric that appears must contribute at least one scored indicator.
  for (Rubric r : d.rubrics_present()) {
    if (d.scored_indicators(r).empty()) {
      error("RubricAllDescriptive", std::string("rubric(") +
                                        std::string(to_string(r)) + ")",
            "rubric is represented only by descriptive indicators");
    }
  }

  // Value table: resolvable references, no duplicates, kinds match.
  std::set<std::pair<std::string_view, std::string_view>> seen;
  std::map<std::string_view, std::size_t> missing_per_program;
  for (const IndicatorValue& v : d.values) {
    std::string ctx = cell_context(v.program, v.indicator);
    const Program* p = d.find_program(v.program);
    const IndicatorDefinition* def = d.find_indicator(v.indicator);
    if (p == nullptr) {
      error("UnknownReference", ctx, "unknown program '" + v.program + "'");
    }
    if (def == nullptr) {
      error("UnknownReference", ctx,
            "unknown indicator '" + v.indicator + "'");
    }
    if (p != nullptr && def != nullptr) {
      if (!seen.insert({v.program, v.indicator}).second) {
        error("DuplicateValue", ctx,
              "more than one value for this (program, indicator) pair");
      }
      if (std::string why = kind_mismatch(v.value, *def); !why.empty()) {
        error("KindMismatch", ctx,
              std::string(to_string(def->kind)) + " indicator " + why);
      }
      if (is_missing(v.value)) ++missing_per_program[v.program];
    }
  }

  // Completeness: missing cells must be explicit, never absent.
  for (const Program& p : d.programs) {
    for (const IndicatorDefinition& def : d.indicators) {
      if (d.find_value(p.id, def.id) == nullptr) {
        error("MissingCell", cell_context(p.id, def.id),
              "no value for pair; write an explicit Missing/null");
      }
    }
  }

  // Missingness warning: strictly more than half of a program's cells.
  if (!d.indicators.empty()) {
    for (const Program& p : d.programs) {
      std::size_t missing = 0;
      if (auto it = missing_per_program.find(p.id);
          it != missing_per_program.end()) {
        missing = it->second;
      }
      std::size_t total = d.indicators.size();
      if (missing * 2 > total) {
        std::ostringstream msg;
        msg << (100.0 * static_cast<double>(missing) /
                static_cast<double>(total))
            << "% missing (" << missing << " of " << total << " values)";
        warning("HighMissingness", "program(" + p.id + ")", msg.str());
      }
    }
  }

  return report;
}

std::optional<double> encode_value(const CellValue& v,
                                   const IndicatorDefinition& def) {
  if (is_missing(v)) return std::nullopt;
  std::string ctx = "indicator '" + def.id + "'";
  switch (def.kind) {
    case ValueKind::Numeric: {
      const double* x = std::get_if<double>(&v);
      if (x == nullptr) throw KindMismatchError(ctx + " expects a numeric value");
      return *x;
    }
    case ValueKind::Boolean: {
      const bool* b = std::get_if<bool>(&v);
      if (b == nullptr) throw KindMismatchError(ctx + " expects a boolean value");
      return *b ? 1.0 : 0.0;
    }
    case ValueKind::Ordinal: {
      const std::string* s = std::get_if<std::string>(&v);
      if (s == nullptr) {
        throw KindMismatchError(ctx + " expects an ordinal level label");
      }
      auto it = std::find(def.levels.begin(), def.levels.end(), *s);
      if (it == def.levels.end()) {
        throw KindMismatchError(ctx + " has no level named '" + *s + "'");
      }
      if (def.levels.size() < 2) {
        throw Error(ctx + " declares fewer than two ordinal levels");
      }
      auto idx = static_cast<double>(std::distance(def.levels.begin(), it));
      return idx / static_cast<double>(def.levels.size() - 1);
    }
  }
  throw Error(ctx + " has an unknown value kind");
}

}  // namespace gmf
