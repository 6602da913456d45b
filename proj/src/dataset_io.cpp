#include "gmf/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <utility>

#include "gmf/errors.hpp"
#include "json.hpp"

namespace gmf {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

json parse_json_text(std::string_view text, const char* what) {
  try {
    return json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw SyntaxError(std::string(what) + ": " + e.what());
  }
}

const json& require_field(const json& obj, const char* key,
                          const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(context + ": missing field '" + key + "'");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key,
                           const std::string& context) {
  const json& v = require_field(obj, key, context);
  if (!v.is_string()) {
    throw SchemaError(context + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

double require_number(const json& obj, const char* key,
                      const std::string& context) {
  const json& v = require_field(obj, key, context);
  if (!v.is_number()) {
    throw SchemaError(context + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

Program parse_program(const json& j, std::size_t index) {
  std::string context = "programs[" + std::to_string(index) + "]";
  if (!j.is_object()) throw SchemaError(context + ": must be an object");
  Program p;
  p.id = require_string(j, "id", context);
  context = "program(" + p.id + ")";
  p.name = require_string(j, "name", context);
  if (auto it = j.find("ecosystem"); it != j.end()) {
    if (!it->is_string()) {
      throw SchemaError(context + ": field 'ecosystem' must be a string");
    }
    p.ecosystem = it->get<std::string>();
  }
  if (auto it = j.find("metadata"); it != j.end()) {
    if (!it->is_object()) {
      throw SchemaError(context + ": field 'metadata' must be an object");
    }
    for (const auto& [k, v] : it->items()) {
      if (!v.is_string()) {
        throw SchemaError(context + ": metadata '" + k + "' must be a string");
      }
      p.metadata[k] = v.get<std::string>();
    }
  }
  return p;
}

IndicatorDefinition parse_indicator(const json& j, std::size_t index) {
  std::string context = "indicators[" + std::to_string(index) + "]";
  if (!j.is_object()) throw SchemaError(context + ": must be an object");
  IndicatorDefinition def;
  def.id = require_string(j, "id", context);
  context = "indicator(" + def.id + ")";
  def.name = require_string(j, "name", context);

  std::string rubric = require_string(j, "rubric", context);
  auto r = rubric_from_string(rubric);
  if (!r) throw SchemaError(context + ": unknown rubric '" + rubric + "'");
  def.rubric = *r;

  std::string polarity = require_string(j, "polarity", context);
  auto pol = polarity_from_string(polarity);
  if (!pol) throw SchemaError(context + ": unknown polarity '" + polarity + "'");
  def.polarity = *pol;

  std::string kind = require_string(j, "kind", context);
  auto k = value_kind_from_string(kind);
  if (!k) throw SchemaError(context + ": unknown kind '" + kind + "'");
  def.kind = *k;

  if (auto it = j.find("levels"); it != j.end()) {
    if (def.kind != ValueKind::Ordinal) {
      throw SchemaError(context + ": levels are only valid for ordinal kind");
    }
    if (!it->is_array()) {
      throw SchemaError(context + ": field 'levels' must be an array");
    }
    for (const json& level : *it) {
      if (!level.is_string()) {
        throw SchemaError(context + ": levels must be strings");
      }
      def.levels.push_back(level.get<std::string>());
    }
  }
  if (def.kind == ValueKind::Ordinal) {
    std::set<std::string_view> distinct(def.levels.begin(), def.levels.end());
    if (def.levels.size() < 2 || distinct.size() != def.levels.size()) {
      throw SchemaError(context +
                        ": ordinal kind needs at least two distinct levels");
    }
  }

  if (auto it = j.find("unit"); it != j.end()) {
    if (!it->is_string()) {
      throw SchemaError(context + ": field 'unit' must be a string");
    }
    def.unit = it->get<std::string>();
  }

  def.weight = require_number(j, "weight", context);
  if (!std::isfinite(def.weight) || def.weight < 0.0) {
    throw SchemaError(context +
                      ": weight must be a finite nonnegative number");
  }
  if (auto it = j.find("descriptive"); it != j.end()) {
    if (!it->is_boolean()) {
      throw SchemaError(context + ": field 'descriptive' must be a boolean");
    }
    def.descriptive = it->get<bool>();
  } else {
    def.descriptive = def.weight == 0.0;
  }
  if ((def.weight == 0.0) != def.descriptive) {
    throw SchemaError(context +
                      ": weight == 0 must coincide with descriptive == true");
  }
  return def;
}

CellValue parse_cell(const json& v, const IndicatorDefinition& def,
                     const std::string& context) {
  if (v.is_null()) return Missing{};
  if (v.is_boolean()) {
    if (def.kind != ValueKind::Boolean) {
      throw SchemaError(context + ": " + std::string(to_string(def.kind)) +
                        " indicator cannot take a boolean value");
    }
    return v.get<bool>();
  }
  if (v.is_number()) {
    if (def.kind != ValueKind::Numeric) {
      throw SchemaError(context + ": " + std::string(to_string(def.kind)) +
                        " indicator cannot take a numeric value");
    }
    return v.get<double>();
  }
  if (v.is_string()) {
    if (def.kind != ValueKind::Ordinal) {
      throw SchemaError(context + ": " + std::string(to_string(def.kind)) +
                        " indicator cannot take a level label");
    }
    std::string level = v.get<std::string>();
    if (std::find(def.levels.begin(), def.levels.end(), level) ==
        def.levels.end()) {
      throw SchemaError(context + ": unknown level '" + level + "'");
    }
    return level;
  }
  throw SchemaError(context + ": value must be number, boolean, string or null");
}

struct DefinitionTables {
  std::vector<Program> programs;
  std::vector<IndicatorDefinition> indicators;
};

DefinitionTables parse_definitions(const json& doc) {
  if (!doc.is_object()) {
    throw SchemaError("dataset: top-level document must be an object");
  }
  DefinitionTables out;

  const json& programs = require_field(doc, "programs", "dataset");
  if (!programs.is_array()) {
    throw SchemaError("dataset: field 'programs' must be an array");
  }
  std::set<std::string> program_ids;
  for (std::size_t i = 0; i < programs.size(); ++i) {
    Program p = parse_program(programs[i], i);
    if (!program_ids.insert(p.id).second) {
      throw SchemaError("program(" + p.id + "): duplicate program id");
    }
    out.programs.push_back(std::move(p));
  }

  const json& indicators = require_field(doc, "indicators", "dataset");
  if (!indicators.is_array()) {
    throw SchemaError("dataset: field 'indicators' must be an array");
  }
  std::set<std::string> indicator_ids;
  for (std::size_t i = 0; i < indicators.size(); ++i) {
    IndicatorDefinition def = parse_indicator(indicators[i], i);
    if (!indicator_ids.insert(def.id).second) {
      throw SchemaError("indicator(" + def.id + "): duplicate indicator id");
    }
    out.indicators.push_back(std::move(def));
  }
  return out;
}

std::string value_context(std::string_view program, std::string_view indicator) {
  return "value(" + std::string(program) + ", " + std::string(indicator) + ")";
}

}  // namespace

Dataset parse_dataset_json(std::string_view text) {
  json doc = parse_json_text(text, "dataset JSON");
  DefinitionTables tables = parse_definitions(doc);

  Dataset d;
  d.programs = std::move(tables.programs);
  d.indicators = std::move(tables.indicators);

  const json& values = require_field(doc, "values", "dataset");
  if (!values.is_array()) {
    throw SchemaError("dataset: field 'values' must be an array");
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const json& j = values[i];
    std::string context = "values[" + std::to_string(i) + "]";
    if (!j.is_object()) throw SchemaError(context + ": must be an object");
    IndicatorValue v;
    v.program = require_string(j, "program", context);
    v.indicator = require_string(j, "indicator", context);
    context = value_context(v.program, v.indicator);
    if (d.find_program(v.program) == nullptr) {
      throw SchemaError(context + ": unknown program '" + v.program + "'");
    }
    const IndicatorDefinition* def = d.find_indicator(v.indicator);
    if (def == nullptr) {
      throw SchemaError(context + ": unknown indicator '" + v.indicator + "'");
    }
    if (!seen.insert({v.program, v.indicator}).second) {
      throw SchemaError(context + ": duplicate (program, indicator) pair");
    }
    v.value = parse_cell(require_field(j, "value", context), *def, context);
    d.values.push_back(std::move(v));
  }
  return d;
}

namespace {

/// Minimal RFC-4180-style reader: quoted fields, doubled quotes, embedded
/// separators and newlines. Returns rows of fields plus the line number each
/// row starts on.
struct CsvRow {
  std::size_t line;
  std::vector<std::string> fields;
};

std::vector<CsvRow> read_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::size_t line = 1;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    CsvRow row{line, {}};
    std::string field;
    bool quoted = false;
    bool row_has_content = false;
    for (;; ++i) {
      if (i >= n) {
        if (quoted) {
          throw SyntaxError("line " + std::to_string(row.line) +
                            ": unterminated quoted field");
        }
        break;
      }
      char c = text[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < n && text[i + 1] == '"') {
            field += '"';
            ++i;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line;
          field += c;
        }
        continue;
      }
      if (c == '"' && field.empty()) {
        quoted = true;
        row_has_content = true;
        continue;
      }
      if (c == ',') {
        row.fields.push_back(std::move(field));
        field.clear();
        row_has_content = true;
        continue;
      }
      if (c == '\n' || c == '\r') {
        if (c == '\r' && i + 1 < n && text[i + 1] == '\n') ++i;
        ++i;
        ++line;
        break;
      }
      field += c;
      row_has_content = true;
    }
    if (row_has_content || !row.fields.empty()) {
      row.fields.push_back(std::move(field));
      rows.push_back(std::move(row));
    }
    if (i >= n) break;
  }
  return rows;
}

double parse_csv_number(const std::string& field, std::size_t line) {
  double out = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
    throw SchemaError("line " + std::to_string(line) + ": '" + field +
                      "' is not a finite number");
  }
  return out;
}

}  // namespace

Dataset parse_dataset_csv(std::string_view csv_text,
                          std::string_view sidecar_json) {
  json doc = parse_json_text(sidecar_json, "sidecar JSON");
  DefinitionTables tables = parse_definitions(doc);
  if (auto it = doc.find("values"); it != doc.end() && !it->empty()) {
    throw SchemaError(
        "sidecar: must not carry values; they belong in the CSV file");
  }

  Dataset d;
  d.programs = std::move(tables.programs);
  d.indicators = std::move(tables.indicators);

  std::vector<CsvRow> rows = read_csv(csv_text);
  if (rows.empty()) {
    throw SyntaxError("CSV: empty file, expected header and value rows");
  }
  const std::vector<std::string> header = {"program", "indicator", "value"};
  if (rows.front().fields != header) {
    throw SyntaxError("line 1: header must be exactly 'program,indicator,value'");
  }

  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    if (row.fields.size() != 3) {
      throw SyntaxError("line " + std::to_string(row.line) + ": expected 3 "
                        "fields, got " + std::to_string(row.fields.size()));
    }
    IndicatorValue v;
    v.program = row.fields[0];
    v.indicator = row.fields[1];
    const std::string& raw = row.fields[2];
    std::string context = value_context(v.program, v.indicator) + " at line " +
                          std::to_string(row.line);
    if (d.find_program(v.program) == nullptr) {
      throw SchemaError(context + ": unknown program '" + v.program + "'");
    }
    const IndicatorDefinition* def = d.find_indicator(v.indicator);
    if (def == nullptr) {
      throw SchemaError(context + ": unknown indicator '" + v.indicator + "'");
    }
    if (!seen.insert({v.program, v.indicator}).second) {
      throw SchemaError(context + ": duplicate (program, indicator) pair");
    }
    if (raw == "Missing") {  // case-sensitive literal
      v.value = Missing{};
    } else {
      switch (def->kind) {
        case ValueKind::Numeric:
          v.value = parse_csv_number(raw, row.line);
          break;
        case ValueKind::Boolean:
          if (raw == "true") {
            v.value = true;
          } else if (raw == "false") {
            v.value = false;
          } else {
            throw SchemaError(context + ": boolean indicator needs "
                              "'true', 'false' or 'Missing', got '" + raw + "'");
          }
          break;
        case ValueKind::Ordinal:
          if (std::find(def->levels.begin(), def->levels.end(), raw) ==
              def->levels.end()) {
            throw SchemaError(context + ": unknown level '" + raw + "'");
          }
          v.value = raw;
          break;
      }
    }
    d.values.push_back(std::move(v));
  }
  return d;
}

std::string serialize_dataset(const Dataset& d, int indent) {
  ordered_json doc;
  doc["programs"] = ordered_json::array();
  for (const Program& p : d.programs) {
    ordered_json j;
    j["id"] = p.id;
    j["name"] = p.name;
    j["ecosystem"] = p.ecosystem;
    j["metadata"] = p.metadata;
    doc["programs"].push_back(std::move(j));
  }
  doc["indicators"] = ordered_json::array();
  for (const IndicatorDefinition& def : d.indicators) {
    ordered_json j;
    j["id"] = def.id;
    j["name"] = def.name;
    j["rubric"] = to_string(def.rubric);
    j["polarity"] = to_string(def.polarity);
    j["kind"] = to_string(def.kind);
    if (def.kind == ValueKind::Ordinal) j["levels"] = def.levels;
    if (!def.unit.empty()) j["unit"] = def.unit;
    j["weight"] = def.weight;
    j["descriptive"] = def.descriptive;
    doc["indicators"].push_back(std::move(j));
  }
  doc["values"] = ordered_json::array();
  for (const IndicatorValue& v : d.values) {
    ordered_json j;
    j["program"] = v.program;
    j["indicator"] = v.indicator;
    if (const double* x = std::get_if<double>(&v.value)) {
      j["value"] = *x;
    } else if (const bool* b = std::get_if<bool>(&v.value)) {
      j["value"] = *b;
    } else if (const std::string* s = std::get_if<std::string>(&v.value)) {
      j["value"] = *s;
    } else {
      j["value"] = nullptr;
    }
    doc["values"].push_back(std::move(j));
  }
  return doc.dump(indent);
}

}  // namespace gmf
