#pragma once

#include <string>
#include <string_view>

#include "gmf/dataset.hpp"

namespace gmf {

/// Parses one JSON dataset document (keys `programs`, `indicators`,
/// `values`). `//` and `/* */` comments are tolerated. Throws SyntaxError on
/// malformed JSON (with position), SchemaError on schema violations naming
/// the offending record.
Dataset parse_dataset_json(std::string_view text);

/// Parses a CSV-long value file (header `program,indicator,value`, literal
/// `Missing` for missing cells) against a sidecar JSON carrying `programs`
/// and `indicators`. The sidecar must not carry values of its own.
Dataset parse_dataset_csv(std::string_view csv_text,
                          std::string_view sidecar_json);

/// JSON serialization; parse_dataset_json(serialize_dataset(d)) is
/// structurally identical to d.
std::string serialize_dataset(const Dataset& d, int indent = 2);

}  // namespace gmf
