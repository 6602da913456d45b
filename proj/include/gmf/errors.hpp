#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gmf {

/// Base class for everything this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input text (bad JSON or CSV). The message carries the
/// line/position reported by the underlying parser.
struct SyntaxError : Error {
  using Error::Error;
};

/// Well-formed input that violates the schema (missing field, unknown
/// rubric, duplicate record, ...). The message names the offending record.
struct SchemaError : Error {
  using Error::Error;
};

/// A cell value whose variant disagrees with the indicator's declared kind.
struct KindMismatchError : SchemaError {
  using SchemaError::SchemaError;
};

/// Every entry of an indicator column is missing.
struct EmptyColumnError : Error {
  using Error::Error;
};

/// A program has no usable indicator left in some rubric.
struct AllMissingRubricError : Error {
  using Error::Error;
};

/// A missing cell encountered under MissingPolicy::Strict.
struct MissingValueError : Error {
  using Error::Error;
};

/// classify_stage input outside [0, 1].
struct OutOfRangeError : Error {
  using Error::Error;
};

/// aggregate_responses called with no responses.
struct EmptyPanelError : Error {
  using Error::Error;
};

/// A dataset rejected by validate_dataset before the pipeline starts.
struct DatasetInvalidError : Error {
  using Error::Error;
};

/// Any stage failure surfaced by run_pipeline, annotated with the step name.
struct PipelineError : Error {
  PipelineError(std::string step_name, const std::string& reason)
      : Error("pipeline step '" + step_name + "': " + reason),
        step(std::move(step_name)) {}

  std::string step;
};

}  // namespace gmf
