#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace gmf {

enum class Severity { Error, Warning };

std::string_view to_string(Severity s);

/// One validation finding. Findings are data, not failures: validators
/// return them instead of throwing.
struct Finding {
  Severity severity = Severity::Error;
  std::string code;     // stable machine-readable tag, e.g. "DuplicateValue"
  std::string context;  // offending record, e.g. "value(mantle, grant_count)"
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool has_errors() const;
  std::size_t error_count() const;
  std::size_t warning_count() const;
};

}  // namespace gmf
