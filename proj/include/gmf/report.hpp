#pragma once

#include <map>
#include <string>

#include "gmf/delphi.hpp"
#include "gmf/scoring.hpp"
#include "gmf/validation.hpp"

namespace gmf {

struct RenderOptions {
  int precision = 4;      // decimal places in tables
  bool percent = false;   // show [0,1] quantities as percentages
  bool quartiles = false; // append the stage range table
};

/// Fixed-point rendering, e.g. format_fixed(0.47545, 4) == "0.4755".
std::string format_fixed(double value, int precision);

/// Unit-interval rendering honoring the percent option
/// (0.6755 -> "67.55%" at precision 4).
std::string format_unit(double value, int precision, bool percent);

/// Markdown report: composite table, normalized rubric-score table,
/// warnings, provenance appendix. The numbers equal the JSON report's
/// values rounded to the configured precision.
std::string render_markdown(const ScoreReport& report,
                            const RenderOptions& options = {});

std::string render_stage_ranges_markdown();

std::string render_validation_text(const ValidationReport& report);

std::string render_aggregates_markdown(
    const std::map<Rubric, RubricAggregate>& aggregates,
    CentralStatistic central, int precision = 4);

}  // namespace gmf
