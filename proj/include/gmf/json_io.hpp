#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmf/delphi.hpp"
#include "gmf/dataset.hpp"
#include "gmf/scoring.hpp"
#include "gmf/sensitivity.hpp"
#include "gmf/validation.hpp"

#include "json.hpp"

namespace gmf {

/// Scoring configuration document: weights plus pipeline options.
struct ScoringConfig {
  WeightScheme scheme;
  ScoringOptions options;
};

/// Parses a config document ({mode, rubric_weights?, indicator_weights?,
/// normalization, missing_policy, degenerate_value}); empty input means
/// all defaults. Weight maps are resolved against the dataset.
ScoringConfig parse_scoring_config(std::string_view text, const Dataset& d);

std::string serialize_scoring_config(const ScoringConfig& cfg, int indent = 2);

std::vector<EvaluatorResponse> parse_responses(std::string_view text);
std::string serialize_responses(std::span<const EvaluatorResponse> responses,
                                int indent = 2);

nlohmann::ordered_json findings_to_json(std::span<const Finding> findings);
nlohmann::ordered_json score_report_to_json(const ScoreReport& report);
nlohmann::ordered_json stability_report_to_json(const StabilityReport& report);
nlohmann::ordered_json aggregates_to_json(
    const std::map<Rubric, RubricAggregate>& aggregates);
nlohmann::ordered_json stage_ranges_to_json();

}  // namespace gmf
