#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "gmf/dataset.hpp"
#include "gmf/validation.hpp"

namespace gmf {

/// One expert's questionnaire: continuous 1-5 scores per (rubric,
/// subcategory), a comment per score, and a written justification of the
/// overall evaluation.
struct EvaluatorResponse {
  std::string evaluator_id;
  std::optional<std::string> affiliation;
  std::map<Rubric, std::map<std::string, double>> scores;
  std::map<Rubric, std::map<std::string, std::string>> comments;
  std::string overall_justification;

  friend bool operator==(const EvaluatorResponse&,
                         const EvaluatorResponse&) = default;
};

enum class CentralStatistic { Mean, Median };

std::string_view to_string(CentralStatistic c);
std::optional<CentralStatistic> central_from_string(std::string_view s);

struct RubricAggregate {
  Rubric rubric = Rubric::FAO;
  double central = 0.0;     // mean or median of evaluator category scores
  double dispersion = 0.0;  // sample standard deviation, 0 for one evaluator
  std::size_t evaluator_count = 0;
  bool low_consensus = false;  // dispersion > consensus threshold

  friend bool operator==(const RubricAggregate&,
                         const RubricAggregate&) = default;
};

struct DelphiOptions {
  CentralStatistic central = CentralStatistic::Mean;
  double consensus_threshold = 1.0;  // one scale point of dispersion
};

/// Errors for scores outside [1, 5] and for an empty justification;
/// warnings for scores lacking a comment.
ValidationReport validate_response(const EvaluatorResponse& r);

/// Two-step aggregation: subcategory scores are averaged within each
/// evaluator first (so evaluators scoring more subcategories do not
/// dominate), then the central statistic and the sample standard deviation
/// are taken across evaluators. Rubrics scored by nobody are absent from
/// the result. Throws EmptyPanelError for an empty panel.
std::map<Rubric, RubricAggregate> aggregate_responses(
    std::span<const EvaluatorResponse> responses,
    const DelphiOptions& options = {});

}  // namespace gmf
