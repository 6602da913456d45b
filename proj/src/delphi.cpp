#include "gmf/delphi.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "gmf/errors.hpp"
#include "gmf/stats.hpp"

namespace gmf {

std::string_view to_string(CentralStatistic c) {
  return c == CentralStatistic::Mean ? "mean" : "median";
}

std::optional<CentralStatistic> central_from_string(std::string_view s) {
  if (s == "mean") return CentralStatistic::Mean;
  if (s == "median") return CentralStatistic::Median;
  return std::nullopt;
}

ValidationReport validate_response(const EvaluatorResponse& r) {
  ValidationReport report;
  std::string who = "response(" + r.evaluator_id + ")";

  if (r.evaluator_id.empty()) {
    report.findings.push_back({Severity::Error, "EmptyId", "response",
                               "evaluator_id must not be empty"});
  }
  if (r.overall_justification.empty()) {
    report.findings.push_back(
        {Severity::Error, "MissingJustification", who,
         "overall evaluation needs a written justification"});
  }

  for (const auto& [rubric, subs] : r.scores) {
    for (const auto& [sub, score] : subs) {
      std::string ctx = who + "/" + std::string(to_string(rubric)) + "/" + sub;
      if (!(score >= 1.0 && score <= 5.0)) {
        std::ostringstream msg;
        msg << "score " << score << " outside the [1, 5] scale";
        report.findings.push_back(
            {Severity::Error, "ScoreOutOfRange", ctx, msg.str()});
      }
      bool has_comment = false;
      if (auto it = r.comments.find(rubric); it != r.comments.end()) {
        if (auto jt = it->second.find(sub); jt != it->second.end()) {
          has_comment = !jt->second.empty();
        }
      }
      if (!has_comment) {
        report.findings.push_back({Severity::Warning, "MissingComment", ctx,
                                   "score given without a comment"});
      }
    }
  }
  return report;
}

std::map<Rubric, RubricAggregate> aggregate_responses(
    std::span<const EvaluatorResponse> responses,
    const DelphiOptions& options) {
  if (responses.empty()) {
    throw EmptyPanelError("no responses to aggregate");
  }

  std::map<Rubric, RubricAggregate> out;
  for (Rubric rubric : kRubrics) {
    // Within-evaluator category score: mean of the subcategory scores.
    std::vector<double> category_scores;
    for (const EvaluatorResponse& r : responses) {
      auto it = r.scores.find(rubric);
      if (it == r.scores.end() || it->second.empty()) continue;
      std::vector<double> subs;
      subs.reserve(it->second.size());
      for (const auto& [sub, score] : it->second) subs.push_back(score);
      category_scores.push_back(stats::mean(subs));
    }
    if (category_scores.empty()) continue;

    RubricAggregate agg;
    agg.rubric = rubric;
    agg.evaluator_count = category_scores.size();
    agg.central = options.central == CentralStatistic::Mean
                      ? stats::mean(category_scores)
                      : stats::median(category_scores);
    agg.dispersion = stats::sample_stddev(category_scores);
    agg.low_consensus = agg.dispersion > options.consensus_threshold;
    out[rubric] = agg;
  }
  return out;
}

}  // namespace gmf
