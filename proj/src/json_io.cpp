#include "gmf/json_io.hpp"

#include <cmath>
#include <set>

#include "gmf/errors.hpp"

namespace gmf {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json parse_json_text(std::string_view text, const char* what) {
  try {
    return json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw SyntaxError(std::string(what) + ": " + e.what());
  }
}

const std::set<std::string> kConfigKeys = {
    "mode",           "rubric_weights",   "indicator_weights",
    "normalization",  "missing_policy",   "degenerate_value"};

}  // namespace

ScoringConfig parse_scoring_config(std::string_view text, const Dataset& d) {
  ScoringConfig cfg;
  cfg.scheme = WeightScheme::equal_default(d);
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return cfg;

  json doc = parse_json_text(text, "config JSON");
  if (!doc.is_object()) {
    throw SchemaError("config: top-level document must be an object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (kConfigKeys.find(key) == kConfigKeys.end()) {
      throw SchemaError("config: unknown key '" + key + "'");
    }
  }

  if (auto it = doc.find("normalization"); it != doc.end()) {
    if (!it->is_string()) {
      throw SchemaError("config: 'normalization' must be a string");
    }
    auto m = normalization_from_string(it->get<std::string>());
    if (!m) {
      throw SchemaError("config: unknown normalization '" +
                        it->get<std::string>() + "'");
    }
    cfg.options.method = *m;
  }
  if (auto it = doc.find("missing_policy"); it != doc.end()) {
    if (!it->is_string()) {
      throw SchemaError("config: 'missing_policy' must be a string");
    }
    auto p = missing_policy_from_string(it->get<std::string>());
    if (!p) {
      throw SchemaError("config: unknown missing_policy '" +
                        it->get<std::string>() + "'");
    }
    cfg.options.missing = *p;
  }
  if (auto it = doc.find("degenerate_value"); it != doc.end()) {
    if (!it->is_number()) {
      throw SchemaError("config: 'degenerate_value' must be a number");
    }
    double v = it->get<double>();
    if (!(v >= 0.0 && v <= 1.0)) {
      throw SchemaError("config: 'degenerate_value' must lie in [0, 1]");
    }
    cfg.options.degenerate_value = v;
  }

  std::map<Rubric, double> rubric_weights;
  if (auto it = doc.find("rubric_weights"); it != doc.end()) {
    if (!it->is_object()) {
      throw SchemaError("config: 'rubric_weights' must be an object");
    }
    for (const auto& [key, value] : it->items()) {
      auto r = rubric_from_string(key);
      if (!r) throw SchemaError("config: unknown rubric '" + key + "'");
      if (!value.is_number()) {
        throw SchemaError("config: rubric weight '" + key +
                          "' must be a number");
      }
      rubric_weights[*r] = value.get<double>();
    }
  }

  std::map<Rubric, std::map<std::string, double>> indicator_weights;
  if (auto it = doc.find("indicator_weights"); it != doc.end()) {
    if (!it->is_object()) {
      throw SchemaError("config: 'indicator_weights' must be an object");
    }
    for (const auto& [key, group] : it->items()) {
      auto r = rubric_from_string(key);
      if (!r) throw SchemaError("config: unknown rubric '" + key + "'");
      if (!group.is_object()) {
        throw SchemaError("config: indicator_weights['" + key +
                          "'] must be an object");
      }
      for (const auto& [id, w] : group.items()) {
        if (!w.is_number()) {
          throw SchemaError("config: weight for indicator '" + id +
                            "' must be a number");
        }
        indicator_weights[*r][id] = w.get<double>();
      }
    }
  }

  bool has_weights = !rubric_weights.empty() || !indicator_weights.empty();
  std::string mode = has_weights ? "explicit" : "equal";
  if (auto it = doc.find("mode"); it != doc.end()) {
    if (!it->is_string()) {
      throw SchemaError("config: 'mode' must be a string");
    }
    mode = it->get<std::string>();
    if (mode != "equal" && mode != "explicit") {
      throw SchemaError("config: mode must be 'equal' or 'explicit'");
    }
    if (mode == "equal" && has_weights) {
      throw SchemaError(
          "config: mode 'equal' contradicts the explicit weight maps");
    }
  }

  if (mode == "explicit") {
    cfg.scheme = WeightScheme::explicit_weights(d, rubric_weights,
                                                indicator_weights);
  }
  return cfg;
}

std::string serialize_scoring_config(const ScoringConfig& cfg, int indent) {
  ordered_json doc;
  doc["mode"] =
      cfg.scheme.mode() == WeightScheme::Mode::EqualDefault ? "equal"
                                                            : "explicit";
  doc["normalization"] = to_string(cfg.options.method);
  doc["missing_policy"] = to_string(cfg.options.missing);
  doc["degenerate_value"] = cfg.options.degenerate_value;
  if (cfg.scheme.mode() == WeightScheme::Mode::Explicit) {
    ordered_json rubric;
    for (const auto& [r, w] : cfg.scheme.rubric_weights()) {
      rubric[std::string(to_string(r))] = w;
    }
    doc["rubric_weights"] = std::move(rubric);
    ordered_json indicator;
    for (const auto& [r, group] : cfg.scheme.indicator_weights()) {
      ordered_json g;
      for (const auto& [id, w] : group) g[id] = w;
      indicator[std::string(to_string(r))] = std::move(g);
    }
    doc["indicator_weights"] = std::move(indicator);
  }
  return doc.dump(indent);
}

std::vector<EvaluatorResponse> parse_responses(std::string_view text) {
  json doc = parse_json_text(text, "responses JSON");
  if (!doc.is_array()) {
    throw SchemaError("responses: top-level document must be an array");
  }

  std::vector<EvaluatorResponse> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& j = doc[i];
    std::string context = "responses[" + std::to_string(i) + "]";
    if (!j.is_object()) throw SchemaError(context + ": must be an object");
    EvaluatorResponse r;

    auto id_it = j.find("evaluator_id");
    if (id_it == j.end() || !id_it->is_string()) {
      throw SchemaError(context + ": missing string field 'evaluator_id'");
    }
    r.evaluator_id = id_it->get<std::string>();
    context = "response(" + r.evaluator_id + ")";
    if (!ids.insert(r.evaluator_id).second) {
      throw SchemaError(context + ": duplicate evaluator_id");
    }

    if (auto it = j.find("affiliation"); it != j.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw SchemaError(context + ": 'affiliation' must be a string");
      }
      r.affiliation = it->get<std::string>();
    }

    auto scores_it = j.find("scores");
    if (scores_it == j.end() || !scores_it->is_object()) {
      throw SchemaError(context + ": missing object field 'scores'");
    }
    for (const auto& [key, group] : scores_it->items()) {
      auto rubric = rubric_from_string(key);
      if (!rubric) {
        throw SchemaError(context + ": unknown rubric '" + key + "'");
      }
      if (!group.is_object()) {
        throw SchemaError(context + ": scores['" + key +
                          "'] must be an object");
      }
      for (const auto& [sub, score] : group.items()) {
        if (!score.is_number()) {
          throw SchemaError(context + ": score " + key + "/" + sub +
                            " must be a number");
        }
        r.scores[*rubric][sub] = score.get<double>();
      }
    }

    if (auto it = j.find("comments"); it != j.end()) {
      if (!it->is_object()) {
        throw SchemaError(context + ": 'comments' must be an object");
      }
      for (const auto& [key, group] : it->items()) {
        auto rubric = rubric_from_string(key);
        if (!rubric) {
          throw SchemaError(context + ": unknown rubric '" + key + "'");
        }
        if (!group.is_object()) {
          throw SchemaError(context + ": comments['" + key +
                            "'] must be an object");
        }
        for (const auto& [sub, comment] : group.items()) {
          if (!comment.is_string()) {
            throw SchemaError(context + ": comment " + key + "/" + sub +
                              " must be a string");
          }
          r.comments[*rubric][sub] = comment.get<std::string>();
        }
      }
    }

    auto just_it = j.find("overall_justification");
    if (just_it == j.end() || !just_it->is_string()) {
      throw SchemaError(context +
                        ": missing string field 'overall_justification'");
    }
    r.overall_justification = just_it->get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

std::string serialize_responses(std::span<const EvaluatorResponse> responses,
                                int indent) {
  ordered_json doc = ordered_json::array();
  for (const EvaluatorResponse& r : responses) {
    ordered_json j;
    j["evaluator_id"] = r.evaluator_id;
    if (r.affiliation) j["affiliation"] = *r.affiliation;
    ordered_json scores;
    for (const auto& [rubric, group] : r.scores) {
      ordered_json g;
      for (const auto& [sub, score] : group) g[sub] = score;
      scores[std::string(to_string(rubric))] = std::move(g);
    }
    j["scores"] = std::move(scores);
    ordered_json comments;
    for (const auto& [rubric, group] : r.comments) {
      ordered_json g;
      for (const auto& [sub, comment] : group) g[sub] = comment;
      comments[std::string(to_string(rubric))] = std::move(g);
    }
    j["comments"] = std::move(comments);
    j["overall_justification"] = r.overall_justification;
    doc.push_back(std::move(j));
  }
  return doc.dump(indent);
}

ordered_json findings_to_json(std::span<const Finding> findings) {
  ordered_json out = ordered_json::array();
  for (const Finding& f : findings) {
    ordered_json j;
    j["severity"] = to_string(f.severity);
    j["code"] = f.code;
    j["context"] = f.context;
    j["message"] = f.message;
    out.push_back(std::move(j));
  }
  return out;
}

namespace {

ordered_json matrix_to_json(const ValueMatrix& m) {
  ordered_json out;
  for (const IndicatorColumn& c : m.columns) {
    ordered_json column;
    for (std::size_t i = 0; i < m.programs.size(); ++i) {
      if (c.values[i]) {
        column[m.programs[i]] = *c.values[i];
      } else {
        column[m.programs[i]] = nullptr;
      }
    }
    out[c.indicator] = std::move(column);
  }
  return out;
}

ordered_json weights_to_json(const WeightScheme& scheme) {
  ordered_json out;
  out["mode"] = scheme.mode() == WeightScheme::Mode::EqualDefault
                    ? "equal"
                    : "explicit";
  ordered_json rubric;
  for (const auto& [r, w] : scheme.rubric_weights()) {
    rubric[std::string(to_string(r))] = w;
  }
  out["rubric"] = std::move(rubric);
  ordered_json indicator;
  for (const auto& [r, group] : scheme.indicator_weights()) {
    ordered_json g;
    for (const auto& [id, w] : group) g[id] = w;
    indicator[std::string(to_string(r))] = std::move(g);
  }
  out["indicator"] = std::move(indicator);
  return out;
}

}  // namespace

ordered_json score_report_to_json(const ScoreReport& report) {
  ordered_json doc;

  doc["programs"] = ordered_json::array();
  for (const Program& p : report.programs) {
    ordered_json j;
    j["id"] = p.id;
    j["name"] = p.name;
    j["ecosystem"] = p.ecosystem;
    j["metadata"] = p.metadata;
    doc["programs"].push_back(std::move(j));
  }

  const RubricScores& rs = report.rubric_scores;
  ordered_json rubric_scores;
  for (std::size_t i = 0; i < rs.programs.size(); ++i) {
    ordered_json per_rubric;
    for (std::size_t k = 0; k < rs.rubrics.size(); ++k) {
      ordered_json cell;
      cell["raw"] = rs.raw[i][k];
      cell["normalized"] = rs.normalized[i][k];
      per_rubric[std::string(to_string(rs.rubrics[k]))] = std::move(cell);
    }
    rubric_scores[rs.programs[i]] = std::move(per_rubric);
  }
  doc["rubric_scores"] = std::move(rubric_scores);

  ordered_json gmf;
  for (const MaturityScore& m : report.maturity) {
    ordered_json j;
    j["additive"] = m.additive_gmf;
    j["normalized"] = m.normalized_gmf;
    j["stage"] = to_string(m.stage);
    gmf[m.program] = std::move(j);
  }
  doc["gmf"] = std::move(gmf);

  doc["warnings"] = findings_to_json(report.warnings);

  ordered_json provenance;
  provenance["normalization"] = to_string(report.options.method);
  provenance["missing_policy"] = to_string(report.options.missing);
  provenance["degenerate_value"] = report.options.degenerate_value;
  provenance["weights"] = weights_to_json(report.scheme);
  provenance["steps"] = {"encode",
                         "orient",
                         "normalize_indicator",
                         "compute_rubric_scores",
                         "normalize_rubric_scores",
                         "compute_gmf",
                         "classify_stage"};
  ordered_json matrices;
  matrices["encoded"] = matrix_to_json(report.encoded);
  matrices["oriented"] = matrix_to_json(report.oriented);
  matrices["normalized"] = matrix_to_json(report.normalized);
  provenance["matrices"] = std::move(matrices);

  ordered_json contributions;
  for (std::size_t i = 0; i < rs.programs.size(); ++i) {
    ordered_json per_rubric;
    for (std::size_t k = 0; k < rs.rubrics.size(); ++k) {
      const RubricCellProvenance& prov = rs.provenance[i][k];
      ordered_json cell;
      cell["indicators"] = ordered_json::array();
      for (const RubricContribution& c : prov.contributions) {
        ordered_json e;
        e["id"] = c.indicator;
        e["weight"] = c.weight;
        cell["indicators"].push_back(std::move(e));
      }
      cell["missing"] = prov.missing;
      cell["missing_renormalized"] = prov.missing_renormalized;
      per_rubric[std::string(to_string(rs.rubrics[k]))] = std::move(cell);
    }
    contributions[rs.programs[i]] = std::move(per_rubric);
  }
  provenance["contributions"] = std::move(contributions);
  doc["provenance"] = std::move(provenance);

  return doc;
}

ordered_json stability_report_to_json(const StabilityReport& report) {
  ordered_json doc;
  doc["analysis"] = report.analysis;

  if (report.config) {
    ordered_json cfg;
    cfg["epsilon"] = report.config->epsilon;
    cfg["trials"] = report.config->trials;
    cfg["seed"] = report.config->seed;
    cfg["generator"] = report.generator;
    doc["config"] = std::move(cfg);
  }

  ordered_json baseline;
  baseline["method"] = report.baseline_method;
  ordered_json base_gmf;
  for (const auto& [program, value] : report.baseline_gmf) {
    base_gmf[program] = value;
  }
  baseline["gmf"] = std::move(base_gmf);
  ordered_json base_stage;
  for (const auto& [program, stage] : report.baseline_stage) {
    base_stage[program] = to_string(stage);
  }
  baseline["stage"] = std::move(base_stage);
  doc["baseline"] = std::move(baseline);

  if (report.analysis == "perturb") {
    doc["successful_trials"] = report.successful_trials;
    ordered_json programs;
    for (const ProgramStability& ps : report.programs) {
      ordered_json j;
      j["baseline_gmf"] = ps.baseline_gmf;
      j["baseline_stage"] = to_string(ps.baseline_stage);
      if (report.successful_trials > 0) {
        j["gmf_mean"] = ps.gmf_mean;
        j["gmf_stddev"] = ps.gmf_stddev;
        j["gmf_min"] = ps.gmf_min;
        j["gmf_max"] = ps.gmf_max;
        j["stage_mode"] = to_string(ps.stage_mode);
        j["stage_flip_fraction"] = ps.stage_flip_fraction;
      }
      programs[ps.program] = std::move(j);
    }
    doc["programs"] = std::move(programs);

    doc["rank_reversals"] = ordered_json::array();
    for (const PairReversal& pr : report.reversals) {
      ordered_json j;
      j["a"] = pr.a;
      j["b"] = pr.b;
      j["count"] = pr.count;
      doc["rank_reversals"].push_back(std::move(j));
    }
    if (report.spearman) {
      ordered_json sp;
      sp["mean"] = report.spearman->mean;
      sp["min"] = report.spearman->min;
      sp["max"] = report.spearman->max;
      doc["spearman"] = std::move(sp);
    }
  }

  if (!report.runs.empty()) {
    doc["runs"] = ordered_json::array();
    for (const ComparisonRun& run : report.runs) {
      ordered_json j;
      j[report.analysis == "leave_one_out" ? "indicator" : "method"] =
          run.label;
      j["skipped"] = run.skipped;
      if (!run.skipped) {
        j["spearman"] = run.spearman;
        ordered_json gmf;
        for (const auto& [program, value] : run.gmf) gmf[program] = value;
        j["gmf"] = std::move(gmf);
        ordered_json stage;
        for (const auto& [program, s] : run.stage) {
          stage[program] = to_string(s);
        }
        j["stage"] = std::move(stage);
        if (report.analysis == "leave_one_out") {
          ordered_json delta;
          for (const auto& [program, value] : run.delta_gmf) {
            delta[program] = value;
          }
          j["delta_gmf"] = std::move(delta);
          ordered_json changes = ordered_json::array();
          for (const auto& [program, s] : run.stage) {
            Stage base = report.baseline_stage.at(program);
            if (s != base) {
              ordered_json c;
              c["program"] = program;
              c["from"] = to_string(base);
              c["to"] = to_string(s);
              changes.push_back(std::move(c));
            }
          }
          j["stage_changes"] = std::move(changes);
        }
      }
      doc["runs"].push_back(std::move(j));
    }
  }

  ordered_json failures = ordered_json::array();
  for (const TrialFailure& f : report.failures) {
    ordered_json j;
    j["trial"] = f.trial;
    j["error"] = f.error;
    failures.push_back(std::move(j));
  }
  doc["failed_trials"] = std::move(failures);
  doc["warnings"] = findings_to_json(report.warnings);
  return doc;
}

ordered_json aggregates_to_json(
    const std::map<Rubric, RubricAggregate>& aggregates) {
  ordered_json doc;
  for (Rubric r : kRubrics) {
    auto it = aggregates.find(r);
    if (it == aggregates.end()) continue;
    const RubricAggregate& agg = it->second;
    ordered_json j;
    j["central"] = agg.central;
    j["dispersion"] = agg.dispersion;
    j["evaluator_count"] = agg.evaluator_count;
    j["low_consensus"] = agg.low_consensus;
    doc[std::string(to_string(r))] = std::move(j);
  }
  return doc;
}

ordered_json stage_ranges_to_json() {
  ordered_json doc = ordered_json::array();
  for (const StageRange& r : stage_ranges()) {
    ordered_json j;
    j["stage"] = to_string(r.stage);
    j["lo"] = r.lo;
    j["hi"] = r.hi;
    j["hi_closed"] = r.closed_hi;
    doc.push_back(std::move(j));
  }
  return doc;
}

}  // namespace gmf
