#include "gmf/sensitivity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "gmf/errors.hpp"
#include "gmf/stats.hpp"

namespace gmf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-trial stream, independent of every other trial's.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t trial)
      : engine_(splitmix64(splitmix64(seed) ^ trial)) {}

  /// Uniform in [0, 1) from the high 53 bits; identical across platforms.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

std::vector<double> gmf_vector(const ScoreReport& r) {
  std::vector<double> out;
  out.reserve(r.maturity.size());
  for (const MaturityScore& m : r.maturity) out.push_back(m.normalized_gmf);
  return out;
}

void fill_baseline(StabilityReport& report, const ScoreReport& baseline) {
  report.baseline_method = std::string(to_string(baseline.options.method));
  for (const MaturityScore& m : baseline.maturity) {
    report.baseline_gmf[m.program] = m.normalized_gmf;
    report.baseline_stage[m.program] = m.stage;
  }
}

}  // namespace

std::map<std::string, std::map<std::string, double>> StabilityReport::loo_deltas()
    const {
  std::map<std::string, std::map<std::string, double>> out;
  for (const ComparisonRun& run : runs) {
    if (!run.skipped) out[run.label] = run.delta_gmf;
  }
  return out;
}

StabilityReport perturb_weights(const Dataset& d, const WeightScheme& base,
                                const ScoringOptions& options,
                                const PerturbationConfig& cfg) {
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0)) {
    throw SchemaError("perturbation epsilon must lie in [0, 1]");
  }
  if (cfg.trials == 0) {
    throw SchemaError("perturbation needs at least one trial");
  }

  ScoreReport baseline = run_pipeline(d, base, options);

  StabilityReport report;
  report.analysis = "perturb";
  report.config = cfg;
  report.generator = std::string(kGeneratorId);
  fill_baseline(report, baseline);

  const std::size_t n = baseline.maturity.size();
  std::vector<double> base_gmf = gmf_vector(baseline);
  std::vector<std::vector<double>> trial_gmf(n);
  std::vector<std::array<std::size_t, 4>> stage_counts(n, {0, 0, 0, 0});
  std::vector<std::size_t> flips(n, 0);
  std::vector<std::vector<std::size_t>> reversal_count(
      n, std::vector<std::size_t>(n, 0));
  std::vector<double> spearmans;

  for (std::size_t t = 0; t < cfg.trials; ++t) {
    ScoreReport trial;
    try {
      if (cfg.epsilon == 0.0) {
        // Null perturbation: reuse the weights untouched so every trial
        // reproduces the baseline bit for bit.
        trial = run_pipeline(d, base, options);
      } else {
        TrialRng rng(cfg.seed, t);
        WeightScheme perturbed = base.perturbed([&] {
          return 1.0 + cfg.epsilon * (2.0 * rng.uniform01() - 1.0);
        });
        trial = run_pipeline(d, perturbed, options);
      }
    } catch (const std::exception& e) {
      report.failures.push_back({t, e.what()});
      continue;
    }

    ++report.successful_trials;
    std::vector<double> gmf = gmf_vector(trial);
    spearmans.push_back(stats::spearman(gmf, base_gmf));
    for (std::size_t i = 0; i < n; ++i) {
      trial_gmf[i].push_back(gmf[i]);
      ++stage_counts[i][static_cast<std::size_t>(trial.maturity[i].stage)];
      if (trial.maturity[i].stage != baseline.maturity[i].stage) ++flips[i];
      for (std::size_t j = i + 1; j < n; ++j) {
        double db = base_gmf[i] - base_gmf[j];
        double dt = gmf[i] - gmf[j];
        if ((db > 0.0 && dt < 0.0) || (db < 0.0 && dt > 0.0)) {
          ++reversal_count[i][j];
        }
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    ProgramStability ps;
    ps.program = baseline.maturity[i].program;
    ps.baseline_gmf = baseline.maturity[i].normalized_gmf;
    ps.baseline_stage = baseline.maturity[i].stage;
    if (!trial_gmf[i].empty()) {
      ps.gmf_mean = stats::mean(trial_gmf[i]);
      ps.gmf_stddev = stats::population_stddev(trial_gmf[i]);
      auto [mn, mx] = std::minmax_element(trial_gmf[i].begin(),
                                          trial_gmf[i].end());
      ps.gmf_min = *mn;
      ps.gmf_max = *mx;
      std::size_t best = 0;
      for (std::size_t s = 1; s < stage_counts[i].size(); ++s) {
        if (stage_counts[i][s] > stage_counts[i][best]) best = s;
      }
      ps.stage_mode = static_cast<Stage>(best);
      ps.stage_flip_fraction = static_cast<double>(flips[i]) /
                               static_cast<double>(report.successful_trials);
    }
    report.programs.push_back(std::move(ps));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      report.reversals.push_back({baseline.maturity[i].program,
                                  baseline.maturity[j].program,
                                  reversal_count[i][j]});
    }
  }
  if (!spearmans.empty()) {
    auto [mn, mx] = std::minmax_element(spearmans.begin(), spearmans.end());
    report.spearman = SpearmanSummary{stats::mean(spearmans), *mn, *mx};
  }
  return report;
}

StabilityReport compare_normalizations(
    const Dataset& d, const WeightScheme& scheme, const ScoringOptions& options,
    std::span<const NormalizationMethod> methods) {
  if (methods.size() < 2) {
    throw SchemaError("compare_normalizations needs at least two methods");
  }

  ScoringOptions base_options = options;
  base_options.method = NormalizationMethod::MinMax;
  ScoreReport baseline = run_pipeline(d, scheme, base_options);
  std::vector<double> base_gmf = gmf_vector(baseline);

  StabilityReport report;
  report.analysis = "compare_normalizations";
  fill_baseline(report, baseline);

  for (NormalizationMethod m : methods) {
    ScoringOptions run_options = options;
    run_options.method = m;
    ScoreReport run = run_pipeline(d, scheme, run_options);
    ComparisonRun cr;
    cr.label = std::string(to_string(m));
    cr.spearman = stats::spearman(gmf_vector(run), base_gmf);
    for (const MaturityScore& ms : run.maturity) {
      cr.gmf[ms.program] = ms.normalized_gmf;
      cr.stage[ms.program] = ms.stage;
    }
    report.runs.push_back(std::move(cr));
  }
  return report;
}

StabilityReport leave_one_out(const Dataset& d, const WeightScheme& scheme,
                              const ScoringOptions& options) {
  ScoreReport baseline = run_pipeline(d, scheme, options);
  std::vector<double> base_gmf = gmf_vector(baseline);

  StabilityReport report;
  report.analysis = "leave_one_out";
  fill_baseline(report, baseline);

  for (const IndicatorDefinition& def : d.indicators) {
    ComparisonRun cr;
    cr.label = def.id;

    if (!def.descriptive && d.scored_indicators(def.rubric).size() == 1) {
      cr.skipped = true;
      std::ostringstream msg;
      msg << "only scored indicator of rubric " << to_string(def.rubric)
          << "; removal would empty it";
      report.warnings.push_back({Severity::Warning, "LeaveOneOutSkipped",
                                 "indicator(" + def.id + ")", msg.str()});
      report.runs.push_back(std::move(cr));
      continue;
    }

    Dataset sub = d.without_indicator(def.id);
    ScoreReport run;
    try {
      run = run_pipeline(sub, scheme.restricted_to(sub), options);
    } catch (const std::exception& e) {
      cr.skipped = true;
      report.warnings.push_back({Severity::Warning, "LeaveOneOutSkipped",
                                 "indicator(" + def.id + ")", e.what()});
      report.runs.push_back(std::move(cr));
      continue;
    }
    cr.spearman = stats::spearman(gmf_vector(run), base_gmf);
    for (const MaturityScore& ms : run.maturity) {
      cr.gmf[ms.program] = ms.normalized_gmf;
      cr.stage[ms.program] = ms.stage;
      cr.delta_gmf[ms.program] =
          ms.normalized_gmf - report.baseline_gmf.at(ms.program);
    }
    report.runs.push_back(std::move(cr));
  }
  return report;
}

}  // namespace gmf
