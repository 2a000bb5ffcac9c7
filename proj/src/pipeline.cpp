#include "sfield/pipeline.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "sfield/error.hpp"
#include "sfield/log.hpp"

namespace sfield {
namespace {

template <typename F>
auto stage(const char* label, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(label) + ": " + e.what());
  }
}

}  // namespace

PipelineStages run_pipeline_stages(const FunctionalGridSample& sample, const TestOptions& options) {
  const Dims& dims = sample.dims();
  const std::size_t k = sample.dimension();
  TuningEcho tuning;
  tuning.var_threshold = options.var_threshold;
  tuning.weight_threshold = options.weight_threshold;
  tuning.weight_kind = options.weight_kind;
  tuning.strict_boundary = options.strict_boundary;
  tuning.strict_variance = options.strict_variance;

  FunctionalGridSample centered = stage("center", [&] { return center(sample); });

  // (1) spectral density
  tuning.q = options.q ? *options.q : window_rule_of_thumb(dims);
  tuning.grid_points = options.grid_points ? *options.grid_points : default_grid_points(tuning.q);
  SpectralDensityField spectrum = stage("spectral density", [&] {
    return estimate_spectral_density(centered, tuning.q, FrequencyGrid(dims.size(), tuning.grid_points),
                                     options.weight_kind);
  });

  // (2) number of levels
  if (options.levels && (*options.levels == 0 || *options.levels > k))
    throw Error(ErrorKind::invalid_config, "level selection: p must lie in [1, " + std::to_string(k) + "]");
  EigenField eigen = stage("eigendecomposition", [&] {
    return eigendecompose_field(spectrum, options.levels ? *options.levels : k);
  });
  std::vector<double> proportions = variance_explained(eigen, k);
  if (options.levels) {
    tuning.levels = *options.levels;
    tuning.p_auto = false;
    double cum = 0.0;
    for (std::size_t m = 0; m < tuning.levels; ++m) cum += proportions[m];
    tuning.variance_captured = cum;
  } else {
    const Selection sel = select_p(proportions, options.var_threshold);
    tuning.levels = sel.value;
    tuning.variance_captured = sel.achieved;
  }

  // (3) filters
  SfpcFilterBank bank = stage("filters", [&] {
    if (options.truncation) {
      tuning.truncation = *options.truncation;
      tuning.l_auto = false;
    } else {
      tuning.truncation = static_cast<long>(select_L(eigen, options.weight_threshold).value);
    }
    return compute_filters(eigen, tuning.truncation, tuning.levels);
  });
  tuning.filter_weight = bank.captured_weight(0);

  // (4) scores
  ScoreField scores = stage("scores", [&] {
    ScoreField s = compute_scores(centered, bank, options.strict_boundary);
    return options.strict_boundary ? crop_to_valid(s) : s;
  });

  // (5) test tuning
  double qmax = 0.0;
  for (double v : tuning.q) qmax = std::max(qmax, v);
  tuning.score_max_lag = options.score_max_lag ? *options.score_max_lag : static_cast<long>(std::ceil(qmax));

  return PipelineStages{std::move(centered), std::move(spectrum), std::move(eigen), std::move(proportions),
                        std::move(bank),     std::move(scores),   tuning};
}

NormalityTestReport report_for_levels(const PipelineStages& stages, std::size_t p) {
  NormalityTestReport report = stage("normality test", [&] {
    return jb_test(stages.scores.first_levels(p), stages.tuning.score_max_lag, stages.tuning.strict_variance);
  });
  report.dims = stages.centered.dims();
  report.basis_dimension = stages.centered.dimension();
  report.tuning = stages.tuning;
  report.tuning.levels = p;
  return report;
}

NormalityTestReport run_test_pipeline(const FunctionalGridSample& sample, const TestOptions& options) {
  const PipelineStages stages = run_pipeline_stages(sample, options);
  return report_for_levels(stages, stages.tuning.levels);
}

}  // namespace sfield
