#pragma once

#include <optional>
#include <vector>

#include "sfield/field.hpp"
#include "sfield/normtest.hpp"
#include "sfield/sfpca.hpp"
#include "sfield/spectral.hpp"

namespace sfield {

// Unset optionals are chosen automatically: q_i = sqrt(n_i), T from the
// Bartlett support, p by the variance threshold, L by the filter weight
// threshold, L' = ceil(||q||_inf).
struct TestOptions {
  std::optional<std::vector<double>> q;
  std::optional<std::size_t> grid_points;
  std::optional<long> truncation;
  std::optional<long> score_max_lag;
  std::optional<std::size_t> levels;
  double var_threshold = 0.85;
  double weight_threshold = 0.95;
  WeightKind weight_kind = WeightKind::bartlett;
  bool strict_boundary = false;
  bool strict_variance = false;
};

struct PipelineStages {
  FunctionalGridSample centered;
  SpectralDensityField spectrum;
  EigenField eigen;
  std::vector<double> proportions;  // all K levels
  SfpcFilterBank bank;
  ScoreField scores;                // cropped when strict_boundary is set
  TuningEcho tuning;
};

PipelineStages run_pipeline_stages(const FunctionalGridSample& sample, const TestOptions& options);

// Test on the first p levels of an already computed pipeline.
NormalityTestReport report_for_levels(const PipelineStages& stages, std::size_t p);

NormalityTestReport run_test_pipeline(const FunctionalGridSample& sample, const TestOptions& options);

}  // namespace sfield
