#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sfield/field.hpp"
#include "sfield/sfpca.hpp"
#include "sfield/spectral.hpp"

namespace sfield {

double sample_moment(std::span<const double> z, int k);

struct SkewKurt {
  double skew;  // sqrt(N) * m3 of the centered values
  double kurt;  // sqrt(N) * (m4 - 3 m2^2)
};

SkewKurt sk_statistics(std::span<const double> values);

// (1/N) sum_{s in M_h} (Y_{s+h} - mean)(Y_s - mean), mean over the whole grid.
double score_autocovariance(std::span<const double> values, const Dims& dims, const Lag& h,
                            long max_lag);

struct LongRunVariance {
  double var_s;
  double var_k;
  bool floored = false;  // var_s was nonpositive and replaced by gamma_0^3 * 1e-6
};

// Sums of cubed and fourth-powered autocovariances over ||l||_inf <= L'.
LongRunVariance longrun_variances(std::span<const double> values, const Dims& dims, long max_lag,
                                  bool strict = false);

struct LevelStatistics {
  std::size_t level;  // 1-based
  double skew;
  double kurt;
  double var_s;
  double var_k;
  double j;
  bool var_s_floored = false;
};

// Every tuning parameter needed to reproduce a run.
struct TuningEcho {
  std::vector<double> q;
  std::size_t grid_points = 0;
  long truncation = 0;      // L
  long score_max_lag = 0;   // L'
  std::size_t levels = 0;   // p
  double var_threshold = 0.85;
  double weight_threshold = 0.95;
  double variance_captured = 0.0;
  double filter_weight = 0.0;
  WeightKind weight_kind = WeightKind::bartlett;
  bool strict_boundary = false;
  bool strict_variance = false;
  bool p_auto = true;
  bool l_auto = true;
};

struct NormalityTestReport {
  std::vector<LevelStatistics> levels;
  double statistic = 0.0;  // T_p
  int df = 0;
  double p_value = 1.0;
  Dims dims;
  std::size_t basis_dimension = 0;
  TuningEcho tuning;
};

NormalityTestReport jb_test(const ScoreField& scores, long max_lag, bool strict_variance = false);

std::string format_table(const NormalityTestReport& report);
std::string format_csv(const NormalityTestReport& report);
std::string format_jsonl(const NormalityTestReport& report);
// "RESULT T=... df=... p=..."
std::string result_line(const NormalityTestReport& report);

}  // namespace sfield
