#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sfield/field.hpp"
#include "sfield/normtest.hpp"
#include "sfield/numcore.hpp"

namespace sfield {

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

// mt19937_64 stream seeded from a derived 64-bit key.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);
  double normal() { return normal_(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct SarOperators {
  RealMatrix a;
  RealMatrix b;
  double norm_a = 0.6;
  double norm_b = 0.35;
};

// Unscaled draw with independent N(0, (i^2 + j^2)^{-1/2}) entries, 1-based i, j.
RealMatrix draw_operator(std::size_t k, RngStream& rng);

// Two draws from draw_operator (1-based i, j), rescaled to the target
// operator norms.
SarOperators generate_operators(std::uint64_t seed, std::size_t k = 15, double norm_a = 0.6,
                                double norm_b = 0.35);

struct Moments {
  double mean;
  double variance;
  double skewness;
  double kurtosis;
};

// X = xi + lambda sinh((Z - gamma) / delta), Z ~ N(0,1).
struct JohnsonSuParams {
  double xi = 0.0;
  double lambda = 1.0;
  double gamma = 0.0;
  double delta = 1.0;
  Moments target{0.0, 1.0, 0.0, 3.0};

  double transform(double z) const;
};

Moments johnson_su_moments(double xi, double lambda, double gamma, double delta);

// Two-stage moment fit: (gamma, delta) from skewness/kurtosis, then lambda
// and xi from variance and mean. Throws a domain error outside the S_U region.
JohnsonSuParams fit_johnson_su(double skewness, double kurtosis, double mean = 0.0, double variance = 1.0);

struct InnovationSpec {
  enum class Kind { gaussian, johnson_su };
  Kind kind = Kind::gaussian;
  double skewness = 0.0;
  double kurtosis = 3.0;
  JohnsonSuParams standardized;  // mean 0, variance 1

  static InnovationSpec gaussian();
  static InnovationSpec johnson_su(double skewness, double kurtosis);
  // "gaussian" or "su(tau,kappa)" / "su:tau,kappa"
  static InnovationSpec parse(const std::string& text);
  std::string label() const;
};

// Coefficient i (1-based) has mean 0 and variance 2^{-i}.
std::vector<double> sample_innovation(const InnovationSpec& spec, std::size_t k, RngStream& rng);

// X_{s,t} = A X_{s-1,t} + B X_{s,t-1} + eps_{s,t} in raster order on an
// (n1 + burnin) x (n2 + burnin) grid with zero boundary; the first burnin
// rows and columns are dropped.
FunctionalGridSample simulate_sar(const Dims& dims, const SarOperators& ops, const InnovationSpec& innovation,
                                  std::size_t burnin, std::uint64_t seed);

struct McStudyConfig {
  std::vector<Dims> grids{{12, 12}, {25, 25}, {50, 50}};
  std::vector<InnovationSpec> distributions{InnovationSpec::gaussian()};
  std::vector<std::size_t> levels{1, 2, 3, 4};
  std::size_t replications = 500;
  double alpha = 0.05;
  std::uint64_t seed = 20240917;
  std::size_t basis_dimension = 15;
  std::size_t burnin = 50;
  double weight_threshold = 0.95;
  WeightKind weight_kind = WeightKind::bartlett;
  std::optional<double> q;
  std::optional<long> truncation;
  std::optional<long> score_max_lag;
  // Draw A and B afresh for every replication instead of once per study.
  bool operators_per_replication = true;
  bool keep_statistics = false;
};

// Key-value file: one `key = value` per line, '#' comments. Keys: grids
// (e.g. "12x12;25x25"), distributions ("gaussian;su(0,4)"), p ("1,2,3,4"),
// replications, alpha, seed, k, burnin, weight-threshold, weight,
// operators ("per-replication" or "fixed"), and the tuning overrides q, l,
// l-prime.
McStudyConfig parse_mc_config(const std::string& text);
McStudyConfig load_mc_config(const std::string& path);

struct McCell {
  Dims dims;
  std::string distribution;
  std::size_t levels = 0;
  std::size_t rejections = 0;
  std::size_t completed = 0;
  std::size_t failures = 0;
  double rate = 0.0;
  double standard_error = 0.0;
  std::vector<double> statistics;  // T_p per completed replication, if kept
};

struct McStudyTable {
  std::vector<McCell> cells;
  double alpha = 0.05;
  std::size_t replications = 0;
  std::uint64_t seed = 0;

  const McCell& cell(const Dims& dims, const std::string& distribution, std::size_t p) const;
};

McStudyTable run_mc_study(const McStudyConfig& config);

// Wide layout: one row per (grid, distribution), rate and s.e. column per p.
std::string format_mc_csv(const McStudyTable& table);

}  // namespace sfield
