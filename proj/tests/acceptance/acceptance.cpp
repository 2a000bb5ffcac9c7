// Acceptance run: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number, e.g. `acceptance 4 5 6`.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "sfield/error.hpp"
#include "sfield/field.hpp"
#include "sfield/log.hpp"
#include "sfield/normtest.hpp"
#include "sfield/numcore.hpp"
#include "sfield/pipeline.hpp"
#include "sfield/sfpca.hpp"
#include "sfield/simulate.hpp"
#include "sfield/spectral.hpp"

using namespace sfield;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string rate_text(const McCell& c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.3f (se %.3f)", c.rate, c.standard_error);
  return buf;
}

// 1. Size on 12x12 under Gaussian innovations.
Outcome null_size() {
  McStudyConfig cfg;
  cfg.grids = {{12, 12}};
  cfg.levels = {1, 2, 3, 4};
  cfg.replications = 500;
  const auto table = run_mc_study(cfg);
  bool ok = true;
  std::string detail = "12x12 gaussian R=500:";
  for (std::size_t p = 1; p <= 4; ++p) {
    const McCell& c = table.cell({12, 12}, "gaussian", p);
    ok = ok && c.failures == 0 && c.rate >= 0.02 && c.rate <= 0.10;
    detail += " p" + std::to_string(p) + "=" + fmt("%.3f", c.rate);
  }
  return {ok, detail + " (band [0.02, 0.10])"};
}

// Shared 25x25 power study for criteria 2 and 3.
const McStudyTable& power_table() {
  static const McStudyTable table = [] {
    McStudyConfig cfg;
    cfg.grids = {{25, 25}};
    cfg.distributions = {InnovationSpec::parse("su(0,6)"), InnovationSpec::parse("su(0,3.5)"),
                         InnovationSpec::parse("su(0,3.2)"), InnovationSpec::parse("su(1,5)")};
    cfg.levels = {1, 2};
    cfg.replications = 200;
    return run_mc_study(cfg);
  }();
  return table;
}

// 2. Ordering of power along the alternative sequence and agreement with the
// published rates.
Outcome power_ordering() {
  const auto& t = power_table();
  const McCell& a = t.cell({25, 25}, "su(0,6)", 1);
  const McCell& b = t.cell({25, 25}, "su(0,3.5)", 1);
  const McCell& c = t.cell({25, 25}, "su(0,3.2)", 1);
  auto gap_ok = [](const McCell& hi, const McCell& lo) {
    const double se = std::hypot(hi.standard_error, lo.standard_error);
    return hi.rate - lo.rate >= -2.0 * se;
  };
  const bool ordered = gap_ok(a, b) && gap_ok(b, c);
  const double ref[3] = {0.81, 0.20, 0.10};
  const McCell* cells[3] = {&a, &b, &c};
  bool banded = true;
  std::string band_detail;
  for (int i = 0; i < 3; ++i) {
    const double dev = cells[i]->rate - ref[i];
    banded = banded && std::abs(dev) <= 0.10;
    band_detail += fmt(" %+.3f", dev);
  }
  const std::string detail = "25x25 p=1 R=200: su(0,6)=" + rate_text(a) + " su(0,3.5)=" + rate_text(b) +
                             " su(0,3.2)=" + rate_text(c) + "; ordering " + (ordered ? "ok" : "violated") +
                             "; deviation from 0.81/0.20/0.10:" + band_detail + (banded ? " (within 0.10)" : " (outside 0.10)");
  return {ordered && banded, detail};
}

// 3. A strong alternative is detected almost surely.
Outcome saturation() {
  const McCell& c = power_table().cell({25, 25}, "su(1,5)", 2);
  return {c.rate >= 0.90, "25x25 su(1,5) p=2 R=200: rate " + rate_text(c) + " (need >= 0.90)"};
}

// 4. Scalar iid data: the statistic reduces to the classical Jarque-Bera.
double classical_jb(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double tau = m3 / std::pow(m2, 1.5);
  const double kappa = m4 / (m2 * m2);
  return n * (tau * tau / 6.0 + (kappa - 3.0) * (kappa - 3.0) / 24.0);
}

Outcome jb_oracle() {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<std::size_t> side(6, 30);
  std::normal_distribution<double> z;
  std::exponential_distribution<double> e;
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const Dims dims{side(rng), side(rng)};
    const std::size_t n = grid_size(dims);
    RealMatrix x(n, 1);
    std::vector<double> values(n);
    for (std::size_t s = 0; s < n; ++s) values[s] = x(s, 0) = (rep % 2 ? z(rng) : e(rng)) * 3.0 + 1.5;
    const FunctionalGridSample sample(dims, x, BasisSpec::fourier(1));
    TestOptions opts;
    opts.levels = 1;
    opts.score_max_lag = 0;
    const auto rep_out = run_test_pipeline(sample, opts);
    const double ref = classical_jb(values);
    worst = std::max(worst, std::abs(rep_out.statistic - ref) / std::max(ref, 1e-300));
    if (rep_out.tuning.truncation != 0) return {false, "filter truncation was not 0 for scalar data"};
  }
  return {worst < 1e-10, "100 datasets, max relative error " + fmt("%.2e", worst) + " (need < 1e-10)"};
}

// 5. Inverse transform of the spectral estimate gives the windowed lag
// covariances, against direct double sums.
Outcome fourier_pair() {
  double worst = 0.0;
  int cases = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto raw = seed % 2 ? fixtures::ma_sample({4, 4}, 2, seed) : fixtures::iid_sample({4, 4}, 2, seed);
    const RealMatrix& x = raw.orthonormal_coeffs();
    double mean[2] = {0.0, 0.0};
    for (std::size_t s = 0; s < 16; ++s)
      for (std::size_t j = 0; j < 2; ++j) mean[j] += x(s, j) / 16.0;
    for (const std::vector<double>& q : {std::vector<double>{1.5, 2.0}, std::vector<double>{2.5, 2.5},
                                         std::vector<double>{3.0, 1.0}}) {
      const long support = bartlett_support(q);
      for (std::size_t t : {static_cast<std::size_t>(2 * support + 1), std::size_t{11}}) {
        const auto spec = estimate_spectral_density(center(raw), q, FrequencyGrid(2, t));
        const long reach = std::min<long>(3, static_cast<long>(t - 1) / 2);
        for (long h1 = -reach; h1 <= reach; ++h1)
          for (long h2 = -reach; h2 <= reach; ++h2) {
            const double r = std::hypot(h1 / q[0], h2 / q[1]);
            const double w = std::max(0.0, 1.0 - r);
            double direct[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
            for (long s1 = 0; s1 < 4; ++s1)
              for (long s2 = 0; s2 < 4; ++s2) {
                const long u1 = s1 + h1, u2 = s2 + h2;
                if (u1 < 0 || u1 >= 4 || u2 < 0 || u2 >= 4) continue;
                for (int a = 0; a < 2; ++a)
                  for (int b = 0; b < 2; ++b)
                    direct[a][b] += (x(u1 * 4 + u2, a) - mean[a]) * (x(s1 * 4 + s2, b) - mean[b]) / 16.0;
              }
            const auto back = invert_to_lag(spec, {h1, h2});
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) worst = std::max(worst, std::abs(back(a, b) - w * direct[a][b]));
            ++cases;
          }
      }
    }
  }
  return {worst < 1e-10, std::to_string(cases) + " lags on 4x4, K=2, max error " + fmt("%.2e", worst) +
                             " (need < 1e-10)"};
}

// 6. Integrated eigenvalues equal the integrated trace; for the white-noise
// window both equal trace C_0.
Outcome variance_conservation() {
  double worst = 0.0, worst_white = 0.0;
  int samples = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    FunctionalGridSample s = seed <= 2   ? fixtures::iid_sample({9, 11}, 5, seed)
                             : seed <= 4 ? fixtures::ma_sample({10, 8}, 4, seed)
                                         : simulate_sar({14, 14}, generate_operators(seed), InnovationSpec::parse("su(0.5,4)"),
                                                        20, seed);
    s = center(s);
    const std::size_t k = s.dimension();
    for (const std::vector<double>& q : {window_rule_of_thumb(s.dims()), std::vector<double>{1.0, 1.0},
                                         std::vector<double>{2.0, 1.0}}) {
      const FrequencyGrid grid(2, default_grid_points(q));
      const auto spec = estimate_spectral_density(s, q, grid);
      const auto eig = eigendecompose_field(spec, k);
      double lam = 0.0, tr = 0.0;
      for (std::size_t node = 0; node < grid.size(); ++node) {
        for (double v : eig.values[node]) lam += grid.weight() * v;
        tr += grid.weight() * spec.matrices[node].trace();
      }
      worst = std::max(worst, std::abs(lam - tr) / tr);
      if (q[0] <= 1.0 && q[1] <= 1.0) {
        const auto c0 = autocovariance(s, {0, 0}).matrix;
        double t0 = 0.0;
        for (std::size_t j = 0; j < k; ++j) t0 += c0(j, j);
        worst_white = std::max({worst_white, std::abs(lam - t0) / t0, std::abs(tr - t0) / t0});
      }
      ++samples;
    }
  }
  return {worst < 1e-10 && worst_white < 1e-10,
          std::to_string(samples) + " estimates, max relative gap " + fmt("%.2e", worst) + ", white-noise gap to trace C0 " +
              fmt("%.2e", worst_white) + " (need < 1e-10)"};
}

// 7. iid curves: no lag spreading, scores are the ordinary FPC scores.
Outcome white_noise() {
  double off_lag = 0.0, score_gap = 0.0;
  std::size_t max_l = 0, max_l_default = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = center(fixtures::iid_sample({20, 18}, 6, seed));
    const std::vector<double> q{1.0, 1.0};
    const FrequencyGrid grid(2, 41);
    const auto eig = eigendecompose_field(estimate_spectral_density(s, q, grid), 6);
    max_l = std::max(max_l, select_L(eig).value);
    const auto bank = compute_filters(eig, 3, 3);
    for (std::size_t m = 0; m < 3; ++m)
      for (std::size_t li = 0; li < bank.lag_count(); ++li) {
        const auto lag = bank.lag(li);
        if (std::all_of(lag.begin(), lag.end(), [](long v) { return v == 0; })) continue;
        double norm = 0.0;
        for (double c : bank.filter(m, li)) norm += c * c;
        off_lag = std::max(off_lag, std::sqrt(norm));
      }
    const auto sfpc = compute_scores(s, bank.truncated(0));
    const auto fpc = ordinary_fpca_scores(s, 3);
    for (std::size_t m = 0; m < 3; ++m) {
      double plus = 0.0, minus = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < sfpc.size(); ++i) {
        const double a = sfpc.level(m)[i], b = fpc.level(m)[i];
        plus = std::max(plus, std::abs(a - b));
        minus = std::max(minus, std::abs(a + b));
        scale = std::max(scale, std::abs(b));
      }
      score_gap = std::max(score_gap, std::min(plus, minus) / scale);
    }
    TestOptions opts;
    const auto stages = run_pipeline_stages(fixtures::iid_sample({20, 18}, 6, seed), opts);
    max_l_default = std::max<std::size_t>(max_l_default, static_cast<std::size_t>(stages.tuning.truncation));
  }
  return {max_l == 0 && max_l_default == 0 && off_lag < 1e-10 && score_gap < 1e-10,
          "5 iid samples: L=" + std::to_string(max_l) + " (white window), L=" + std::to_string(max_l_default) +
              " (default window), max off-lag filter norm " + fmt("%.2e", off_lag) + ", max score gap " +
              fmt("%.2e", score_gap)};
}

// 8. Cross-correlations between levels 1 and 2 vanish at small lags.
Outcome orthogonality() {
  const auto sample = simulate_sar({100, 100}, generate_operators(derive_seed(20240917, 0xa11ce)),
                                   InnovationSpec::gaussian(), 50, derive_seed(20240917, 8));
  TestOptions opts;
  opts.levels = 2;
  const auto stages = run_pipeline_stages(sample, opts);
  const ScoreField& y = stages.scores;
  const std::size_t n = y.size();
  const auto a = y.level(0), b = y.level(1);
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i] / static_cast<double>(n);
    mb += b[i] / static_cast<double>(n);
  }
  double va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    va += (a[i] - ma) * (a[i] - ma) / static_cast<double>(n);
    vb += (b[i] - mb) * (b[i] - mb) / static_cast<double>(n);
  }
  double worst = 0.0;
  for (long h1 = -2; h1 <= 2; ++h1)
    for (long h2 = -2; h2 <= 2; ++h2) {
      double acc = 0.0;
      for (long s1 = 0; s1 < 100; ++s1)
        for (long s2 = 0; s2 < 100; ++s2) {
          const long u1 = s1 + h1, u2 = s2 + h2;
          if (u1 < 0 || u1 >= 100 || u2 < 0 || u2 >= 100) continue;
          acc += (a[u1 * 100 + u2] - ma) * (b[s1 * 100 + s2] - mb);
        }
      worst = std::max(worst, std::abs(acc / static_cast<double>(n)) / std::sqrt(va * vb));
    }
  const double bound = 5.0 / std::sqrt(static_cast<double>(n));
  return {worst < bound, "100x100, 25 lags: max |cross-correlation| " + fmt("%.4f", worst) + " (bound " +
                             fmt("%.3f", bound) + ")"};
}

// 9. Upper tail of the null distribution of the p=2 statistic.
Outcome calibration() {
  McStudyConfig cfg;
  cfg.grids = {{25, 25}};
  cfg.levels = {2};
  cfg.replications = 500;
  cfg.seed = derive_seed(20240917, 9);
  cfg.keep_statistics = true;
  const auto table = run_mc_study(cfg);
  std::vector<double> t = table.cell({25, 25}, "gaussian", 2).statistics;
  if (t.size() < 2) return {false, "too few completed replications"};
  std::sort(t.begin(), t.end());
  const double pos = 0.95 * static_cast<double>(t.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double q95 = t[lo] + (pos - static_cast<double>(lo)) * (t[std::min(lo + 1, t.size() - 1)] - t[lo]);
  const double ref = chisq_isf(0.05, 4);
  const double rel = q95 / ref - 1.0;
  return {std::abs(rel) <= 0.15, std::to_string(t.size()) + " replications: 0.95-quantile " + fmt("%.3f", q95) +
                                     " vs " + fmt("%.3f", ref) + fmt(" (%+.1f%%, band 15%%)", 100.0 * rel)};
}

// 10. Sampled moments of the fitted S_U(0.5, 4), with batch-means errors.
Outcome johnson_fit() {
  const auto spec = InnovationSpec::johnson_su(0.5, 4.0);
  RngStream rng(derive_seed(20240917, 10));
  constexpr std::size_t kBatches = 100, kPerBatch = 10000;
  std::vector<double> all;
  all.reserve(kBatches * kPerBatch);
  std::vector<double> bskew, bkurt;
  auto moments = [](const double* x, std::size_t n, double& skew, double& kurt) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x[i];
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x[i] - mean;
      m2 += d * d;
      m3 += d * d * d;
      m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(n);
    skew = m3 / static_cast<double>(n) / std::pow(m2, 1.5);
    kurt = m4 / static_cast<double>(n) / (m2 * m2);
  };
  for (std::size_t b = 0; b < kBatches; ++b) {
    for (std::size_t i = 0; i < kPerBatch; ++i) all.push_back(spec.standardized.transform(rng.normal()));
    double s, k;
    moments(all.data() + b * kPerBatch, kPerBatch, s, k);
    bskew.push_back(s);
    bkurt.push_back(k);
  }
  double skew, kurt;
  moments(all.data(), all.size(), skew, kurt);
  auto se = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x / static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m) / static_cast<double>(v.size() - 1);
    return std::sqrt(var / static_cast<double>(v.size()));
  };
  const double se_s = se(bskew), se_k = se(bkurt);
  const bool ok = std::abs(skew - 0.5) <= 3.0 * se_s && std::abs(kurt - 4.0) <= 3.0 * se_k;
  char buf[200];
  std::snprintf(buf, sizeof buf, "1e6 draws: skewness %.4f (se %.4f), kurtosis %.4f (se %.4f)", skew, se_s, kurt,
                se_k);
  return {ok, buf};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"null size on 12x12", null_size},
      {"power ordering on 25x25", power_ordering},
      {"strong-alternative saturation", saturation},
      {"classical Jarque-Bera equivalence", jb_oracle},
      {"Fourier pair exactness", fourier_pair},
      {"variance conservation", variance_conservation},
      {"white-noise degeneracy", white_noise},
      {"score-field orthogonality", orthogonality},
      {"null chi-square calibration", calibration},
      {"Johnson S_U moment fit", johnson_fit},
  };
  std::set<int> chosen;
  for (int i = 1; i < argc; ++i) chosen.insert(std::atoi(argv[i]));
  log::set_threshold(log::Level::error);

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!chosen.empty() && !chosen.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failed;
    std::printf("[%s] %2d %s: %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", id, criteria[i].first, out.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
