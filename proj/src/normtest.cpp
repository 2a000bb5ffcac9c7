#include "sfield/normtest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "sfield/error.hpp"
#include "sfield/log.hpp"

namespace sfield {

double sample_moment(std::span<const double> z, int k) {
  if (k < 1 || k > 4) fail(ErrorKind::invalid_input, "sample moments are defined for k = 1..4");
  if (z.empty()) fail(ErrorKind::invalid_input, "sample moment of an empty field");
  double s = 0.0;
  for (double v : z) {
    double p = v;
    for (int i = 1; i < k; ++i) p *= v;
    s += p;
  }
  return s / static_cast<double>(z.size());
}

SkewKurt sk_statistics(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) fail(ErrorKind::invalid_input, "skewness/kurtosis need at least two values");
  const double mean = sample_moment(values, 1);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double z = v - mean;
    const double z2 = z * z;
    m2 += z2;
    m3 += z2 * z;
    m4 += z2 * z2;
  }
  const double inv = 1.0 / static_cast<double>(n);
  m2 *= inv;
  m3 *= inv;
  m4 *= inv;
  const double root = std::sqrt(static_cast<double>(n));
  return {root * m3, root * (m4 - 3.0 * m2 * m2)};
}

namespace {

void check_max_lag(const Dims& dims, long max_lag) {
  if (max_lag < 0) fail(ErrorKind::invalid_config, "L' must be nonnegative");
  const std::size_t smallest = *std::min_element(dims.begin(), dims.end());
  if (static_cast<std::size_t>(max_lag) >= smallest)
    fail(ErrorKind::invalid_config, "L' = " + std::to_string(max_lag) +
                                        " must be smaller than the smallest grid extent " + std::to_string(smallest));
}

// gamma_h with a precomputed mean; caller validated h.
double autocov_centered(std::span<const double> values, const Dims& dims, const Lag& h, double mean) {
  const std::size_t d = dims.size();
  long ext[3] = {1, 1, 1}, lag3[3] = {0, 0, 0};
  for (std::size_t i = 0; i < d; ++i) {
    ext[3 - d + i] = static_cast<long>(dims[i]);
    lag3[3 - d + i] = h[i];
  }
  const long offset = (lag3[0] * ext[1] + lag3[1]) * ext[2] + lag3[2];
  long lo[3], hi[3];
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::max(0L, -lag3[a]);
    hi[a] = std::min(ext[a], ext[a] - lag3[a]);
  }
  double acc = 0.0;
  for (long a = lo[0]; a < hi[0]; ++a)
    for (long b = lo[1]; b < hi[1]; ++b)
      for (long c = lo[2]; c < hi[2]; ++c) {
        const long s = (a * ext[1] + b) * ext[2] + c;
        acc += (values[static_cast<std::size_t>(s + offset)] - mean) * (values[static_cast<std::size_t>(s)] - mean);
      }
  return acc / static_cast<double>(values.size());
}

}  // namespace

double score_autocovariance(std::span<const double> values, const Dims& dims, const Lag& h, long max_lag) {
  if (values.size() != grid_size(dims)) fail(ErrorKind::invalid_input, "score field size differs from grid");
  if (h.size() != dims.size()) fail(ErrorKind::invalid_input, "lag dimension differs from grid dimension");
  check_max_lag(dims, max_lag);
  for (long v : h)
    if (std::abs(v) > max_lag) fail(ErrorKind::invalid_config, "lag exceeds L'");
  return autocov_centered(values, dims, h, sample_moment(values, 1));
}

LongRunVariance longrun_variances(std::span<const double> values, const Dims& dims, long max_lag, bool strict) {
  if (values.size() != grid_size(dims)) fail(ErrorKind::invalid_input, "score field size differs from grid");
  check_max_lag(dims, max_lag);
  const std::size_t d = dims.size();
  const double mean = sample_moment(values, 1);
  const Lag zero(d, 0);
  const double g0 = autocov_centered(values, dims, zero, mean);
  if (!(g0 > 0.0)) fail(ErrorKind::numerical, "score field has zero variance");

  // gamma_{-h} = gamma_h: accumulate the lexicographically positive half twice.
  double var_s = g0 * g0 * g0;
  double var_k = g0 * g0 * g0 * g0;
  Lag h(d, -max_lag);
  for (;;) {
    bool positive = false;
    for (long v : h)
      if (v != 0) {
        positive = v > 0;
        break;
      }
    if (positive) {
      const double g = autocov_centered(values, dims, h, mean);
      const double g3 = g * g * g;
      var_s += 2.0 * g3;
      var_k += 2.0 * g3 * g;
    }
    std::size_t i = d;
    while (i-- > 0) {
      if (h[i] < max_lag) {
        ++h[i];
        break;
      }
      h[i] = -max_lag;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }

  LongRunVariance out{var_s, var_k, false};
  if (!(var_s > 0.0)) {
    if (strict) fail(ErrorKind::numerical, "long-run skewness variance is not positive");
    out.var_s = std::max(var_s, g0 * g0 * g0 * 1e-6);
    out.floored = true;
    log::warn("long-run skewness variance " + std::to_string(var_s) + " is not positive; floored to " +
              std::to_string(out.var_s));
  }
  return out;
}

NormalityTestReport jb_test(const ScoreField& scores, long max_lag, bool strict_variance) {
  const std::size_t p = scores.levels();
  if (p == 0) fail(ErrorKind::invalid_config, "the test needs at least one score level");
  NormalityTestReport report;
  report.dims = scores.dims;
  report.df = static_cast<int>(2 * p);
  report.tuning.score_max_lag = max_lag;
  report.tuning.levels = p;
  report.tuning.strict_variance = strict_variance;
  for (std::size_t m = 0; m < p; ++m) {
    const auto y = scores.level(m);
    const SkewKurt sk = sk_statistics(y);
    const LongRunVariance lr = longrun_variances(y, scores.dims, max_lag, strict_variance);
    LevelStatistics ls{m + 1, sk.skew, sk.kurt, lr.var_s, lr.var_k, 0.0, lr.floored};
    ls.j = sk.skew * sk.skew / (6.0 * lr.var_s) + sk.kurt * sk.kurt / (24.0 * lr.var_k);
    report.statistic += ls.j;
    report.levels.push_back(ls);
  }
  report.p_value = chisq_sf(report.statistic, report.df);
  return report;
}

namespace {

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += num(v[i]);
  }
  return s;
}

std::string join_dims(const Dims& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(dims[i]);
  }
  return s;
}

const char* kind_name(WeightKind k) { return k == WeightKind::bartlett ? "bartlett" : "bartlett-product"; }

std::string tuning_header(const NormalityTestReport& r) {
  const TuningEcho& t = r.tuning;
  std::ostringstream os;
  os << "# dims=" << join_dims(r.dims) << " k=" << r.basis_dimension << " q=" << join(t.q, ',')
     << " grid-t=" << t.grid_points << " l=" << t.truncation << " l-prime=" << t.score_max_lag
     << " p=" << t.levels << " var-threshold=" << num(t.var_threshold)
     << " weight-threshold=" << num(t.weight_threshold) << " weight=" << kind_name(t.weight_kind)
     << " strict-boundary=" << (t.strict_boundary ? 1 : 0) << " strict-variance=" << (t.strict_variance ? 1 : 0)
     << '\n';
  return os.str();
}

}  // namespace

std::string format_table(const NormalityTestReport& r) {
  std::ostringstream os;
  os << tuning_header(r);
  char line[256];
  std::snprintf(line, sizeof line, "%5s %12s %12s %12s %12s %12s\n", "level", "S", "K", "varS", "varK", "J");
  os << line;
  for (const auto& l : r.levels) {
    std::snprintf(line, sizeof line, "%5zu %12.5g %12.5g %12.5g %12.5g %12.5g%s\n", l.level, l.skew, l.kurt,
                  l.var_s, l.var_k, l.j, l.var_s_floored ? "  (varS floored)" : "");
    os << line;
  }
  std::snprintf(line, sizeof line, "T = %.6g on %d df, p-value = %.6g\n", r.statistic, r.df, r.p_value);
  os << line << result_line(r) << '\n';
  return os.str();
}

std::string format_csv(const NormalityTestReport& r) {
  std::ostringstream os;
  os << tuning_header(r);
  os << "level,S,K,varS,varK,J,T,df,pvalue\n";
  for (const auto& l : r.levels)
    os << l.level << ',' << num(l.skew) << ',' << num(l.kurt) << ',' << num(l.var_s) << ',' << num(l.var_k) << ','
       << num(l.j) << ',' << num(r.statistic) << ',' << r.df << ',' << num(r.p_value) << '\n';
  return os.str();
}

std::string format_jsonl(const NormalityTestReport& r) {
  std::ostringstream os;
  const TuningEcho& t = r.tuning;
  nlohmann::json header = {{"dims", r.dims},
                           {"k", r.basis_dimension},
                           {"q", t.q},
                           {"grid_t", t.grid_points},
                           {"l", t.truncation},
                           {"l_prime", t.score_max_lag},
                           {"p", t.levels},
                           {"var_threshold", t.var_threshold},
                           {"weight_threshold", t.weight_threshold},
                           {"weight", kind_name(t.weight_kind)},
                           {"strict_boundary", t.strict_boundary},
                           {"strict_variance", t.strict_variance}};
  os << nlohmann::json{{"tuning", header}}.dump() << '\n';
  for (const auto& l : r.levels) {
    nlohmann::json row = {{"level", l.level}, {"S", l.skew}, {"K", l.kurt}, {"varS", l.var_s}, {"varK", l.var_k},
                          {"J", l.j},         {"T", r.statistic}, {"df", r.df}, {"pvalue", r.p_value}};
    os << row.dump() << '\n';
  }
  return os.str();
}

std::string result_line(const NormalityTestReport& r) {
  return "RESULT T=" + num(r.statistic) + " df=" + std::to_string(r.df) + " p=" + num(r.p_value);
}

}  // namespace sfield
