#include "sfield/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "sfield/error.hpp"
#include "sfield/log.hpp"
#include "sfield/parallel.hpp"
#include "sfield/pipeline.hpp"

namespace sfield {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (c + 0x8cb92ba72f3d8dd7ULL));
  return h;
}

RngStream::RngStream(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(splitmix64(seed)), static_cast<std::uint32_t>(splitmix64(seed) >> 32)};
  engine_.seed(seq);
}

RealMatrix draw_operator(std::size_t k, RngStream& rng) {
  if (k == 0) fail(ErrorKind::invalid_config, "operator dimension must be positive");
  RealMatrix m(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double ii = static_cast<double>(i + 1), jj = static_cast<double>(j + 1);
      m(i, j) = rng.normal() * std::pow(ii * ii + jj * jj, -0.25);  // variance (i^2+j^2)^{-1/2}
    }
  return m;
}

SarOperators generate_operators(std::uint64_t seed, std::size_t k, double norm_a, double norm_b) {
  RngStream rng(derive_seed(seed, 0x6f70));
  RealMatrix a = draw_operator(k, rng);
  RealMatrix b = draw_operator(k, rng);
  SarOperators ops{std::move(a), std::move(b), norm_a, norm_b};
  auto rescale = [](RealMatrix& m, double target) {
    const double n = operator_norm(m);
    if (n == 0.0) return;
    for (double& x : m.data()) x *= target / n;
  };
  rescale(ops.a, norm_a);
  rescale(ops.b, norm_b);
  return ops;
}

// ---- Johnson S_U -----------------------------------------------------------

namespace {

// Standardized skewness and kurtosis in terms of w = omega - 1 = expm1(delta^-2)
// and big_omega = gamma / delta.
struct ShapeMoments {
  double skew;
  double kurt;
};

ShapeMoments su_shape(double w, double big_omega) {
  const double om = 1.0 + w;
  const double c2 = std::cosh(2.0 * big_omega);
  const double denom = om * c2 + 1.0;
  const double skew = -std::sqrt(om * w / 2.0) *
                      (om * (om + 2.0) * std::sinh(3.0 * big_omega) + 3.0 * std::sinh(big_omega)) /
                      std::pow(denom, 1.5);
  const double om2 = om * om;
  const double kurt = 0.5 *
                      (om2 * (om2 * om2 + 2.0 * om2 * om + 3.0 * om2 - 3.0) * std::cosh(4.0 * big_omega) +
                       4.0 * om2 * (om + 2.0) * c2 + 3.0 * (2.0 * om + 1.0)) /
                      (denom * denom);
  return {skew, kurt};
}

// Kurtosis of the lognormal limit at omega: the upper edge of the S_U region.
double lognormal_kurtosis(double om) { return om * om * om * om + 2.0 * om * om * om + 3.0 * om * om - 3.0; }
double lognormal_skew2(double om) { return (om - 1.0) * (om + 2.0) * (om + 2.0); }

template <typename F>
double bisect(F&& f, double lo, double hi, int iters = 300) {
  // f(lo) < 0 <= f(hi)
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Omega (as w = omega - 1) with the symmetric kurtosis equal to kappa.
double symmetric_w(double kurt) {
  double hi = 1.0;
  while (su_shape(hi, 0.0).kurt < kurt) hi *= 2.0;
  return bisect([&](double w) { return su_shape(w, 0.0).kurt - kurt; }, 0.0, hi);
}

// Omega_>=0 on the kurtosis contour at fixed w.
double contour_omega(double w, double kurt) {
  if (su_shape(w, 0.0).kurt >= kurt) return 0.0;
  double hi = 0.5;
  for (int i = 0; i < 200 && su_shape(w, hi).kurt < kurt; ++i) hi *= 2.0;
  return bisect([&](double o) { return su_shape(w, o).kurt - kurt; }, 0.0, hi);
}

struct ShapeSolution {
  double w;
  double big_omega;
};

double residual(const ShapeSolution& s, double skew, double kurt) {
  const ShapeMoments m = su_shape(s.w, s.big_omega);
  return std::hypot(m.skew - skew, (m.kurt - kurt) / std::max(1.0, kurt));
}

bool newton_shape(double skew, double kurt, ShapeSolution& sol) {
  // variables (log w, big_omega)
  double x0 = std::log(sol.w), x1 = sol.big_omega;
  auto eval = [&](double a, double b, double& r0, double& r1) {
    const ShapeMoments m = su_shape(std::exp(a), b);
    r0 = m.skew - skew;
    r1 = m.kurt - kurt;
    return std::isfinite(r0) && std::isfinite(r1);
  };
  double r0, r1;
  if (!eval(x0, x1, r0, r1)) return false;
  for (int it = 0; it < 100; ++it) {
    const double norm = std::hypot(r0, r1);
    if (norm < 1e-14) {
      sol = {std::exp(x0), x1};
      return true;
    }
    const double h = 1e-6;
    double a0, a1, b0, b1, c0, c1, d0, d1;
    if (!eval(x0 + h, x1, a0, a1) || !eval(x0 - h, x1, b0, b1) || !eval(x0, x1 + h, c0, c1) ||
        !eval(x0, x1 - h, d0, d1))
      return false;
    const double j00 = (a0 - b0) / (2 * h), j10 = (a1 - b1) / (2 * h);
    const double j01 = (c0 - d0) / (2 * h), j11 = (c1 - d1) / (2 * h);
    const double det = j00 * j11 - j01 * j10;
    if (!(std::abs(det) > 1e-300)) return false;
    const double dx0 = -(j11 * r0 - j01 * r1) / det;
    const double dx1 = -(-j10 * r0 + j00 * r1) / det;
    double step = 1.0;
    bool improved = false;
    for (int k = 0; k < 40; ++k, step *= 0.5) {
      double n0, n1;
      if (eval(x0 + step * dx0, x1 + step * dx1, n0, n1) && std::hypot(n0, n1) < norm) {
        x0 += step * dx0;
        x1 += step * dx1;
        r0 = n0;
        r1 = n1;
        improved = true;
        break;
      }
    }
    if (!improved) return false;
  }
  return false;
}

ShapeSolution bisection_shape(double skew, double kurt, double w_lognormal, double w_symmetric) {
  const double target = skew * skew;
  // skew^2 along the kurtosis contour falls from the lognormal edge to 0 at the symmetric point.
  const double w = bisect(
      [&](double w) {
        const double o = contour_omega(w, kurt);
        const double s = su_shape(w, o).skew;
        return target - s * s;
      },
      w_lognormal, w_symmetric);
  const double o = contour_omega(w, kurt);
  return {w, skew > 0.0 ? -o : o};
}

}  // namespace

Moments johnson_su_moments(double xi, double lambda, double gamma, double delta) {
  if (!(lambda > 0.0) || !(delta > 0.0)) fail(ErrorKind::domain, "S_U requires lambda > 0 and delta > 0");
  const double w = std::expm1(1.0 / (delta * delta));
  const double big_omega = gamma / delta;
  const ShapeMoments m = su_shape(w, big_omega);
  const double om = 1.0 + w;
  const double unit_var = 0.5 * w * (om * std::cosh(2.0 * big_omega) + 1.0);
  return {xi - lambda * std::sqrt(om) * std::sinh(big_omega), lambda * lambda * unit_var, m.skew, m.kurt};
}

double JohnsonSuParams::transform(double z) const { return xi + lambda * std::sinh((z - gamma) / delta); }

JohnsonSuParams fit_johnson_su(double skewness, double kurtosis, double mean, double variance) {
  if (!(variance > 0.0)) fail(ErrorKind::domain, "S_U fit needs a positive variance");
  if (!std::isfinite(skewness) || !std::isfinite(kurtosis) || !std::isfinite(mean))
    fail(ErrorKind::domain, "S_U fit needs finite target moments");
  if (!(kurtosis > 3.0))
    fail(ErrorKind::domain, "S_U(" + std::to_string(skewness) + ", " + std::to_string(kurtosis) +
                                ") is infeasible: kurtosis must exceed the normal boundary 3");
  double hi = 1.0;
  while (lognormal_kurtosis(hi) < kurtosis) hi *= 2.0;
  const double om_lognormal = bisect([&](double om) { return lognormal_kurtosis(om) - kurtosis; }, 1.0, hi);
  const double skew2_max = lognormal_skew2(om_lognormal);
  if (!(skewness * skewness < skew2_max))
    fail(ErrorKind::domain, "S_U(" + std::to_string(skewness) + ", " + std::to_string(kurtosis) +
                                ") is infeasible: squared skewness must stay below the lognormal boundary " +
                                std::to_string(skew2_max));

  const double w_sym = symmetric_w(kurtosis);
  ShapeSolution sol{w_sym, 0.0};
  if (skewness != 0.0) {
    ShapeSolution guess{w_sym, skewness > 0.0 ? -0.1 : 0.1};
    if (newton_shape(skewness, kurtosis, guess) && guess.w > 0.0 && residual(guess, skewness, kurtosis) < 1e-12) {
      sol = guess;
    } else {
      log::debug("S_U Newton iteration stalled; using nested bisection");
      sol = bisection_shape(skewness, kurtosis, om_lognormal - 1.0, w_sym);
    }
  }

  JohnsonSuParams p;
  p.delta = 1.0 / std::sqrt(std::log1p(sol.w));
  p.gamma = sol.big_omega * p.delta;
  const double om = 1.0 + sol.w;
  const double unit_var = 0.5 * sol.w * (om * std::cosh(2.0 * sol.big_omega) + 1.0);
  p.lambda = std::sqrt(variance / unit_var);
  p.xi = mean + p.lambda * std::sqrt(om) * std::sinh(sol.big_omega);
  p.target = {mean, variance, skewness, kurtosis};

  const Moments got = johnson_su_moments(p.xi, p.lambda, p.gamma, p.delta);
  const double scale = std::sqrt(variance);
  const double err = std::max({std::abs(got.mean - mean) / scale, std::abs(got.variance / variance - 1.0),
                               std::abs(got.skewness - skewness), std::abs(got.kurtosis - kurtosis)});
  if (!(err < 1e-8)) fail(ErrorKind::numerical, "S_U moment fit did not converge (residual " + std::to_string(err) + ")");
  return p;
}

InnovationSpec InnovationSpec::gaussian() { return InnovationSpec{}; }

InnovationSpec InnovationSpec::johnson_su(double skewness, double kurtosis) {
  InnovationSpec s;
  s.kind = Kind::johnson_su;
  s.skewness = skewness;
  s.kurtosis = kurtosis;
  s.standardized = fit_johnson_su(skewness, kurtosis, 0.0, 1.0);
  return s;
}

InnovationSpec InnovationSpec::parse(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (text == "gaussian" || text == "normal") return gaussian();
  std::string body;
  if (text.rfind("su(", 0) == 0 && text.back() == ')') body = text.substr(3, text.size() - 4);
  else if (text.rfind("su:", 0) == 0) body = text.substr(3);
  else fail(ErrorKind::invalid_config, "unknown distribution '" + raw + "' (expected gaussian or su(tau,kappa))");
  const auto comma = body.find(',');
  if (comma == std::string::npos) fail(ErrorKind::invalid_config, "su distribution needs 'tau,kappa': " + raw);
  try {
    std::size_t used = 0;
    const double tau = std::stod(body.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument("tau");
    const std::string ks = body.substr(comma + 1);
    const double kappa = std::stod(ks, &used);
    if (used != ks.size()) throw std::invalid_argument("kappa");
    return johnson_su(tau, kappa);
  } catch (const std::logic_error&) {
    fail(ErrorKind::invalid_config, "cannot read su parameters from '" + raw + "'");
  }
}

std::string InnovationSpec::label() const {
  if (kind == Kind::gaussian) return "gaussian";
  char buf[64];
  std::snprintf(buf, sizeof buf, "su(%g,%g)", skewness, kurtosis);
  return buf;
}

std::vector<double> sample_innovation(const InnovationSpec& spec, std::size_t k, RngStream& rng) {
  std::vector<double> e(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double sd = std::pow(2.0, -0.5 * static_cast<double>(i + 1));
    const double z = rng.normal();
    e[i] = sd * (spec.kind == InnovationSpec::Kind::gaussian ? z : spec.standardized.transform(z));
  }
  return e;
}

FunctionalGridSample simulate_sar(const Dims& dims, const SarOperators& ops, const InnovationSpec& innovation,
                                  std::size_t burnin, std::uint64_t seed) {
  if (dims.size() != 2) fail(ErrorKind::invalid_config, "the autoregressive simulation needs a 2-d grid");
  validate_dims(dims);
  const std::size_t k = ops.a.rows();
  if (ops.a.cols() != k || ops.b.rows() != k || ops.b.cols() != k)
    fail(ErrorKind::invalid_config, "operators must be square of equal size");
  if (operator_norm(ops.a) + operator_norm(ops.b) >= 1.0)
    log::warn("||A|| + ||B|| >= 1: the recursion may not be stationary");

  const std::size_t rows = dims[0] + burnin, cols = dims[1] + burnin;
  RealMatrix full(rows * cols, k);
  RngStream rng(seed);
  std::vector<double> tmp(k);
  for (std::size_t s = 0; s < rows; ++s)
    for (std::size_t t = 0; t < cols; ++t) {
      const auto eps = sample_innovation(innovation, k, rng);
      auto x = full.row(s * cols + t);
      std::copy(eps.begin(), eps.end(), x.begin());
      if (s > 0) {
        const auto up = full.row((s - 1) * cols + t);
        for (std::size_t i = 0; i < k; ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j < k; ++j) acc += ops.a(i, j) * up[j];
          x[i] += acc;
        }
      }
      if (t > 0) {
        const auto left = full.row(s * cols + t - 1);
        for (std::size_t i = 0; i < k; ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j < k; ++j) acc += ops.b(i, j) * left[j];
          x[i] += acc;
        }
      }
    }
  RealMatrix out(dims[0] * dims[1], k);
  for (std::size_t s = 0; s < dims[0]; ++s)
    for (std::size_t t = 0; t < dims[1]; ++t) {
      const auto src = full.row((s + burnin) * cols + t + burnin);
      std::copy(src.begin(), src.end(), out.row(s * dims[1] + t).begin());
    }
  return FunctionalGridSample(dims, std::move(out), BasisSpec::fourier(k));
}

// ---- Monte Carlo study -----------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

Dims parse_grid(const std::string& text) {
  Dims d;
  for (const auto& part : split(text, 'x')) d.push_back(static_cast<std::size_t>(std::stoul(part)));
  validate_dims(d);
  return d;
}

std::string grid_label(const Dims& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "x" : "") + std::to_string(dims[i]);
  return s;
}

}  // namespace

McStudyConfig parse_mc_config(const std::string& text) {
  McStudyConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value", lineno, 0);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "grids") {
        cfg.grids.clear();
        for (const auto& g : split(value, ';')) cfg.grids.push_back(parse_grid(g));
      } else if (key == "distributions") {
        cfg.distributions.clear();
        for (const auto& d : split(value, ';')) cfg.distributions.push_back(InnovationSpec::parse(d));
      } else if (key == "p") {
        cfg.levels.clear();
        for (const auto& p : split(value, ',')) cfg.levels.push_back(static_cast<std::size_t>(std::stoul(p)));
      } else if (key == "replications") {
        cfg.replications = static_cast<std::size_t>(std::stoul(value));
      } else if (key == "alpha") {
        cfg.alpha = std::stod(value);
      } else if (key == "seed") {
        cfg.seed = std::stoull(value);
      } else if (key == "k") {
        cfg.basis_dimension = static_cast<std::size_t>(std::stoul(value));
      } else if (key == "burnin") {
        cfg.burnin = static_cast<std::size_t>(std::stoul(value));
      } else if (key == "weight-threshold") {
        cfg.weight_threshold = std::stod(value);
      } else if (key == "weight") {
        if (value == "bartlett") cfg.weight_kind = WeightKind::bartlett;
        else if (value == "bartlett-product") cfg.weight_kind = WeightKind::bartlett_product;
        else throw std::invalid_argument("weight");
      } else if (key == "q") {
        cfg.q = std::stod(value);
      } else if (key == "l") {
        cfg.truncation = std::stol(value);
      } else if (key == "l-prime") {
        cfg.score_max_lag = std::stol(value);
      } else if (key == "operators") {
        if (value == "per-replication") cfg.operators_per_replication = true;
        else if (value == "fixed") cfg.operators_per_replication = false;
        else throw std::invalid_argument("operators");
      } else {
        throw ParseError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'", lineno, 0);
      }
    } catch (const std::logic_error&) {
      throw ParseError("config line " + std::to_string(lineno) + ": bad value for '" + key + "'", lineno, 0);
    }
  }
  if (cfg.replications < 1) fail(ErrorKind::invalid_config, "replications must be at least 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) fail(ErrorKind::invalid_config, "alpha must lie in (0,1)");
  if (cfg.levels.empty() || cfg.grids.empty() || cfg.distributions.empty())
    fail(ErrorKind::invalid_config, "grids, distributions and p must be non-empty");
  return cfg;
}

McStudyConfig load_mc_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mc_config(ss.str());
}

const McCell& McStudyTable::cell(const Dims& dims, const std::string& distribution, std::size_t p) const {
  for (const auto& c : cells)
    if (c.dims == dims && c.distribution == distribution && c.levels == p) return c;
  fail(ErrorKind::invalid_input, "no study cell for " + grid_label(dims) + " " + distribution + " p=" + std::to_string(p));
}

McStudyTable run_mc_study(const McStudyConfig& config) {
  if (config.replications < 1) fail(ErrorKind::invalid_config, "replications must be at least 1");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) fail(ErrorKind::invalid_config, "alpha must lie in (0,1)");
  if (config.levels.empty()) fail(ErrorKind::invalid_config, "at least one p is required");
  const std::size_t pmax = *std::max_element(config.levels.begin(), config.levels.end());
  if (pmax == 0 || pmax > config.basis_dimension) fail(ErrorKind::invalid_config, "p must lie in [1, K]");
  for (const auto& g : config.grids)
    if (g.size() != 2) fail(ErrorKind::invalid_config, "study grids must be two-dimensional");

  const SarOperators fixed_ops = generate_operators(derive_seed(config.seed, 0xa11ce), config.basis_dimension);
  const std::size_t ng = config.grids.size(), nd = config.distributions.size(), nr = config.replications;

  struct Outcome {
    bool ok = false;
    std::vector<double> stat;
    std::vector<double> pval;
  };
  std::vector<Outcome> outcomes(ng * nd * nr);
  parallel_for(outcomes.size(), [&](std::size_t task) {
    const std::size_t r = task % nr;
    const std::size_t j = (task / nr) % nd;
    const std::size_t g = task / (nr * nd);
    Outcome& out = outcomes[task];
    try {
      const SarOperators ops =
          config.operators_per_replication
              ? generate_operators(derive_seed(config.seed, 0xa11ce, r + 1), config.basis_dimension)
              : fixed_ops;
      const auto sample = simulate_sar(config.grids[g], ops, config.distributions[j], config.burnin,
                                       derive_seed(config.seed, g + 1, j + 1, r + 1));
      TestOptions opts;
      opts.levels = pmax;
      opts.weight_threshold = config.weight_threshold;
      opts.weight_kind = config.weight_kind;
      if (config.q) opts.q = std::vector<double>(2, *config.q);
      opts.truncation = config.truncation;
      opts.score_max_lag = config.score_max_lag;
      const PipelineStages stages = run_pipeline_stages(sample, opts);
      for (std::size_t p : config.levels) {
        const NormalityTestReport rep = report_for_levels(stages, p);
        out.stat.push_back(rep.statistic);
        out.pval.push_back(rep.p_value);
      }
      out.ok = true;
    } catch (const Error& e) {
      log::warn("replication " + std::to_string(r + 1) + " failed: " + e.what());
    }
  });

  McStudyTable table;
  table.alpha = config.alpha;
  table.replications = nr;
  table.seed = config.seed;
  for (std::size_t g = 0; g < ng; ++g)
    for (std::size_t j = 0; j < nd; ++j)
      for (std::size_t pi = 0; pi < config.levels.size(); ++pi) {
        McCell cell;
        cell.dims = config.grids[g];
        cell.distribution = config.distributions[j].label();
        cell.levels = config.levels[pi];
        for (std::size_t r = 0; r < nr; ++r) {
          const Outcome& o = outcomes[(g * nd + j) * nr + r];
          if (!o.ok) {
            ++cell.failures;
            continue;
          }
          ++cell.completed;
          if (o.pval[pi] < config.alpha) ++cell.rejections;
          if (config.keep_statistics) cell.statistics.push_back(o.stat[pi]);
        }
        if (cell.completed > 0) {
          cell.rate = static_cast<double>(cell.rejections) / static_cast<double>(cell.completed);
          cell.standard_error = std::sqrt(cell.rate * (1.0 - cell.rate) / static_cast<double>(cell.completed));
        }
        table.cells.push_back(std::move(cell));
      }
  return table;
}

std::string format_mc_csv(const McStudyTable& table) {
  std::vector<Dims> grids;
  std::vector<std::string> dists;
  std::vector<std::size_t> levels;
  for (const auto& c : table.cells) {
    if (std::find(grids.begin(), grids.end(), c.dims) == grids.end()) grids.push_back(c.dims);
    if (std::find(dists.begin(), dists.end(), c.distribution) == dists.end()) dists.push_back(c.distribution);
    if (std::find(levels.begin(), levels.end(), c.levels) == levels.end()) levels.push_back(c.levels);
  }
  std::ostringstream os;
  os << "# alpha=" << table.alpha << " replications=" << table.replications << " seed=" << table.seed << '\n';
  os << "distribution";
  for (const auto& g : grids)
    for (std::size_t p : levels) os << ',' << grid_label(g) << "_p" << p << ',' << grid_label(g) << "_p" << p << "_se";
  os << ",failures\n";
  char buf[32];
  for (const auto& d : dists) {
    os << d;
    std::size_t failures = 0;
    for (const auto& g : grids)
      for (std::size_t p : levels) {
        const McCell& c = table.cell(g, d, p);
        std::snprintf(buf, sizeof buf, "%.4f", c.rate);
        os << ',' << buf;
        std::snprintf(buf, sizeof buf, "%.4f", c.standard_error);
        os << ',' << buf;
        if (p == levels.front()) failures += c.failures;
      }
    os << ',' << failures << '\n';
  }
  return os.str();
}

}  // namespace sfield
