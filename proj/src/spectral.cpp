#include "sfield/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sfield/error.hpp"
#include "sfield/parallel.hpp"

namespace sfield {

double bartlett_weight(std::span<const long> z, std::span<const double> q, WeightKind kind) {
  if (z.size() != q.size()) fail(ErrorKind::invalid_input, "lag and window dimension differ");
  if (kind == WeightKind::bartlett_product) {
    double w = 1.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (!(q[i] > 0.0)) fail(ErrorKind::invalid_config, "window sizes must be positive");
      w *= std::max(0.0, 1.0 - std::abs(static_cast<double>(z[i])) / q[i]);
    }
    return w;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(q[i] > 0.0)) fail(ErrorKind::invalid_config, "window sizes must be positive");
    const double r = static_cast<double>(z[i]) / q[i];
    s += r * r;
  }
  return std::max(0.0, 1.0 - std::sqrt(s));
}

std::vector<double> window_rule_of_thumb(const Dims& dims) {
  std::vector<double> q(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) q[i] = std::sqrt(static_cast<double>(dims[i]));
  return q;
}

long bartlett_support(std::span<const double> q) {
  double m = 0.0;
  for (double v : q) m = std::max(m, v);
  return static_cast<long>(std::ceil(m));
}

std::size_t default_grid_points(std::span<const double> q) {
  const std::size_t t = std::max<std::size_t>(41, 2 * static_cast<std::size_t>(bartlett_support(q)) + 1);
  return t % 2 == 1 ? t : t + 1;
}

FrequencyGrid::FrequencyGrid(std::size_t d, std::size_t points_per_dim) : d_(d), t_(points_per_dim) {
  if (d == 0 || d > 3) fail(ErrorKind::invalid_config, "frequency grid dimension must be 1, 2 or 3");
  if (points_per_dim == 0 || points_per_dim % 2 == 0)
    fail(ErrorKind::invalid_config, "frequency grid points per dimension must be odd");
  size_ = 1;
  for (std::size_t i = 0; i < d; ++i) size_ *= t_;
}

std::vector<long> FrequencyGrid::offsets(std::size_t node) const {
  std::vector<long> o(d_);
  for (std::size_t i = d_; i-- > 0;) {
    o[i] = static_cast<long>(node % t_) - half_width();
    node /= t_;
  }
  return o;
}

std::vector<double> FrequencyGrid::theta(std::size_t node) const {
  const auto o = offsets(node);
  std::vector<double> th(d_);
  for (std::size_t i = 0; i < d_; ++i) th[i] = 2.0 * std::numbers::pi * o[i] / static_cast<double>(t_);
  return th;
}

double FrequencyGrid::weight() const noexcept {
  return std::pow(2.0 * std::numbers::pi / static_cast<double>(t_), static_cast<double>(d_));
}

PhaseTable::PhaseTable(std::size_t t) : t_(static_cast<long>(t)), table_(t) {
  for (std::size_t j = 0; j < t; ++j) {
    const double a = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(t);
    table_[j] = {std::cos(a), std::sin(a)};
  }
}

cplx PhaseTable::operator()(long m) const noexcept {
  long r = m % t_;
  if (r < 0) r += t_;
  return table_[static_cast<std::size_t>(r)];
}

namespace {

// Enumerates the lag box |h_i| <= bound_i, keeping lexicographically positive h.
std::vector<Lag> positive_half_lags(const std::vector<long>& bound) {
  const std::size_t d = bound.size();
  std::vector<Lag> out;
  Lag h(d);
  for (std::size_t i = 0; i < d; ++i) h[i] = -bound[i];
  for (;;) {
    // lexicographic sign: first nonzero component positive
    bool positive = false;
    for (long v : h)
      if (v != 0) {
        positive = v > 0;
        break;
      }
    if (positive) out.push_back(h);
    std::size_t i = d;
    while (i-- > 0) {
      if (h[i] < bound[i]) {
        ++h[i];
        break;
      }
      h[i] = -bound[i];
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

}  // namespace

SpectralDensityField estimate_spectral_density(const FunctionalGridSample& sample,
                                               std::span<const double> q, const FrequencyGrid& grid,
                                               WeightKind kind) {
  const Dims& dims = sample.dims();
  const std::size_t d = dims.size();
  const std::size_t k = sample.dimension();
  if (q.size() != d) fail(ErrorKind::invalid_config, "window vector q must have one entry per grid axis");
  if (grid.d() != d) fail(ErrorKind::invalid_config, "frequency grid dimension differs from sample");
  for (std::size_t i = 0; i < d; ++i) {
    if (!(q[i] > 0.0)) fail(ErrorKind::invalid_config, "window sizes must be positive");
    if (!(q[i] < static_cast<double>(dims[i])))
      fail(ErrorKind::invalid_config, "window size q_" + std::to_string(i + 1) + " = " + std::to_string(q[i]) +
                                          " must be smaller than the grid extent " + std::to_string(dims[i]));
  }

  std::vector<long> bound(d);
  for (std::size_t i = 0; i < d; ++i)
    bound[i] = std::min(static_cast<long>(std::ceil(q[i])), static_cast<long>(dims[i]) - 1);

  struct Term {
    Lag h;
    double w;
    RealMatrix sym;   // C_h + C_h^T
    RealMatrix anti;  // C_h - C_h^T
  };
  const Lag zero(d, 0);
  const RealMatrix c0 = autocovariance(sample, zero).matrix;
  std::vector<Lag> lags;
  for (auto& h : positive_half_lags(bound))
    if (bartlett_weight(h, q, kind) > 0.0) lags.push_back(std::move(h));
  std::vector<Term> terms(lags.size());
  parallel_for(lags.size(), [&](std::size_t i) {
    const RealMatrix c = autocovariance(sample, lags[i]).matrix;
    Term t{lags[i], bartlett_weight(lags[i], q, kind), RealMatrix(k, k), RealMatrix(k, k)};
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        t.sym(a, b) = c(a, b) + c(b, a);
        t.anti(a, b) = c(a, b) - c(b, a);
      }
    terms[i] = std::move(t);
  });

  const double pref = std::pow(2.0 * std::numbers::pi, -static_cast<double>(d));
  const double w0 = bartlett_weight(zero, q, kind);
  const PhaseTable phase(grid.points_per_dim());
  std::vector<HermitianMatrix> mats(grid.size());
  const std::size_t center = (grid.size() - 1) / 2;
  // Positive half only; the rest follows from f_{-theta} = conj(f_theta).
  parallel_for(grid.size() - center, [&](std::size_t j) {
    const std::size_t node = center + j;
    const auto off = grid.offsets(node);
    RealMatrix re(k, k), im(k, k);
    for (std::size_t a = 0; a < k * k; ++a) re.data()[a] = w0 * c0.data()[a];
    for (const Term& t : terms) {
      long m = 0;
      for (std::size_t i = 0; i < d; ++i) m += t.h[i] * off[i];
      const cplx e = phase(m);  // e^{-i h^T theta}
      const double wc = t.w * e.real();
      const double ws = t.w * e.imag();  // = -w sin(h^T theta)
      for (std::size_t a = 0; a < k * k; ++a) {
        re.data()[a] += wc * t.sym.data()[a];
        im.data()[a] += ws * t.anti.data()[a];
      }
    }
    ComplexMatrix f(k, k), g(k, k);
    for (std::size_t a = 0; a < k * k; ++a) {
      f.data()[a] = pref * cplx(re.data()[a], im.data()[a]);
      g.data()[a] = std::conj(f.data()[a]);
    }
    mats[node] = HermitianMatrix(f);
    if (grid.mirror(node) != node) mats[grid.mirror(node)] = HermitianMatrix(g);
  });
  return SpectralDensityField{grid, std::vector<double>(q.begin(), q.end()), kind, std::move(mats)};
}

RealMatrix invert_to_lag(const SpectralDensityField& spec, const Lag& h) {
  const FrequencyGrid& grid = spec.grid;
  if (h.size() != grid.d()) fail(ErrorKind::invalid_input, "lag dimension differs from frequency grid");
  for (long v : h)
    if (std::abs(v) > grid.half_width())
      fail(ErrorKind::invalid_config, "lag exceeds half the frequency grid; inverse transform would alias");
  const std::size_t k = spec.dimension();
  const PhaseTable phase(grid.points_per_dim());
  ComplexMatrix acc(k, k);
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const auto off = grid.offsets(node);
    long m = 0;
    for (std::size_t i = 0; i < h.size(); ++i) m += h[i] * off[i];
    const cplx e = std::conj(phase(m));  // e^{+i h^T theta}
    const auto& f = spec.matrices[node].matrix();
    for (std::size_t a = 0; a < k * k; ++a) acc.data()[a] += f.data()[a] * e;
  }
  RealMatrix out(k, k);
  double imag = 0.0, scale = 0.0;
  for (std::size_t a = 0; a < k * k; ++a) {
    out.data()[a] = grid.weight() * acc.data()[a].real();
    imag = std::max(imag, std::abs(grid.weight() * acc.data()[a].imag()));
    scale = std::max(scale, std::abs(out.data()[a]));
  }
  if (imag > 1e-8 * std::max(scale, 1.0))
    fail(ErrorKind::numerical, "inverse transform left a non-negligible imaginary part");
  return out;
}

}  // namespace sfield
