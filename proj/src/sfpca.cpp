#include "sfield/sfpca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sfield/error.hpp"
#include "sfield/log.hpp"
#include "sfield/parallel.hpp"

namespace sfield {
namespace {

void fix_phase(ComplexMatrix& v, std::size_t col) {
  std::size_t best = 0;
  double best_mod = -1.0;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    const double m = std::abs(v(i, col));
    if (m > best_mod) {
      best_mod = m;
      best = i;
    }
  }
  if (best_mod <= 0.0) return;
  const cplx unit = std::conj(v(best, col)) / best_mod;
  for (std::size_t i = 0; i < v.rows(); ++i) v(i, col) *= unit;
  v(best, col) = best_mod;
}

std::size_t box_count(std::size_t d, long l) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < d; ++i) n *= static_cast<std::size_t>(2 * l + 1);
  return n;
}

// out[o][l][i] = (1/T) sum_k in[o][k][i] e^{-i l theta_k}, applied to one axis.
std::vector<cplx> axis_transform(const std::vector<cplx>& in, std::vector<std::size_t>& shape,
                                 std::size_t axis, long lmax, const PhaseTable& phase, long half) {
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
  const std::size_t t = shape[axis];
  const std::size_t nl = static_cast<std::size_t>(2 * lmax + 1);
  std::vector<cplx> out(outer * nl * inner);
  std::vector<cplx> kernel(nl * t);
  for (std::size_t li = 0; li < nl; ++li)
    for (std::size_t k = 0; k < t; ++k) {
      const long l = static_cast<long>(li) - lmax;
      kernel[li * t + k] = phase(l * (static_cast<long>(k) - half)) / static_cast<double>(t);
    }
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t li = 0; li < nl; ++li) {
      cplx* dst = &out[(o * nl + li) * inner];
      for (std::size_t k = 0; k < t; ++k) {
        const cplx e = kernel[li * t + k];
        const cplx* src = &in[(o * t + k) * inner];
        for (std::size_t i = 0; i < inner; ++i) dst[i] += e * src[i];
      }
    }
  shape[axis] = nl;
  return out;
}

// Fourier coefficients of one level's eigenvector field on the lag box [-L, L]^d.
std::vector<cplx> level_coefficients(const EigenField& eig, std::size_t level, long lmax) {
  const std::size_t d = eig.grid.d();
  const std::size_t k = eig.dimension;
  std::vector<cplx> data(eig.grid.size() * k);
  for (std::size_t node = 0; node < eig.grid.size(); ++node)
    for (std::size_t j = 0; j < k; ++j) data[node * k + j] = eig.vectors[node](j, level);
  std::vector<std::size_t> shape(d, eig.grid.points_per_dim());
  shape.push_back(k);
  const PhaseTable phase(eig.grid.points_per_dim());
  for (std::size_t axis = 0; axis < d; ++axis)
    data = axis_transform(data, shape, axis, lmax, phase, eig.grid.half_width());
  return data;
}

}  // namespace

EigenField eigendecompose_field(const SpectralDensityField& spec, std::size_t p) {
  const std::size_t k = spec.dimension();
  if (p == 0 || p > k) fail(ErrorKind::invalid_config, "number of levels p must be in [1, K]");
  const FrequencyGrid& grid = spec.grid;
  EigenField out{grid, p, k, std::vector<std::vector<double>>(grid.size()),
                 std::vector<ComplexMatrix>(grid.size()), std::vector<double>(grid.size()), 0};
  const std::size_t center = (grid.size() - 1) / 2;
  std::vector<char> gap(grid.size(), 0);
  parallel_for(grid.size() - center, [&](std::size_t j) {
    const std::size_t node = center + j;
    const std::size_t mirror = grid.mirror(node);
    EigenSystem es = hermitian_eigen(spec.matrices[node]);
    ComplexMatrix v(k, p);
    for (std::size_t m = 0; m < p; ++m) {
      for (std::size_t i = 0; i < k; ++i) v(i, m) = es.vectors(i, m);
      fix_phase(v, m);
      if (mirror == node) {
        // real symmetric at theta = 0: drop rounding residue in the imaginary part
        double norm = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
          v(i, m) = v(i, m).real();
          norm += std::norm(v(i, m));
        }
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < k; ++i) v(i, m) /= norm;
      }
    }
    double top = 0.0;
    for (double x : es.values) top = std::max(top, std::abs(x));
    for (std::size_t m = 0; m < std::min(p, k - 1); ++m)
      if (es.values[m] - es.values[m + 1] < 1e-12 * std::max(top, 1e-300)) gap[node] = 1;
    out.traces[node] = spec.matrices[node].trace();
    out.values[node] = es.values;
    out.vectors[node] = v;
    if (mirror != node) {
      ComplexMatrix w(k, p);
      for (std::size_t a = 0; a < k * p; ++a) w.data()[a] = std::conj(v.data()[a]);
      out.vectors[mirror] = std::move(w);
      out.values[mirror] = es.values;
      out.traces[mirror] = spec.matrices[mirror].trace();
      gap[mirror] = gap[node];
    }
  });
  out.gap_warnings = static_cast<std::size_t>(std::count(gap.begin(), gap.end(), 1));
  if (out.gap_warnings > 0)
    log::warn("spectral gap below 1e-12 at " + std::to_string(out.gap_warnings) +
              " frequency node(s); eigenvectors there are not unique");
  return out;
}

std::vector<double> variance_explained(const EigenField& eig, std::size_t p) {
  if (p > eig.dimension) fail(ErrorKind::invalid_config, "p exceeds the basis dimension");
  double total = 0.0;
  for (double t : eig.traces) total += t;
  std::vector<double> v(p, 0.0);
  for (std::size_t m = 0; m < p; ++m) {
    double s = 0.0;
    for (const auto& vals : eig.values) s += vals[m];
    v[m] = total > 0.0 ? s / total : 0.0;
  }
  return v;
}

std::vector<double> variance_explained(const SpectralDensityField& spec, std::size_t p) {
  return variance_explained(eigendecompose_field(spec, std::max<std::size_t>(p, 1)), p);
}

Selection select_p(std::span<const double> proportions, double threshold) {
  if (proportions.empty()) fail(ErrorKind::invalid_input, "no variance proportions given");
  double cum = 0.0;
  for (std::size_t m = 0; m < proportions.size(); ++m) {
    cum += proportions[m];
    if (cum >= threshold) return {m + 1, true, cum};
  }
  log::warn("variance threshold " + std::to_string(threshold) + " not reached; using all " +
            std::to_string(proportions.size()) + " levels");
  return {proportions.size(), false, cum};
}

SfpcFilterBank::SfpcFilterBank(std::size_t d, std::size_t dimension, long truncation,
                               std::vector<RealMatrix> filters, double max_imaginary)
    : d_(d), k_(dimension), l_(truncation), filters_(std::move(filters)), max_imag_(max_imaginary) {
  if (truncation < 0) fail(ErrorKind::invalid_config, "truncation lag must be nonnegative");
  for (const auto& f : filters_) {
    if (f.rows() != box_count(d_, l_) || f.cols() != k_)
      fail(ErrorKind::invalid_input, "filter matrix shape does not match lag box");
    for (double x : f.data())
      if (!std::isfinite(x)) fail(ErrorKind::numerical, "non-finite filter coefficient");
  }
}

std::size_t SfpcFilterBank::lag_count() const noexcept { return box_count(d_, l_); }

std::vector<long> SfpcFilterBank::lag(std::size_t index) const {
  const std::size_t w = static_cast<std::size_t>(2 * l_ + 1);
  std::vector<long> out(d_);
  for (std::size_t i = d_; i-- > 0;) {
    out[i] = static_cast<long>(index % w) - l_;
    index /= w;
  }
  return out;
}

std::size_t SfpcFilterBank::lag_index(std::span<const long> l) const {
  if (l.size() != d_) fail(ErrorKind::invalid_input, "lag dimension differs from filter bank");
  std::size_t idx = 0;
  for (long v : l) {
    if (std::abs(v) > l_) fail(ErrorKind::invalid_input, "lag outside the filter support");
    idx = idx * static_cast<std::size_t>(2 * l_ + 1) + static_cast<std::size_t>(v + l_);
  }
  return idx;
}

std::span<const double> SfpcFilterBank::filter(std::size_t level, std::size_t lag_index) const {
  return filters_.at(level).row(lag_index);
}

double SfpcFilterBank::captured_weight(std::size_t level) const {
  double s = 0.0;
  for (double x : filters_.at(level).data()) s += x * x;
  return s;
}

SfpcFilterBank SfpcFilterBank::scaled(double c) const {
  auto f = filters_;
  for (auto& m : f)
    for (double& x : m.data()) x *= c;
  return SfpcFilterBank(d_, k_, l_, std::move(f), max_imag_ * std::abs(c));
}

SfpcFilterBank SfpcFilterBank::with_level_sign(std::size_t level, double sign) const {
  auto f = filters_;
  for (double& x : f.at(level).data()) x *= sign;
  return SfpcFilterBank(d_, k_, l_, std::move(f), max_imag_);
}

SfpcFilterBank SfpcFilterBank::with_levels(std::size_t p) const {
  if (p == 0 || p > filters_.size()) fail(ErrorKind::invalid_config, "requested more levels than the bank holds");
  return SfpcFilterBank(d_, k_, l_, std::vector<RealMatrix>(filters_.begin(), filters_.begin() + p), max_imag_);
}

SfpcFilterBank SfpcFilterBank::truncated(long new_l) const {
  if (new_l < 0 || new_l > l_) fail(ErrorKind::invalid_config, "truncation must lie in [0, L]");
  std::vector<RealMatrix> f;
  const std::size_t count = box_count(d_, new_l);
  for (const auto& m : filters_) {
    RealMatrix t(count, k_);
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<long> l(d_);
      std::size_t rem = i;
      for (std::size_t a = d_; a-- > 0;) {
        l[a] = static_cast<long>(rem % static_cast<std::size_t>(2 * new_l + 1)) - new_l;
        rem /= static_cast<std::size_t>(2 * new_l + 1);
      }
      const auto src = m.row(lag_index(l));
      std::copy(src.begin(), src.end(), t.row(i).begin());
    }
    f.push_back(std::move(t));
  }
  return SfpcFilterBank(d_, k_, new_l, std::move(f), max_imag_);
}

SfpcFilterBank compute_filters(const EigenField& eig, long truncation, std::size_t levels) {
  if (levels == 0) levels = eig.levels;
  if (levels > eig.levels) fail(ErrorKind::invalid_config, "requested more filter levels than eigenvectors");
  if (truncation < 0) fail(ErrorKind::invalid_config, "truncation lag must be nonnegative");
  if (truncation > eig.grid.half_width())
    fail(ErrorKind::invalid_config, "truncation lag L = " + std::to_string(truncation) +
                                        " aliases on a frequency grid with T = " +
                                        std::to_string(eig.grid.points_per_dim()));
  const std::size_t d = eig.grid.d();
  const std::size_t k = eig.dimension;
  std::vector<RealMatrix> filters(levels);
  std::vector<double> imag(levels, 0.0);
  parallel_for(levels, [&](std::size_t m) {
    const auto c = level_coefficients(eig, m, truncation);
    RealMatrix f(box_count(d, truncation), k);
    for (std::size_t a = 0; a < c.size(); ++a) {
      f.data()[a] = c[a].real();
      imag[m] = std::max(imag[m], std::abs(c[a].imag()));
    }
    filters[m] = std::move(f);
  });
  const double max_imag = *std::max_element(imag.begin(), imag.end());
  if (max_imag > 1e-8) log::warn("filter coefficients carry an imaginary residue of " + std::to_string(max_imag));
  return SfpcFilterBank(d, k, truncation, std::move(filters), max_imag);
}

Selection select_L(const EigenField& eig, double threshold, long max_lag) {
  const long cap = max_lag < 0 ? eig.grid.half_width() : std::min(max_lag, eig.grid.half_width());
  const std::size_t d = eig.grid.d();
  const std::size_t k = eig.dimension;
  const auto c = level_coefficients(eig, 0, cap);
  // Weight on each sup-norm shell.
  std::vector<double> shell(static_cast<std::size_t>(cap) + 1, 0.0);
  const std::size_t w = static_cast<std::size_t>(2 * cap + 1);
  for (std::size_t idx = 0; idx < box_count(d, cap); ++idx) {
    std::size_t rem = idx;
    long r = 0;
    for (std::size_t a = 0; a < d; ++a) {
      r = std::max(r, std::abs(static_cast<long>(rem % w) - cap));
      rem /= w;
    }
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += std::norm(c[idx * k + j]);
    shell[static_cast<std::size_t>(r)] += s;
  }
  double cum = 0.0;
  for (long l = 0; l <= cap; ++l) {
    cum += shell[static_cast<std::size_t>(l)];
    if (cum >= threshold) return {static_cast<std::size_t>(l), true, cum};
  }
  log::warn("filter weight threshold " + std::to_string(threshold) + " not reached by lag " +
            std::to_string(cap) + " (captured " + std::to_string(cum) + ")");
  return {static_cast<std::size_t>(cap), false, cum};
}

ScoreField ScoreField::first_levels(std::size_t p) const {
  if (p == 0 || p > levels()) fail(ErrorKind::invalid_config, "requested more score levels than available");
  RealMatrix s(p, size());
  for (std::size_t m = 0; m < p; ++m) std::copy(scores.row(m).begin(), scores.row(m).end(), s.row(m).begin());
  return ScoreField{dims, std::move(s), valid_mask};
}

ScoreField compute_scores(const FunctionalGridSample& sample, const SfpcFilterBank& bank, bool strict_boundary) {
  if (bank.dimension() != sample.dimension())
    fail(ErrorKind::invalid_input, "filter bank and sample differ in basis dimension");
  const Dims& dims = sample.dims();
  if (bank.d() != dims.size()) fail(ErrorKind::invalid_input, "filter bank and sample differ in grid dimension");
  const std::size_t n = sample.size();
  const std::size_t k = sample.dimension();
  const std::size_t p = bank.levels();
  const RealMatrix& x = sample.orthonormal_coeffs();
  RealMatrix y(p, n);

  // Padded 3-d view keeps the inner loops free of coordinate decoding.
  const std::size_t d = dims.size();
  long ext[3] = {1, 1, 1};
  for (std::size_t i = 0; i < d; ++i) ext[3 - d + i] = static_cast<long>(dims[i]);

  parallel_for(p, [&](std::size_t m) {
    auto ym = y.row(m);
    for (std::size_t li = 0; li < bank.lag_count(); ++li) {
      const auto l = bank.lag(li);
      long lag3[3] = {0, 0, 0};
      for (std::size_t i = 0; i < d; ++i) lag3[3 - d + i] = l[i];
      const long offset = (lag3[0] * ext[1] + lag3[1]) * ext[2] + lag3[2];
      long lo[3], hi[3];
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::max(0L, lag3[a]);
        hi[a] = std::min(ext[a], ext[a] + lag3[a]);
      }
      const auto phi = bank.filter(m, li);
      for (long a = lo[0]; a < hi[0]; ++a)
        for (long b = lo[1]; b < hi[1]; ++b)
          for (long c = lo[2]; c < hi[2]; ++c) {
            const long s = (a * ext[1] + b) * ext[2] + c;
            const auto xs = x.row(static_cast<std::size_t>(s - offset));
            double acc = 0.0;
            for (std::size_t j = 0; j < k; ++j) acc += xs[j] * phi[j];
            ym[static_cast<std::size_t>(s)] += acc;
          }
    }
  });

  std::vector<char> mask(n, 1);
  if (strict_boundary) {
    const long l = bank.truncation();
    for (std::size_t s = 0; s < n; ++s) {
      const auto c = grid_coord(dims, s);
      for (std::size_t i = 0; i < d; ++i)
        if (c[i] < l || c[i] >= static_cast<long>(dims[i]) - l) mask[s] = 0;
    }
  }
  return ScoreField{dims, std::move(y), std::move(mask)};
}

ScoreField crop_to_valid(const ScoreField& scores) {
  const Dims& dims = scores.dims;
  const std::size_t d = dims.size();
  std::vector<long> lo(d, -1), hi(d, -1);
  for (std::size_t s = 0; s < scores.size(); ++s) {
    if (!scores.valid_mask[s]) continue;
    const auto c = grid_coord(dims, s);
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = lo[i] < 0 ? c[i] : std::min(lo[i], c[i]);
      hi[i] = std::max(hi[i], c[i]);
    }
  }
  if (lo[0] < 0) fail(ErrorKind::invalid_config, "strict boundary handling leaves no valid locations");
  Dims inner(d);
  for (std::size_t i = 0; i < d; ++i) inner[i] = static_cast<std::size_t>(hi[i] - lo[i] + 1);
  const std::size_t n = grid_size(inner);
  RealMatrix out(scores.levels(), n);
  for (std::size_t t = 0; t < n; ++t) {
    auto c = grid_coord(inner, t);
    for (std::size_t i = 0; i < d; ++i) c[i] += lo[i];
    const std::size_t s = flat_index(dims, c);
    if (!scores.valid_mask[s]) fail(ErrorKind::invalid_input, "valid locations do not form a rectangle");
    for (std::size_t m = 0; m < scores.levels(); ++m) out(m, t) = scores.scores(m, s);
  }
  return ScoreField{inner, std::move(out), std::vector<char>(n, 1)};
}

ScoreField ordinary_fpca_scores(const FunctionalGridSample& sample, std::size_t p) {
  const std::size_t k = sample.dimension();
  if (p == 0 || p > k) fail(ErrorKind::invalid_config, "number of levels p must be in [1, K]");
  const RealMatrix c0 = autocovariance(sample, Lag(sample.dims().size(), 0)).matrix;
  EigenSystem es = hermitian_eigen(HermitianMatrix(c0));
  for (std::size_t m = 0; m < p; ++m) fix_phase(es.vectors, m);
  const RealMatrix& x = sample.orthonormal_coeffs();
  RealMatrix y(p, sample.size());
  for (std::size_t s = 0; s < sample.size(); ++s)
    for (std::size_t m = 0; m < p; ++m) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) acc += x(s, j) * es.vectors(j, m).real();
      y(m, s) = acc;
    }
  return ScoreField{sample.dims(), std::move(y), std::vector<char>(sample.size(), 1)};
}

}  // namespace sfield
