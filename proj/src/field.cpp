#include "sfield/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sfield/error.hpp"

namespace sfield {
namespace {

// Cox-de Boor on a clamped knot vector; returns all basis values at u.
std::vector<double> bspline_values(const std::vector<double>& knots, std::size_t k,
                                   std::size_t order, double u) {
  const std::size_t nk = knots.size();
  std::vector<double> b(nk - 1, 0.0);
  u = std::clamp(u, 0.0, 1.0);
  if (u >= 1.0) {
    b[nk - order - 1] = 1.0;  // last non-degenerate interval of the clamped vector
  } else {
    for (std::size_t i = 0; i + 1 < nk; ++i)
      if (knots[i] <= u && u < knots[i + 1]) b[i] = 1.0;
  }
  for (std::size_t r = 2; r <= order; ++r) {
    for (std::size_t i = 0; i + r < nk; ++i) {
      double v = 0.0;
      const double d1 = knots[i + r - 1] - knots[i];
      const double d2 = knots[i + r] - knots[i + 1];
      if (d1 > 0.0) v += (u - knots[i]) / d1 * b[i];
      if (d2 > 0.0) v += (knots[i + r] - u) / d2 * b[i + 1];
      b[i] = v;
    }
  }
  b.resize(k);
  return b;
}

// 8-point Gauss-Legendre on [-1,1].
constexpr double kGlNodes[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeights[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                  0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                  0.2223810344533745, 0.1012285362903763};

}  // namespace

BasisSpec::BasisSpec(BasisKind kind, std::size_t k) : kind_(kind), k_(k) {
  if (k == 0) fail(ErrorKind::invalid_config, "basis dimension must be positive");
  if (kind == BasisKind::fourier) {
    gram_ = RealMatrix::identity(k);
    gram_sqrt_ = RealMatrix::identity(k);
    return;
  }
  const std::size_t order = std::min<std::size_t>(4, k);
  const std::size_t interior = k - order;
  knots_.assign(order, 0.0);
  for (std::size_t i = 1; i <= interior; ++i)
    knots_.push_back(static_cast<double>(i) / static_cast<double>(interior + 1));
  knots_.insert(knots_.end(), order, 1.0);

  // Piecewise polynomial of degree <= 6 per knot interval: Gauss-Legendre is exact.
  gram_ = RealMatrix(k, k);
  for (std::size_t seg = 0; seg <= interior; ++seg) {
    const double a = static_cast<double>(seg) / (interior + 1);
    const double b = static_cast<double>(seg + 1) / (interior + 1);
    for (int g = 0; g < 8; ++g) {
      const double u = 0.5 * (a + b) + 0.5 * (b - a) * kGlNodes[g];
      const double w = 0.5 * (b - a) * kGlWeights[g];
      const auto v = bspline_values(knots_, k, order, u);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) gram_(i, j) += w * v[i] * v[j];
    }
  }
  gram_sqrt_ = spd_sqrt(gram_);
}

BasisSpec BasisSpec::fourier(std::size_t k) { return BasisSpec(BasisKind::fourier, k); }
BasisSpec BasisSpec::bspline(std::size_t k) { return BasisSpec(BasisKind::bspline, k); }

std::vector<double> BasisSpec::evaluate(double u) const {
  if (kind_ == BasisKind::bspline) return bspline_values(knots_, k_, std::min<std::size_t>(4, k_), u);
  std::vector<double> v(k_);
  v[0] = 1.0;
  for (std::size_t i = 1; i < k_; ++i) {
    const double freq = 2.0 * std::numbers::pi * static_cast<double>((i + 1) / 2);
    v[i] = std::numbers::sqrt2 * (i % 2 == 1 ? std::sin(freq * u) : std::cos(freq * u));
  }
  return v;
}

void validate_dims(const Dims& dims) {
  if (dims.empty() || dims.size() > 3)
    fail(ErrorKind::invalid_config, "grid dimension d must be 1, 2 or 3");
  for (std::size_t n : dims)
    if (n == 0) fail(ErrorKind::invalid_config, "grid extents must be positive");
}

std::size_t grid_size(const Dims& dims) {
  std::size_t n = 1;
  for (std::size_t e : dims) n *= e;
  return n;
}

std::size_t flat_index(const Dims& dims, std::span<const long> coord) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) idx = idx * dims[i] + static_cast<std::size_t>(coord[i]);
  return idx;
}

std::vector<long> grid_coord(const Dims& dims, std::size_t index) {
  std::vector<long> c(dims.size());
  for (std::size_t i = dims.size(); i-- > 0;) {
    c[i] = static_cast<long>(index % dims[i]);
    index /= dims[i];
  }
  return c;
}

FunctionalGridSample::FunctionalGridSample(Dims dims, RealMatrix coeffs, BasisSpec basis)
    : dims_(std::move(dims)),
      coeffs_(std::move(coeffs)),
      basis_(std::make_shared<const BasisSpec>(std::move(basis))) {
  validate_dims(dims_);
  if (coeffs_.rows() != grid_size(dims_))
    fail(ErrorKind::invalid_input, "coefficient rows (" + std::to_string(coeffs_.rows()) +
                                       ") differ from grid size (" + std::to_string(grid_size(dims_)) + ")");
  if (coeffs_.cols() != basis_->dimension())
    fail(ErrorKind::invalid_input, "coefficient columns differ from basis dimension");
  for (double v : coeffs_.data())
    if (!std::isfinite(v)) fail(ErrorKind::invalid_input, "non-finite coefficient in sample");
  if (basis_->orthonormal()) {
    ortho_ = coeffs_;
  } else {
    ortho_ = multiply(coeffs_, basis_->gram_sqrt());  // gram_sqrt is symmetric
  }
}

FunctionalGridSample center(const FunctionalGridSample& sample) {
  const RealMatrix& x = sample.coeffs();
  const std::size_t n = x.rows(), k = x.cols();
  std::vector<double> mean(k, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t j = 0; j < k; ++j) mean[j] += x(s, j);
  for (double& m : mean) m /= static_cast<double>(n);
  RealMatrix out(n, k);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t j = 0; j < k; ++j) out(s, j) = x(s, j) - mean[j];
  return FunctionalGridSample(sample.dims(), std::move(out), sample.basis());
}

std::size_t lag_set_size(const Dims& dims, const Lag& h) {
  if (h.size() != dims.size()) fail(ErrorKind::invalid_input, "lag dimension differs from grid dimension");
  std::size_t c = 1;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const long n = static_cast<long>(dims[i]);
    c *= static_cast<std::size_t>(std::max(n - std::abs(h[i]), 0L));
  }
  return c;
}

std::vector<std::size_t> lag_sets(const Dims& dims, const Lag& h) {
  std::vector<std::size_t> out;
  if (lag_set_size(dims, h) == 0) return out;
  out.reserve(lag_set_size(dims, h));
  const std::size_t n = grid_size(dims);
  for (std::size_t s = 0; s < n; ++s) {
    const auto c = grid_coord(dims, s);
    bool inside = true;
    for (std::size_t i = 0; i < dims.size() && inside; ++i) {
      const long t = c[i] + h[i];
      inside = t >= 0 && t < static_cast<long>(dims[i]);
    }
    if (inside) out.push_back(s);
  }
  return out;
}

LagCovariance autocovariance(const FunctionalGridSample& sample, const Lag& h) {
  const Dims& dims = sample.dims();
  const std::size_t k = sample.dimension();
  LagCovariance out{h, RealMatrix(k, k)};
  if (lag_set_size(dims, h) == 0) return out;

  const RealMatrix& x = sample.orthonormal_coeffs();
  // Linear offset of s+h relative to s, valid for every s in M_h.
  long offset = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) offset = offset * static_cast<long>(dims[i]) + h[i];

  // Iterate the overlap box directly instead of filtering the whole grid.
  const std::size_t d = dims.size();
  std::vector<long> lo(3, 0), hi(3, 1), ext(3, 1);
  for (std::size_t i = 0; i < d; ++i) {
    const long n = static_cast<long>(dims[i]);
    lo[3 - d + i] = std::max(0L, -h[i]);
    hi[3 - d + i] = std::min(n, n - h[i]);
    ext[3 - d + i] = n;
  }
  RealMatrix& c = out.matrix;
  for (long a = lo[0]; a < hi[0]; ++a)
    for (long b = lo[1]; b < hi[1]; ++b)
      for (long e = lo[2]; e < hi[2]; ++e) {
        const std::size_t s = static_cast<std::size_t>((a * ext[1] + b) * ext[2] + e);
        const auto xs = x.row(s);
        const auto xt = x.row(static_cast<std::size_t>(static_cast<long>(s) + offset));
        for (std::size_t i = 0; i < k; ++i) {
          const double xi = xt[i];
          auto ci = c.row(i);
          for (std::size_t j = 0; j < k; ++j) ci[j] += xi * xs[j];
        }
      }
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  for (double& v : c.data()) v *= inv_n;
  return out;
}

}  // namespace sfield
