#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "sfield/numcore.hpp"

namespace sfield {

using Dims = std::vector<std::size_t>;  // (n_1, ..., n_d), d in {1,2,3}
using Lag = std::vector<long>;          // integer d-vector

enum class BasisKind { fourier, bspline };

// Basis on [0,1]. Fourier: 1, sqrt2 sin(2 pi u), sqrt2 cos(2 pi u), ...
// B-spline: clamped cubic (order min(4,K)) on equally spaced knots.
// Non-orthonormal bases carry their Gram matrix and its square root; every
// estimator works on gram_sqrt() * coefficients so inner products are exact.
class BasisSpec {
 public:
  static BasisSpec fourier(std::size_t k);
  static BasisSpec bspline(std::size_t k);

  BasisKind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return k_; }
  bool orthonormal() const noexcept { return kind_ == BasisKind::fourier; }

  std::vector<double> evaluate(double u) const;
  const RealMatrix& gram() const noexcept { return gram_; }
  const RealMatrix& gram_sqrt() const noexcept { return gram_sqrt_; }

 private:
  BasisSpec(BasisKind kind, std::size_t k);

  BasisKind kind_ = BasisKind::fourier;
  std::size_t k_ = 0;
  std::vector<double> knots_;
  RealMatrix gram_;
  RealMatrix gram_sqrt_;
};

std::size_t grid_size(const Dims& dims);
void validate_dims(const Dims& dims);

// Row-major flat index <-> grid coordinates (0-based).
std::size_t flat_index(const Dims& dims, std::span<const long> coord);
std::vector<long> grid_coord(const Dims& dims, std::size_t index);

// Immutable functional field sample on the full rectangle. Row s of coeffs()
// holds the K basis coefficients of the curve at location s.
class FunctionalGridSample {
 public:
  FunctionalGridSample(Dims dims, RealMatrix coeffs, BasisSpec basis);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return coeffs_.rows(); }
  std::size_t dimension() const noexcept { return coeffs_.cols(); }
  const RealMatrix& coeffs() const noexcept { return coeffs_; }
  const BasisSpec& basis() const noexcept { return *basis_; }

  // Coefficients in an orthonormal coordinate system (gram_sqrt * x).
  const RealMatrix& orthonormal_coeffs() const noexcept { return ortho_; }

 private:
  Dims dims_;
  RealMatrix coeffs_;
  std::shared_ptr<const BasisSpec> basis_;
  RealMatrix ortho_;
};

struct LagCovariance {
  Lag lag;
  RealMatrix matrix;
};

FunctionalGridSample center(const FunctionalGridSample& sample);

// Flat indices s with both s and s+h in the rectangle.
std::vector<std::size_t> lag_sets(const Dims& dims, const Lag& h);
std::size_t lag_set_size(const Dims& dims, const Lag& h);

// (1/N) sum_{s in M_h} x_{s+h} x_s^T, in orthonormal coordinates.
LagCovariance autocovariance(const FunctionalGridSample& sample, const Lag& h);

}  // namespace sfield
