#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sfield {

using cplx = std::complex<double>;

// Dense row-major matrix. Small (K <= ~50) so no expression templates.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<cplx>;

RealMatrix transpose(const RealMatrix& a);
RealMatrix multiply(const RealMatrix& a, const RealMatrix& b);
ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& a);
ComplexMatrix to_complex(const RealMatrix& a);
double frobenius_norm(const ComplexMatrix& a);
double frobenius_norm(const RealMatrix& a);
double max_abs(const RealMatrix& a);

// Complex Hermitian matrix. Construction symmetrizes by averaging with the
// conjugate transpose, and rejects non-finite entries or asymmetry beyond
// 1e-12 relative to the largest modulus unless `symmetrize_any` is set.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMatrix& a, bool symmetrize_any = true);
  explicit HermitianMatrix(const RealMatrix& a, bool symmetrize_any = true);

  std::size_t dim() const noexcept { return m_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  cplx operator()(std::size_t r, std::size_t c) const { return m_(r, c); }
  double trace() const;

 private:
  ComplexMatrix m_;
};

struct EigenSystem {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // column m is the unit eigenvector of values[m]
  bool near_degenerate = false;  // two eigenvalues within 1e-12 (relative)
};

// Cyclic Jacobi for complex Hermitian matrices. Deterministic for identical
// input; ties in eigenvalues keep first-occurrence order.
EigenSystem hermitian_eigen(const HermitianMatrix& a);

// Largest singular value via power iteration on A^T A.
double operator_norm(const RealMatrix& a);

// Upper tail of the chi-square distribution with even degrees of freedom.
double chisq_sf(double x, int df);

// Inverse of chisq_sf on (0,1), by bisection.
double chisq_isf(double prob, int df);

// Solves (M) x = b for symmetric positive definite M via Cholesky.
std::vector<double> cholesky_solve(const RealMatrix& m, std::span<const double> b);

// Symmetric positive (semi)definite square root via eigendecomposition.
RealMatrix spd_sqrt(const RealMatrix& m);

}  // namespace sfield
