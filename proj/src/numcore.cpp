#include "sfield/numcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sfield/error.hpp"
#include "sfield/log.hpp"

namespace sfield {

RealMatrix transpose(const RealMatrix& a) {
  RealMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

template <typename T>
static Matrix<T> multiply_impl(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) fail(ErrorKind::invalid_input, "matrix shape mismatch in multiply");
  Matrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

RealMatrix multiply(const RealMatrix& a, const RealMatrix& b) { return multiply_impl(a, b); }
ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) { return multiply_impl(a, b); }

ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
  return t;
}

ComplexMatrix to_complex(const RealMatrix& a) {
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
  return c;
}

double frobenius_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (const auto& v : a.data()) s += std::norm(v);
  return std::sqrt(s);
}

double frobenius_norm(const RealMatrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const RealMatrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

HermitianMatrix::HermitianMatrix(const ComplexMatrix& a, bool symmetrize_any) : m_(a) {
  if (a.rows() != a.cols() || a.rows() == 0)
    fail(ErrorKind::invalid_input, "Hermitian matrix must be square and non-empty");
  double scale = 0.0;
  for (const auto& v : a.data()) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      fail(ErrorKind::invalid_input, "non-finite entry in Hermitian matrix");
    scale = std::max(scale, std::abs(v));
  }
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const cplx x = a(i, j);
      const cplx y = std::conj(a(j, i));
      if (!symmetrize_any && std::abs(x - y) > 1e-12 * scale)
        fail(ErrorKind::invalid_input, "matrix is not Hermitian within tolerance");
      const cplx avg = 0.5 * (x + y);
      m_(i, j) = avg;
      m_(j, i) = std::conj(avg);
    }
    m_(i, i) = m_(i, i).real();
  }
}

HermitianMatrix::HermitianMatrix(const RealMatrix& a, bool symmetrize_any)
    : HermitianMatrix(to_complex(a), symmetrize_any) {}

double HermitianMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) t += m_(i, i).real();
  return t;
}

EigenSystem hermitian_eigen(const HermitianMatrix& h) {
  const std::size_t n = h.dim();
  ComplexMatrix a = h.matrix();
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double scale = std::max(frobenius_norm(a), 1e-300);
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(2.0 * off) <= 1e-15 * scale) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx g = a(p, q);
        const double r = std::abs(g);
        if (r <= 1e-300 || r <= 1e-18 * scale) continue;
        // Phase e^{-i phi} on column q makes a(p,q) real, then a real rotation.
        const cplx phase = std::conj(g) / r;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Column update by J = [[c, s], [-s*phase, c*phase]]; rows follow by symmetry.
        const double pr = phase.real(), pi = phase.imag();
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const cplx x = a(k, p), z = a(k, q);
          const cplx y(z.real() * pr - z.imag() * pi, z.real() * pi + z.imag() * pr);
          const cplx np(c * x.real() - s * y.real(), c * x.imag() - s * y.imag());
          const cplx nq(s * x.real() + c * y.real(), s * x.imag() + c * y.imag());
          a(k, p) = np;
          a(k, q) = nq;
          a(p, k) = std::conj(np);
          a(q, k) = std::conj(nq);
        }
        a(p, p) = app - t * r;
        a(q, q) = aqq + t * r;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const cplx x = v(k, p), z = v(k, q);
          const cplx y(z.real() * pr - z.imag() * pi, z.real() * pi + z.imag() * pr);
          v(k, p) = cplx(c * x.real() - s * y.real(), c * x.imag() - s * y.imag());
          v(k, q) = cplx(s * x.real() + c * y.real(), s * x.imag() + c * y.imag());
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  EigenSystem es;
  es.values.resize(n);
  es.vectors = ComplexMatrix(n, n);
  for (std::size_t m = 0; m < n; ++m) {
    es.values[m] = a(order[m], order[m]).real();
    for (std::size_t k = 0; k < n; ++k) es.vectors(k, m) = v(k, order[m]);
  }
  double top = 0.0;
  for (double x : es.values) top = std::max(top, std::abs(x));
  for (std::size_t m = 0; m + 1 < n; ++m) {
    if (es.values[m] - es.values[m + 1] <= 1e-12 * std::max(top, 1e-300)) {
      es.near_degenerate = true;
      break;
    }
  }
  if (es.near_degenerate) log::debug("hermitian_eigen: eigenvalue tie within 1e-12");
  return es;
}

double operator_norm(const RealMatrix& a) {
  for (double x : a.data())
    if (!std::isfinite(x)) fail(ErrorKind::invalid_input, "non-finite entry in operator_norm");
  const std::size_t n = a.cols();
  if (n == 0 || a.rows() == 0) return 0.0;
  const RealMatrix ata = multiply(transpose(a), a);
  if (max_abs(ata) == 0.0) return 0.0;

  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * static_cast<double>(i) / n;
  auto normalize = [](std::vector<double>& u) {
    double s = 0.0;
    for (double e : u) s += e * e;
    s = std::sqrt(s);
    for (double& e : u) e /= s;
    return s;
  };
  normalize(x);
  double lambda = 0.0;
  bool converged = false;
  for (int it = 0; it < 20000; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += ata(i, j) * x[j];
      y[i] = s;
    }
    double rayleigh = 0.0;
    for (std::size_t i = 0; i < n; ++i) rayleigh += x[i] * y[i];
    if (normalize(y) == 0.0) return 0.0;
    x.swap(y);
    if (it > 2 && std::abs(rayleigh - lambda) <= 1e-15 * rayleigh) {
      lambda = rayleigh;
      converged = true;
      break;
    }
    lambda = rayleigh;
  }
  if (!converged) {
    // Clustered top singular values: fall back to the full eigensystem.
    lambda = hermitian_eigen(HermitianMatrix(ata)).values.front();
  }
  return std::sqrt(std::max(lambda, 0.0));
}

double chisq_sf(double x, int df) {
  if (!(x >= 0.0)) fail(ErrorKind::invalid_input, "chisq_sf requires x >= 0");
  if (df <= 0 || df % 2 != 0) fail(ErrorKind::invalid_input, "chisq_sf requires a positive even df");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double half = 0.5 * x;
  const double log_half = std::log(half);
  double sum = 0.0;
  for (int k = 0; k < df / 2; ++k) sum += std::exp(-half + k * log_half - std::lgamma(k + 1.0));
  return std::min(sum, 1.0);
}

double chisq_isf(double prob, int df) {
  if (!(prob > 0.0 && prob < 1.0)) fail(ErrorKind::invalid_input, "chisq_isf requires prob in (0,1)");
  double lo = 0.0, hi = std::max(1.0, 2.0 * df);
  while (chisq_sf(hi, df) > prob) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chisq_sf(mid, df) > prob ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> cholesky_solve(const RealMatrix& m, std::span<const double> b) {
  const std::size_t n = m.rows();
  if (m.cols() != n || b.size() != n) fail(ErrorKind::invalid_input, "cholesky_solve shape mismatch");
  RealMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) fail(ErrorKind::numerical, "matrix is not positive definite");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= l(i, k) * y[k];
    y[i] /= l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) y[i] -= l(k, i) * y[k];
    y[i] /= l(i, i);
  }
  return y;
}

RealMatrix spd_sqrt(const RealMatrix& m) {
  const EigenSystem es = hermitian_eigen(HermitianMatrix(m));
  const std::size_t n = m.rows();
  RealMatrix r(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = std::sqrt(std::max(es.values[k], 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        r(i, j) += s * (es.vectors(i, k) * std::conj(es.vectors(j, k))).real();
  }
  return r;
}

}  // namespace sfield
