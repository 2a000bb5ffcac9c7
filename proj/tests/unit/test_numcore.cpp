#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "sfield/error.hpp"
#include "sfield/numcore.hpp"

using namespace sfield;

namespace {

double residual(const ComplexMatrix& a, const EigenSystem& es) {
  const std::size_t n = a.rows();
  double worst = 0.0;
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t i = 0; i < n; ++i) {
      cplx av = 0.0;
      for (std::size_t j = 0; j < n; ++j) av += a(i, j) * es.vectors(j, m);
      worst = std::max(worst, std::abs(av - es.values[m] * es.vectors(i, m)));
    }
  return worst;
}

}  // namespace

TEST_CASE("2x2 Hermitian example with imaginary coupling") {
  ComplexMatrix a(2, 2);
  a(0, 0) = 2.0;
  a(0, 1) = cplx(0, 1);
  a(1, 0) = cplx(0, -1);
  a(1, 1) = 2.0;
  const auto es = hermitian_eigen(HermitianMatrix(a));
  CHECK(es.values[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(es.values[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(residual(a, es) < 1e-14);
}

TEST_CASE("real symmetric input: eigenvalues sorted descending") {
  RealMatrix d(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = 5.0;
  d(2, 2) = -2.0;
  const auto es = hermitian_eigen(HermitianMatrix(d));
  CHECK(es.values == std::vector<double>{5.0, 1.0, -2.0});
  CHECK(std::abs(es.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK_FALSE(es.near_degenerate);
}

TEST_CASE("identity is flagged near-degenerate") {
  const auto es = hermitian_eigen(HermitianMatrix(RealMatrix::identity(4)));
  CHECK(es.near_degenerate);
  for (double v : es.values) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("random Hermitian matrices: spectral identities") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t n = 2 + seed % 14;
    const ComplexMatrix a = fixtures::random_hermitian(n, seed);
    const HermitianMatrix h(a);
    const auto es = hermitian_eigen(h);
    const double scale = frobenius_norm(a);
    CHECK(residual(a, es) < 1e-12 * scale);
    // V^* V = I
    const ComplexMatrix g = multiply(adjoint(es.vectors), es.vectors);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(g(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);
    double sum = 0.0, sq = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      sum += es.values[m];
      sq += es.values[m] * es.values[m];
      if (m + 1 < n) CHECK(es.values[m] >= es.values[m + 1]);
    }
    CHECK(sum == doctest::Approx(h.trace()).epsilon(1e-12));
    CHECK(std::sqrt(sq) == doctest::Approx(scale).epsilon(1e-12));
  }
}

TEST_CASE("eigen solve is deterministic") {
  const HermitianMatrix h(fixtures::random_hermitian(9, 77));
  const auto a = hermitian_eigen(h);
  const auto b = hermitian_eigen(h);
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);
}

TEST_CASE("Hermitian construction rejects bad input") {
  ComplexMatrix a(2, 2);
  a(0, 1) = cplx(1.0, 0.0);
  a(1, 0) = cplx(0.0, 1.0);
  CHECK_THROWS_AS(HermitianMatrix(a, false), Error);
  CHECK_NOTHROW(HermitianMatrix(a, true));
  a(0, 0) = std::nan("");
  CHECK_THROWS_AS(HermitianMatrix{a}, Error);
  CHECK_THROWS_AS(HermitianMatrix(ComplexMatrix(2, 3)), Error);
}

TEST_CASE("operator norm") {
  RealMatrix d(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = -5.0;
  CHECK(operator_norm(d) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(operator_norm(RealMatrix(3, 3)) == 0.0);
  // Oracle: square root of the top eigenvalue of A^T A from the Jacobi solver.
  for (std::uint64_t seed = 3; seed < 8; ++seed) {
    const RealMatrix a = fixtures::random_matrix(15, 15, seed);
    const auto es = hermitian_eigen(HermitianMatrix(multiply(transpose(a), a)));
    CHECK(operator_norm(a) == doctest::Approx(std::sqrt(es.values[0])).epsilon(1e-12));
  }
}

TEST_CASE("chi-square survival function") {
  for (double x : {0.1, 1.0, 3.7, 12.0, 80.0}) {
    CHECK(chisq_sf(x, 2) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-14));
    CHECK(chisq_sf(x, 4) == doctest::Approx(std::exp(-x / 2) * (1 + x / 2)).epsilon(1e-14));
  }
  CHECK(chisq_sf(5.991, 2) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chisq_sf(9.488, 4) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chisq_sf(0.0, 6) == 1.0);
  CHECK(chisq_sf(2000.0, 8) >= 0.0);
  CHECK(chisq_sf(2000.0, 8) < 1e-300);
  CHECK_THROWS_AS(chisq_sf(1.0, 3), Error);
  CHECK_THROWS_AS(chisq_sf(-1.0, 2), Error);
  CHECK(chisq_isf(0.05, 4) == doctest::Approx(9.487729).epsilon(1e-6));
  for (int df : {2, 4, 6, 8})
    for (double p : {0.9, 0.5, 0.05, 1e-6}) CHECK(chisq_sf(chisq_isf(p, df), df) == doctest::Approx(p).epsilon(1e-10));
}

TEST_CASE("survival function is monotone in x") {
  for (int df = 2; df <= 30; df += 2) {
    double prev = 1.0;
    for (double x = 0.0; x < 100.0; x += 0.37) {
      const double v = chisq_sf(x, df);
      CHECK(v <= prev + 1e-15);
      prev = v;
    }
  }
}

TEST_CASE("Cholesky solve and SPD square root") {
  const RealMatrix g = fixtures::random_matrix(6, 6, 11);
  RealMatrix m = multiply(transpose(g), g);
  for (std::size_t i = 0; i < 6; ++i) m(i, i) += 0.5;
  const std::vector<double> b{1, -2, 3, 0.5, 0, 4};
  const auto x = cholesky_solve(m, b);
  for (std::size_t i = 0; i < 6; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 6; ++j) s += m(i, j) * x[j];
    CHECK(s == doctest::Approx(b[i]).epsilon(1e-12));
  }
  const RealMatrix r = spd_sqrt(m);
  const RealMatrix rr = multiply(r, r);
  for (std::size_t i = 0; i < 36; ++i) CHECK(rr.data()[i] == doctest::Approx(m.data()[i]).epsilon(1e-10));
  CHECK(r == transpose(r));
}
