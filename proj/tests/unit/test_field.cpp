#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "sfield/error.hpp"
#include "sfield/field.hpp"

using namespace sfield;

namespace {

// Midpoint-rule Gram matrix of a basis, independent of the library's quadrature.
RealMatrix midpoint_gram(const BasisSpec& b, std::size_t m = 20000) {
  const std::size_t k = b.dimension();
  RealMatrix g(k, k);
  for (std::size_t t = 0; t < m; ++t) {
    const auto v = b.evaluate((t + 0.5) / m);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) g(i, j) += v[i] * v[j] / m;
  }
  return g;
}

}  // namespace

TEST_CASE("Fourier basis is orthonormal with the documented ordering") {
  const auto b = BasisSpec::fourier(5);
  const RealMatrix g = midpoint_gram(b);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(g(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9).scale(1));
  const auto v = b.evaluate(0.125);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == doctest::Approx(std::sqrt(2.0) * std::sin(2 * std::numbers::pi * 0.125)));
  CHECK(v[2] == doctest::Approx(std::sqrt(2.0) * std::cos(2 * std::numbers::pi * 0.125)));
  CHECK(b.orthonormal());
}

TEST_CASE("B-spline basis: partition of unity and exact Gram matrix") {
  for (std::size_t k : {1u, 3u, 6u, 10u}) {
    const auto b = BasisSpec::bspline(k);
    for (double u : {0.0, 0.13, 0.5, 0.77, 1.0}) {
      double s = 0.0;
      for (double x : b.evaluate(u)) {
        CHECK(x >= -1e-15);
        s += x;
      }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    const RealMatrix g = midpoint_gram(b);
    for (std::size_t i = 0; i < k * k; ++i) CHECK(b.gram().data()[i] == doctest::Approx(g.data()[i]).epsilon(1e-6));
    const RealMatrix r = multiply(b.gram_sqrt(), b.gram_sqrt());
    for (std::size_t i = 0; i < k * k; ++i) CHECK(r.data()[i] == doctest::Approx(b.gram().data()[i]).epsilon(1e-10));
  }
}

TEST_CASE("orthonormal coordinates preserve L2 inner products") {
  const auto b = BasisSpec::bspline(6);
  const RealMatrix x = fixtures::random_matrix(4, 6, 5);
  const FunctionalGridSample s({2, 2}, x, b);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t t = 0; t < 4; ++t) {
      double gram_ip = 0.0, ortho_ip = 0.0;
      for (std::size_t i = 0; i < 6; ++i) {
        ortho_ip += s.orthonormal_coeffs()(r, i) * s.orthonormal_coeffs()(t, i);
        for (std::size_t j = 0; j < 6; ++j) gram_ip += x(r, i) * b.gram()(i, j) * x(t, j);
      }
      CHECK(ortho_ip == doctest::Approx(gram_ip).epsilon(1e-12));
    }
}

TEST_CASE("grid indexing round trip") {
  const Dims dims{3, 4, 5};
  CHECK(grid_size(dims) == 60);
  for (std::size_t i = 0; i < 60; ++i) CHECK(flat_index(dims, grid_coord(dims, i)) == i);
  CHECK(grid_coord(dims, 1) == std::vector<long>{0, 0, 1});
  CHECK_THROWS_AS(validate_dims({}), Error);
  CHECK_THROWS_AS(validate_dims({2, 2, 2, 2}), Error);
  CHECK_THROWS_AS(validate_dims({3, 0}), Error);
}

TEST_CASE("lag sets match brute force enumeration") {
  const Dims dims{4, 5};
  for (long h1 = -4; h1 <= 4; ++h1)
    for (long h2 = -5; h2 <= 5; ++h2) {
      std::vector<std::size_t> brute;
      for (long a = 0; a < 4; ++a)
        for (long b = 0; b < 5; ++b)
          if (a + h1 >= 0 && a + h1 < 4 && b + h2 >= 0 && b + h2 < 5) brute.push_back(static_cast<std::size_t>(a * 5 + b));
      CHECK(lag_sets(dims, {h1, h2}) == brute);
      CHECK(lag_set_size(dims, {h1, h2}) == brute.size());
    }
}

TEST_CASE("autocovariance matches a direct double sum") {
  const Dims dims{3, 4};
  const auto s = fixtures::iid_sample(dims, 3, 9);
  const auto& x = s.coeffs();
  const std::size_t n = 12;
  for (long h1 = -2; h1 <= 2; ++h1)
    for (long h2 = -3; h2 <= 3; ++h2) {
      RealMatrix oracle(3, 3);
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v) {
          const auto cu = grid_coord(dims, u), cv = grid_coord(dims, v);
          if (cu[0] - cv[0] != h1 || cu[1] - cv[1] != h2) continue;
          for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b) oracle(a, b) += x(u, a) * x(v, b) / n;
        }
      const auto c = autocovariance(s, {h1, h2});
      for (std::size_t i = 0; i < 9; ++i) CHECK(c.matrix.data()[i] == doctest::Approx(oracle.data()[i]).epsilon(1e-14));
      const auto cm = autocovariance(s, {-h1, -h2});
      CHECK(cm.matrix == transpose(c.matrix));
    }
}

TEST_CASE("centering removes the sample mean") {
  const auto s = center(fixtures::ma_sample({5, 6}, 4, 2));
  for (std::size_t j = 0; j < 4; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) m += s.coeffs()(i, j);
    CHECK(std::abs(m) < 1e-13);
  }
}

TEST_CASE("sample validation") {
  CHECK_THROWS_AS(FunctionalGridSample({2, 2}, RealMatrix(3, 2), BasisSpec::fourier(2)), Error);
  CHECK_THROWS_AS(FunctionalGridSample({2, 2}, RealMatrix(4, 3), BasisSpec::fourier(2)), Error);
  RealMatrix bad(4, 2);
  bad(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(FunctionalGridSample({2, 2}, bad, BasisSpec::fourier(2)), Error);
}
