#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sfield/field.hpp"
#include "sfield/numcore.hpp"

namespace fixtures {

inline sfield::ComplexMatrix random_hermitian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  sfield::ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = z(rng);
    for (std::size_t j = i + 1; j < n; ++j) {
      a(i, j) = sfield::cplx(z(rng), z(rng));
      a(j, i) = std::conj(a(i, j));
    }
  }
  return a;
}

inline sfield::RealMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  sfield::RealMatrix a(r, c);
  for (double& x : a.data()) x = z(rng);
  return a;
}

// iid Gaussian curves with coefficient scales 2^{-i/2}.
inline sfield::FunctionalGridSample iid_sample(const sfield::Dims& dims, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  sfield::RealMatrix x(sfield::grid_size(dims), k);
  for (std::size_t s = 0; s < x.rows(); ++s)
    for (std::size_t j = 0; j < k; ++j) x(s, j) = std::ldexp(z(rng), -static_cast<int>(j + 1) / 2);
  return sfield::FunctionalGridSample(dims, x, sfield::BasisSpec::fourier(k));
}

// Moving average of iid noise along every axis: spatially dependent curves.
inline sfield::FunctionalGridSample ma_sample(const sfield::Dims& dims, std::size_t k, std::uint64_t seed) {
  const auto base = iid_sample(dims, k, seed);
  sfield::RealMatrix x = base.coeffs();
  const std::size_t n = sfield::grid_size(dims);
  for (std::size_t s = 0; s < n; ++s) {
    auto c = sfield::grid_coord(dims, s);
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (c[i] == 0) continue;
      auto prev = c;
      --prev[i];
      const std::size_t t = sfield::flat_index(dims, prev);
      for (std::size_t j = 0; j < k; ++j) x(s, j) += 0.6 * base.coeffs()(t, (j + i) % k);
    }
  }
  return sfield::FunctionalGridSample(dims, x, sfield::BasisSpec::fourier(k));
}

}  // namespace fixtures
