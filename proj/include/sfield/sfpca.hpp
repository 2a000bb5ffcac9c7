#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sfield/field.hpp"
#include "sfield/spectral.hpp"

namespace sfield {

// Top-p eigensystem of the spectral density at every frequency node.
// Phase convention: the largest-modulus coefficient of each eigenvector is
// real and positive on the positive half-grid, and phi(-theta) = conj(phi(theta)).
struct EigenField {
  FrequencyGrid grid;
  std::size_t levels = 0;                  // p
  std::size_t dimension = 0;               // K
  std::vector<std::vector<double>> values;  // [node][K], descending
  std::vector<ComplexMatrix> vectors;       // [node], K x p, column m = level m
  std::vector<double> traces;               // [node]
  std::size_t gap_warnings = 0;             // nodes with a spectral gap below 1e-12
};

EigenField eigendecompose_field(const SpectralDensityField& spec, std::size_t p);

// Integrated eigenvalue share of each of the first p levels (rectangle rule).
std::vector<double> variance_explained(const EigenField& eig, std::size_t p);
std::vector<double> variance_explained(const SpectralDensityField& spec, std::size_t p);

struct Selection {
  std::size_t value = 0;
  bool reached = true;  // false: threshold not met, value capped
  double achieved = 0.0;
};

Selection select_p(std::span<const double> proportions, double threshold = 0.85);

// Filter coefficients phi_{m,l} for l in the box ||l||_inf <= L, stored
// row-major over the box (l_i running from -L to L).
class SfpcFilterBank {
 public:
  SfpcFilterBank(std::size_t d, std::size_t dimension, long truncation,
                 std::vector<RealMatrix> filters, double max_imaginary);

  std::size_t d() const noexcept { return d_; }
  std::size_t levels() const noexcept { return filters_.size(); }
  std::size_t dimension() const noexcept { return k_; }
  long truncation() const noexcept { return l_; }
  std::size_t lag_count() const noexcept;

  std::vector<long> lag(std::size_t index) const;
  std::size_t lag_index(std::span<const long> l) const;
  std::span<const double> filter(std::size_t level, std::size_t lag_index) const;
  std::span<const double> filter(std::size_t level, std::span<const long> l) const {
    return filter(level, lag_index(l));
  }
  double captured_weight(std::size_t level) const;
  double max_imaginary() const noexcept { return max_imag_; }

  SfpcFilterBank scaled(double c) const;
  SfpcFilterBank truncated(long new_l) const;
  SfpcFilterBank with_levels(std::size_t p) const;
  SfpcFilterBank with_level_sign(std::size_t level, double sign) const;

 private:
  std::size_t d_;
  std::size_t k_;
  long l_;
  std::vector<RealMatrix> filters_;  // per level: lag_count x K
  double max_imag_;
};

// Fourier coefficients of the eigenvector fields up to lag L (needs L <= (T-1)/2).
// levels = 0 takes every level the eigen field carries.
SfpcFilterBank compute_filters(const EigenField& eig, long truncation, std::size_t levels = 0);

// Smallest L with sum_{||l||_inf <= L} ||phi_{1,l}||^2 >= threshold.
Selection select_L(const EigenField& eig, double threshold = 0.95, long max_lag = -1);

struct ScoreField {
  Dims dims;
  RealMatrix scores;            // p x N
  std::vector<char> valid_mask;  // per location

  std::size_t levels() const noexcept { return scores.rows(); }
  std::size_t size() const noexcept { return scores.cols(); }
  std::span<const double> level(std::size_t m) const { return scores.row(m); }
  ScoreField first_levels(std::size_t p) const;
};

// Y_{m,s} = sum_{||l||_inf <= L, s-l in grid} <X_{s-l}, phi_{m,l}>. With
// strict_boundary, locations within L of the boundary are masked.
ScoreField compute_scores(const FunctionalGridSample& sample, const SfpcFilterBank& bank,
                          bool strict_boundary = false);

// Restricts a score field to its valid locations (a rectangle).
ScoreField crop_to_valid(const ScoreField& scores);

// Classical FPC scores <X_s, v_m> with v_m the eigenvectors of C_0.
ScoreField ordinary_fpca_scores(const FunctionalGridSample& sample, std::size_t p);

}  // namespace sfield
