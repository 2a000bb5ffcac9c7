#pragma once

#include <cstddef>
#include <vector>

#include "sfield/field.hpp"
#include "sfield/numcore.hpp"

namespace sfield {

// Lag window norm. bartlett: (1 - ||z/q||_2)_+. bartlett_product:
// prod_i (1 - |z_i/q_i|)_+, which is positive definite in every d.
enum class WeightKind { bartlett, bartlett_product };

double bartlett_weight(std::span<const long> z, std::span<const double> q,
                       WeightKind kind = WeightKind::bartlett);

// q_i = sqrt(n_i).
std::vector<double> window_rule_of_thumb(const Dims& dims);

// Bartlett support: max_i ceil(q_i).
long bartlett_support(std::span<const double> q);

// Odd point count per axis with room for the lag support: max(41, 2*support+1).
std::size_t default_grid_points(std::span<const double> q);

// Equidistant nodes theta_k = 2 pi (k - (T-1)/2) / T on each of d axes, T odd.
// Nodes are enumerated row-major; node i and node size()-1-i are mirror images.
class FrequencyGrid {
 public:
  FrequencyGrid(std::size_t d, std::size_t points_per_dim);

  std::size_t d() const noexcept { return d_; }
  std::size_t points_per_dim() const noexcept { return t_; }
  std::size_t size() const noexcept { return size_; }
  long half_width() const noexcept { return static_cast<long>(t_ - 1) / 2; }

  // Integer node offsets k_i - (T-1)/2 in [-half_width, half_width].
  std::vector<long> offsets(std::size_t node) const;
  std::vector<double> theta(std::size_t node) const;
  std::size_t mirror(std::size_t node) const noexcept { return size_ - 1 - node; }
  // Rectangle-rule weight per node; sums to (2 pi)^d.
  double weight() const noexcept;

 private:
  std::size_t d_;
  std::size_t t_;
  std::size_t size_;
};

// Exact phase table e^{-i 2 pi j / T} for j in [0, T).
class PhaseTable {
 public:
  explicit PhaseTable(std::size_t t);
  // e^{-i 2 pi m / T} for any integer m.
  cplx operator()(long m) const noexcept;

 private:
  long t_;
  std::vector<cplx> table_;
};

struct SpectralDensityField {
  FrequencyGrid grid;
  std::vector<double> q;
  WeightKind weight_kind = WeightKind::bartlett;
  std::vector<HermitianMatrix> matrices;  // one per node
  std::size_t dimension() const { return matrices.empty() ? 0 : matrices.front().dim(); }
};

// (2 pi)^{-d} sum_h w_q(h) C_h e^{-i h^T theta} over the Bartlett support.
SpectralDensityField estimate_spectral_density(const FunctionalGridSample& sample,
                                               std::span<const double> q, const FrequencyGrid& grid,
                                               WeightKind kind = WeightKind::bartlett);

// Rectangle-rule inverse transform: sum_theta dtheta f_theta e^{i h^T theta}.
RealMatrix invert_to_lag(const SpectralDensityField& spec, const Lag& h);

}  // namespace sfield
