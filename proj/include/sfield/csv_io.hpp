#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "sfield/field.hpp"
#include "sfield/sfpca.hpp"

namespace sfield {

// Sample CSV layout:
//   # dims=25,25 basis=fourier k=15      (optional sidecar header)
//   coef_1,...,coef_K                    (coefficient mode) or raw_1,...,raw_M
//   one row per grid location, row-major over the grid
// Raw rows hold curve values at u_j = (j + 0.5) / M and are projected onto
// the basis by ridge-regularized least squares.
struct BasisChoice {
  BasisKind kind = BasisKind::fourier;
  std::size_t dimension = 0;
};

FunctionalGridSample read_sample_csv(std::istream& in, std::optional<Dims> dims = std::nullopt,
                                     std::optional<BasisChoice> basis = std::nullopt);
FunctionalGridSample ingest_csv(const std::string& path, std::optional<Dims> dims = std::nullopt,
                                std::optional<BasisChoice> basis = std::nullopt);

void write_sample_csv(const FunctionalGridSample& sample, std::ostream& out);
void write_sample_csv(const FunctionalGridSample& sample, const std::string& path);

// node,theta_1..theta_d,lambda_1..lambda_K,trace
std::string format_spectrum_csv(const EigenField& eig);
// level,l_1..l_d,coef_1..coef_K
std::string format_filters_csv(const SfpcFilterBank& bank);

Dims parse_dims(const std::string& text);  // "25,25" or "25x25"
BasisKind parse_basis_kind(const std::string& text);

}  // namespace sfield
