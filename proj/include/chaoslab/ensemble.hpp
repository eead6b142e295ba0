#pragma once

#include "chaoslab/samplers.hpp"
#include "chaoslab/structured_ops.hpp"

#include <string>

namespace chaoslab {

enum class EnsembleKind {
  dense,              // (1/sqrt m)(xi_ij), standardized entries
  partial_circulant,  // (1/sqrt m) R_omega H_z, z standardized, omega = {0..m-1}
  gabor,              // Psi_h, h = eta / sqrt(m), eta standardized; n = m^2
  identity,           // first m rows of the n x n identity
};

/// A random measurement ensemble: draw(stream) yields one operator.
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::dense;
  std::size_t n = 0;
  std::size_t m = 0;
  SamplerSpec entries{};

  /// Column count of the drawn operator (m^2 for gabor).
  std::size_t columns() const;
  bool complex_field() const { return kind == EnsembleKind::gabor; }
  MeasurementOperator draw(RngStream& stream) const;
  /// Same ensemble with a different row count (n follows m for gabor).
  EnsembleSpec with_rows(std::size_t rows) const;
};

std::string to_string(EnsembleKind kind);
EnsembleKind ensemble_kind_from_string(const std::string& name);
std::string to_string(SamplerKind kind);
SamplerKind sampler_kind_from_string(const std::string& name);

}  // namespace chaoslab
