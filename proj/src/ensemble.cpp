#include "chaoslab/ensemble.hpp"

#include <numeric>
#include <stdexcept>

namespace chaoslab {

std::size_t EnsembleSpec::columns() const { return kind == EnsembleKind::gabor ? m * m : n; }

EnsembleSpec EnsembleSpec::with_rows(std::size_t rows) const {
  EnsembleSpec out = *this;
  out.m = rows;
  if (kind == EnsembleKind::gabor) out.n = rows * rows;
  return out;
}

MeasurementOperator EnsembleSpec::draw(RngStream& stream) const {
  if (m == 0) throw std::invalid_argument("EnsembleSpec: m must be positive");
  if (kind != EnsembleKind::gabor && m > n) throw std::invalid_argument("EnsembleSpec: need m <= n");
  SamplerSpec standardized = entries;
  standardized.standardized = true;
  switch (kind) {
    case EnsembleKind::dense:
      return dense_ensemble(m, n, standardized, stream);
    case EnsembleKind::partial_circulant: {
      std::vector<std::size_t> omega(m);
      std::iota(omega.begin(), omega.end(), std::size_t{0});
      return MeasurementOperator::partial_circulant(
          PartialCirculantSpec(sample(standardized, n, stream), std::move(omega)));
    }
    case EnsembleKind::gabor: {
      const Vector eta = sample(standardized, m, stream);
      return MeasurementOperator::gabor(GaborSpec(eta.cast<Complex>() / std::sqrt(static_cast<double>(m))));
    }
    case EnsembleKind::identity:
      return MeasurementOperator::explicit_real(Matrix::Identity(m, n));
  }
  throw std::logic_error("unreachable ensemble kind");
}

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::dense: return "dense";
    case EnsembleKind::partial_circulant: return "circulant";
    case EnsembleKind::gabor: return "gabor";
    case EnsembleKind::identity: return "identity";
  }
  return "?";
}

EnsembleKind ensemble_kind_from_string(const std::string& name) {
  if (name == "dense" || name == "gaussian") return EnsembleKind::dense;
  if (name == "circulant" || name == "partial_circulant") return EnsembleKind::partial_circulant;
  if (name == "gabor") return EnsembleKind::gabor;
  if (name == "identity") return EnsembleKind::identity;
  throw std::invalid_argument("unknown ensemble kind: " + name);
}

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::weibull_symmetric: return "weibull";
    case SamplerKind::alpha_density: return "alpha_density";
    case SamplerKind::rademacher: return "rademacher";
    case SamplerKind::gaussian: return "gaussian";
  }
  return "?";
}

SamplerKind sampler_kind_from_string(const std::string& name) {
  if (name == "weibull" || name == "weibull_symmetric") return SamplerKind::weibull_symmetric;
  if (name == "alpha_density") return SamplerKind::alpha_density;
  if (name == "rademacher") return SamplerKind::rademacher;
  if (name == "gaussian") return SamplerKind::gaussian;
  throw std::invalid_argument("unknown sampler kind: " + name);
}

}  // namespace chaoslab
