#pragma once

#include "chaoslab/common.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace chaoslab {

/// Tail shape parameter alpha in [1, 2] together with its conjugate exponent
/// alpha* = alpha / (alpha - 1). alpha = 1 stores alpha* = +inf, and every
/// l_{alpha*} norm then dispatches to the max norm.
class AlphaShape {
 public:
  explicit AlphaShape(double alpha);

  double alpha() const { return alpha_; }
  double alpha_star() const { return alpha_star_; }
  bool conjugate_is_infinite() const { return std::isinf(alpha_star_); }

 private:
  double alpha_;
  double alpha_star_;
};

/// Counter-based random stream. The key is a BLAKE2b hash of the master seed
/// and a label path; draws are consecutive ChaCha20 keystream words. Two
/// streams with the same (seed, path) produce identical sequences no matter
/// which thread consumes them.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::vector<std::string> path);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// +1 or -1 with equal probability.
  double sign();

  /// Independent sub-stream with one more label on the path.
  RngStream child(const std::string& label) const;
  RngStream child(std::uint64_t index) const { return child(std::to_string(index)); }

  std::uint64_t master_seed() const { return seed_; }
  const std::vector<std::string>& path() const { return path_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::vector<std::string> path_;
  std::array<unsigned char, 32> key_{};
  std::uint32_t block_counter_ = 0;
  std::array<std::uint64_t, 64> buffer_{};
  std::size_t cursor_ = 64;
};

RngStream derive_stream(std::uint64_t master_seed, const std::vector<std::string>& labels);

enum class SamplerKind { weibull_symmetric, alpha_density, rademacher, gaussian };

struct SamplerSpec {
  SamplerKind kind = SamplerKind::gaussian;
  AlphaShape shape{2.0};
  bool standardized = false;
  /// Psi_alpha norm L, cached after estimation (0 until then).
  double psi_alpha_norm_L = 0.0;
};

/// |xi| = (-ln U)^{1/alpha} with an independent random sign.
Vector sample_symmetric_weibull(const AlphaShape& shape, std::size_t n, RngStream& stream);

/// Density alpha / (2 Gamma(1/alpha)) exp(-|x|^alpha): |x| = G^{1/alpha},
/// G ~ Gamma(1/alpha, 1), independent random sign.
Vector sample_alpha_density(const AlphaShape& shape, std::size_t n, RngStream& stream);

Vector sample_rademacher(std::size_t n, RngStream& stream);
Vector sample_gaussian(std::size_t n, RngStream& stream);

/// Draws n values from spec, standardizing when spec.standardized is set.
Vector sample(const SamplerSpec& spec, std::size_t n, RngStream& stream);
/// Bulk draw in blocks of 4096, block b from stream.child(b); identical for
/// every thread count.
Vector sample_blocks(const SamplerSpec& spec, std::size_t n, const RngStream& stream);
void sample_into(const SamplerSpec& spec, RngStream& stream, std::span<double> out);

/// Population variance of the raw (unstandardized) law of spec.kind.
double population_variance(SamplerKind kind, const AlphaShape& shape);
/// Population variance of what sample(spec, ...) returns.
double population_variance(const SamplerSpec& spec);
/// Population E|X|^p of the raw law (weibull: Gamma(1+p/alpha);
/// alpha density: Gamma((p+1)/alpha)/Gamma(1/alpha)).
double population_abs_moment(SamplerKind kind, const AlphaShape& shape, double p);

/// Divides by the population standard deviation of the raw law. Only the
/// Weibull and alpha-density kinds are accepted.
Vector standardize(const SamplerSpec& spec, const Vector& v);
double standardization_divisor(const SamplerSpec& spec);

/// Smallest t with mean(exp(|x_i|^alpha / t^alpha)) <= 2, by bisection to
/// relative tolerance 1e-6. Returns +inf when max|x_i| is not finite.
double estimate_psi_alpha_norm(std::span<const double> samples, const AlphaShape& shape);

}  // namespace chaoslab
