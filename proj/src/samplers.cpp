#include "chaoslab/samplers.hpp"

#include "chaoslab/parallel.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>
#include <random>
#include <stdexcept>

namespace chaoslab {

namespace {

constexpr std::size_t kChachaBlockBytes = 64;

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialisation failed");
}

void append_u64(crypto_generichash_state& st, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  crypto_generichash_update(&st, bytes, sizeof bytes);
}

}  // namespace

AlphaShape::AlphaShape(double alpha) : alpha_(alpha) {
  if (!(alpha >= 1.0 && alpha <= 2.0)) {
    throw std::invalid_argument("alpha must lie in [1, 2]");
  }
  alpha_star_ = conjugate_exponent(alpha);
}

// ---------------------------------------------------------------------------
// RngStream

RngStream::RngStream(std::uint64_t master_seed, std::vector<std::string> path)
    : seed_(master_seed), path_(std::move(path)) {
  ensure_sodium();
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, key_.size());
  static constexpr char kDomain[] = "chaoslab/rng/v1";
  crypto_generichash_update(&st, reinterpret_cast<const unsigned char*>(kDomain),
                            sizeof kDomain - 1);
  append_u64(st, seed_);
  append_u64(st, path_.size());
  for (const auto& label : path_) {
    append_u64(st, label.size());
    crypto_generichash_update(&st, reinterpret_cast<const unsigned char*>(label.data()),
                              label.size());
  }
  crypto_generichash_final(&st, key_.data(), key_.size());
}

void RngStream::refill() {
  static_assert(sizeof(buffer_) % kChachaBlockBytes == 0);
  constexpr std::size_t kBlocks = sizeof(buffer_) / kChachaBlockBytes;
  if (block_counter_ > std::numeric_limits<std::uint32_t>::max() - kBlocks) {
    throw std::runtime_error("RngStream exhausted; derive a child stream");
  }
  unsigned char nonce[crypto_stream_chacha20_ietf_NONCEBYTES] = {};
  unsigned char raw[sizeof(buffer_)] = {};
  crypto_stream_chacha20_ietf_xor_ic(raw, raw, sizeof raw, nonce, block_counter_, key_.data());
  block_counter_ += static_cast<std::uint32_t>(kBlocks);
  for (std::size_t i = 0; i < buffer_.size(); ++i) {
    std::uint64_t w = 0;
    for (int b = 7; b >= 0; --b) w = (w << 8) | raw[8 * i + b];
    buffer_[i] = w;
  }
  cursor_ = 0;
}

RngStream::result_type RngStream::operator()() {
  if (cursor_ == buffer_.size()) refill();
  return buffer_[cursor_++];
}

double RngStream::uniform() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::sign() { return ((*this)() >> 63) ? 1.0 : -1.0; }

RngStream RngStream::child(const std::string& label) const {
  auto path = path_;
  path.push_back(label);
  return RngStream(seed_, std::move(path));
}

RngStream derive_stream(std::uint64_t master_seed, const std::vector<std::string>& labels) {
  return RngStream(master_seed, labels);
}

// ---------------------------------------------------------------------------
// Generators

Vector sample_symmetric_weibull(const AlphaShape& shape, std::size_t n, RngStream& stream) {
  Vector out(static_cast<Eigen::Index>(n));
  const double inv_alpha = 1.0 / shape.alpha();
  for (std::size_t i = 0; i < n; ++i) {
    const double u = stream.uniform();
    const double s = stream.sign();
    out(static_cast<Eigen::Index>(i)) = s * std::pow(-std::log(u), inv_alpha);
  }
  return out;
}

Vector sample_alpha_density(const AlphaShape& shape, std::size_t n, RngStream& stream) {
  Vector out(static_cast<Eigen::Index>(n));
  const double inv_alpha = 1.0 / shape.alpha();
  std::gamma_distribution<double> gamma(inv_alpha, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = gamma(stream);
    const double s = stream.sign();
    out(static_cast<Eigen::Index>(i)) = s * std::pow(g, inv_alpha);
  }
  return out;
}

Vector sample_rademacher(std::size_t n, RngStream& stream) {
  Vector out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) out(static_cast<Eigen::Index>(i)) = stream.sign();
  return out;
}

Vector sample_gaussian(std::size_t n, RngStream& stream) {
  Vector out(static_cast<Eigen::Index>(n));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) out(static_cast<Eigen::Index>(i)) = normal(stream);
  return out;
}

Vector sample(const SamplerSpec& spec, std::size_t n, RngStream& stream) {
  Vector out(static_cast<Eigen::Index>(n));
  sample_into(spec, stream, std::span<double>(out.data(), n));
  return out;
}

Vector sample_blocks(const SamplerSpec& spec, std::size_t n, const RngStream& stream) {
  constexpr std::size_t kBlock = 4096;
  Vector out(static_cast<Eigen::Index>(n));
  parallel_for((n + kBlock - 1) / kBlock, [&](std::size_t b) {
    RngStream s = stream.child(b);
    const std::size_t first = b * kBlock;
    sample_into(spec, s, std::span<double>(out.data() + first, std::min(kBlock, n - first)));
  });
  return out;
}

void sample_into(const SamplerSpec& spec, RngStream& stream, std::span<double> out) {
  const std::size_t n = out.size();
  Vector v;
  switch (spec.kind) {
    case SamplerKind::weibull_symmetric:
      v = sample_symmetric_weibull(spec.shape, n, stream);
      break;
    case SamplerKind::alpha_density:
      v = sample_alpha_density(spec.shape, n, stream);
      break;
    case SamplerKind::rademacher:
      v = sample_rademacher(n, stream);
      break;
    case SamplerKind::gaussian:
      v = sample_gaussian(n, stream);
      break;
  }
  const double divisor = spec.standardized ? standardization_divisor(spec) : 1.0;
  for (std::size_t i = 0; i < n; ++i) out[i] = v(static_cast<Eigen::Index>(i)) / divisor;
}

// ---------------------------------------------------------------------------
// Moments

double population_abs_moment(SamplerKind kind, const AlphaShape& shape, double p) {
  const double a = shape.alpha();
  switch (kind) {
    case SamplerKind::weibull_symmetric:
      return std::tgamma(1.0 + p / a);
    case SamplerKind::alpha_density:
      return std::exp(std::lgamma((p + 1.0) / a) - std::lgamma(1.0 / a));
    case SamplerKind::rademacher:
      return 1.0;
    case SamplerKind::gaussian:
      return std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) / std::sqrt(M_PI);
  }
  return 0.0;
}

double population_variance(SamplerKind kind, const AlphaShape& shape) {
  return population_abs_moment(kind, shape, 2.0);
}

double population_variance(const SamplerSpec& spec) {
  if (spec.standardized) return 1.0;
  return population_variance(spec.kind, spec.shape);
}

double standardization_divisor(const SamplerSpec& spec) {
  switch (spec.kind) {
    case SamplerKind::weibull_symmetric:
    case SamplerKind::alpha_density:
      return std::sqrt(population_variance(spec.kind, spec.shape));
    case SamplerKind::rademacher:
    case SamplerKind::gaussian:
      return 1.0;
  }
  return 1.0;
}

Vector standardize(const SamplerSpec& spec, const Vector& v) {
  if (spec.kind != SamplerKind::weibull_symmetric && spec.kind != SamplerKind::alpha_density) {
    throw std::invalid_argument("standardize: only weibull_symmetric and alpha_density are supported");
  }
  return v / standardization_divisor(spec);
}

// ---------------------------------------------------------------------------
// Psi_alpha

double estimate_psi_alpha_norm(std::span<const double> samples, const AlphaShape& shape) {
  if (samples.empty()) throw std::invalid_argument("estimate_psi_alpha_norm: empty sample");
  double max_abs = 0.0;
  for (double x : samples) max_abs = std::max(max_abs, std::abs(x));
  if (!std::isfinite(max_abs)) return kInf;
  if (max_abs == 0.0) return 0.0;

  const double a = shape.alpha();
  std::vector<double> powered(samples.size());
  std::transform(samples.begin(), samples.end(), powered.begin(),
                 [a](double x) { return std::pow(std::abs(x), a); });

  // exp arguments capped at 700: a capped term alone already pushes the mean past 2.
  const auto mean_exp = [&](double t) {
    const double inv = 1.0 / std::pow(t, a);
    double acc = 0.0;
    for (double p : powered) acc += std::exp(std::min(p * inv, 700.0));
    return acc / static_cast<double>(powered.size());
  };

  // Every term is <= 2 at t = max|x| / (ln 2)^{1/alpha}, so it is feasible.
  double hi = max_abs / std::pow(std::log(2.0), 1.0 / a);
  if (hi > 1e6 * max_abs) return kInf;
  double lo = 0.0;
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mean_exp(mid) <= 2.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace chaoslab
