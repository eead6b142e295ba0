#pragma once

#include "chaoslab/common.hpp"
#include "chaoslab/samplers.hpp"

#include <cstdint>
#include <string>

namespace chaoslab {

/// Norms that have closed forms: Frobenius, max entry, row-wise l_p(l_2) and
/// l_2 -> l_inf (max row norm). ||A||_{l1->l_inf} equals max_entry.
struct ExactNorms {
  double frobenius = 0.0;
  double max_entry = 0.0;
  double l2_to_inf = 0.0;
  Vector row_norms;

  /// (sum_i ||row_i||_2^p)^{1/p}; p = +inf gives l2_to_inf.
  double lp_l2(double p) const { return lp_norm(row_norms, p); }
  double l1_to_inf() const { return max_entry; }
};

ExactNorms exact_norms(const Matrix& a);
ExactNorms exact_norms(const CMatrix& a);

struct SpectralNorm {
  double value = 0.0;
  bool converged = true;
  /// "svd" for the dense decomposition, "power_iteration" otherwise.
  std::string method;
  int iterations = 0;
};

/// Largest singular value: dense SVD when min(m, n) <= 512, otherwise power
/// iteration on A*A to relative tolerance 1e-10 (at most 1e4 steps).
SpectralNorm spectral_norm(const Matrix& a);
SpectralNorm spectral_norm(const CMatrix& a);

enum class IntervalMethod { exact, power_iteration, restart_ascent_plus_interpolation };

/// Certified bracket lo <= ||A|| <= hi. lo is always attained by a feasible
/// witness; hi is a proven upper bound.
struct NormInterval {
  double lo = 0.0;
  double hi = 0.0;
  IntervalMethod method = IntervalMethod::exact;

  double width() const { return hi - lo; }
};

std::string to_string(IntervalMethod method);

struct AscentOptions {
  int restarts = 50;
  double tolerance = 1e-8;
  int max_iterations = 2000;
  std::uint64_t seed = 0x6e6f726d73ULL;
};

/// ||A||_{l2 -> lq} for q >= 2. q = 2 is the spectral norm and q = inf the max
/// row l2 norm (both exact). Otherwise lo is the best of the random-restart
/// alternating ascents and hi = min(S, S^{2/q} R^{1-2/q}) with S the spectral
/// norm and R = ||A||_{2->inf}.
NormInterval mixed_norm_interval(const Matrix& a, double q, const AscentOptions& options = {});
NormInterval mixed_norm_interval(const CMatrix& a, double q, const AscentOptions& options = {});

/// ||A||_{l_alpha -> l_alpha*}. alpha = 1 gives max_entry exactly, alpha = 2
/// the spectral norm; otherwise hi is mixed_norm_interval(A, alpha*).hi and lo
/// is a restart ascent with both iterates on l_alpha spheres.
NormInterval dual_pair_norm_interval(const Matrix& a, const AlphaShape& alpha,
                                     const AscentOptions& options = {});
NormInterval dual_pair_norm_interval(const CMatrix& a, const AlphaShape& alpha,
                                     const AscentOptions& options = {});

}  // namespace chaoslab
