#pragma once

#include "chaoslab/ensemble.hpp"
#include "chaoslab/structured_ops.hpp"

#include <string>
#include <vector>

namespace chaoslab {

enum class RipMethod { exact, mc_lower };
std::string to_string(RipMethod method);

struct RipResult {
  std::size_t s = 0;
  double delta = 0.0;
  RipMethod method = RipMethod::exact;
  std::size_t supports_examined = 0;
  /// Support and a unit vector in C^n supported on it with | ||Phi x||^2 - 1 | = delta
  /// (up to eigensolver rounding).
  std::vector<std::size_t> witness_support;
  CVector witness;
};

/// Largest number of supports delta_s_exact will enumerate.
inline constexpr double kExactSupportBudget = 1e5;

/// delta_s = max over all size-s supports S of ||Phi_S^* Phi_S - I||, with
/// supports in colexicographic order. Throws std::length_error when C(n, s)
/// exceeds the budget.
RipResult delta_s_exact(const MeasurementOperator& op, std::size_t s);

/// Max of the same per-support deviation over `trials` uniformly random
/// supports (trial t uses stream.child(t)), so it never exceeds delta_s.
RipResult delta_s_mc_lower(const MeasurementOperator& op, std::size_t s, std::size_t trials,
                           const RngStream& stream);

/// Extremal eigen-deviation of Phi_S^* Phi_S - I on one support.
double support_deviation(const MeasurementOperator& op, const std::vector<std::size_t>& support);

/// Uniform size-s subset of {0..n-1} (partial Fisher-Yates), sorted.
std::vector<std::size_t> random_support(std::size_t n, std::size_t s, RngStream& stream);

double binomial(double n, double k);

struct RipProbeOptions {
  RipMethod method = RipMethod::exact;
  std::size_t mc_trials = 2000;
};

struct SuccessEstimate {
  std::size_t successes = 0;
  std::size_t draws = 0;
  double rate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  RipMethod method = RipMethod::exact;
  /// With mc_lower deltas the rate over-estimates the true success probability.
  bool upper_estimate = false;
};

/// Fraction of ensemble draws with delta_s <= delta, with a Wilson 95% interval.
SuccessEstimate rip_success_prob(const EnsembleSpec& ensemble, std::size_t s, double delta, std::size_t draws,
                                 const RngStream& stream, const RipProbeOptions& options = {});

struct ScanOptions {
  std::size_t draws = 40;
  RipProbeOptions probe{RipMethod::mc_lower, 2000};
};

struct ScanRow {
  std::size_t s = 0;
  std::size_t m_star = 0;
  double f1 = 0.0;
  double ratio = 0.0;  // m_star / f1
  bool reached = true; // false when even m = n misses the target
  std::size_t probes = 0;
  std::size_t split_votes = 0;  // probes where the three repeats disagreed
};

struct ScanResult {
  std::vector<ScanRow> rows;
  double slope = 0.0;  // least squares slope of ln m* against ln f1
  double ratio_spread = 0.0;
};

/// For each s, the smallest m whose success rate reaches target_prob. m = n is
/// probed first, then bisection; every probe is a majority vote of three
/// independent success estimates. f1 uses alpha from the ensemble entries.
ScanResult minimal_m_scan(const EnsembleSpec& ensemble, const std::vector<std::size_t>& s_list, double delta,
                          double target_prob, const RngStream& stream, const ScanOptions& options = {});

}  // namespace chaoslab
