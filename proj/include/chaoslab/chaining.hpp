#pragma once

#include "chaoslab/common.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace chaoslab {

// Every bound here carries an unspecified absolute constant in its source
// result. Those constants (c_cov, C, c1) are explicit parameters defaulting to
// 1, so the outputs are shape functions rather than calibrated values.

enum class CoverKind { sparse_ball, circulant_family, gabor_family, euclidean_ball, empirical };

/// Log-covering-number model ln N(T, d, u).
///  - sparse_ball:      s ln(en/s) + s ln(1 + 2/u)
///  - euclidean_ball:   n ln(1 + 2/u)
///  - circulant_family: c (s/m)(ln n / u)^2 for u >= 1/sqrt(m), c s ln(en/(su)) below
///  - gabor_family:     c min{s(ln(em^2/s) + ln(3 sqrt(s/m)/u)), (s/m)(ln m / u)^2}
///  - empirical:        step function through a table of (u, ln N) pairs
/// Every value is clamped at 0.
struct CoverModel {
  CoverKind kind = CoverKind::sparse_ball;
  double s = 1.0;
  double n = 1.0;
  double m = 1.0;
  double c_cov = 1.0;
  /// Empirical table, sorted by u ascending; ln N is taken from the largest
  /// tabulated u not exceeding the query (the conservative side).
  std::vector<std::pair<double, double>> table;

  static CoverModel sparse_ball(double s, double n);
  static CoverModel euclidean_ball(double n);
  static CoverModel circulant_family(double s, double n, double m, double c_cov = 1.0);
  static CoverModel gabor_family(double s, double m, double c_cov = 1.0);
  static CoverModel empirical(std::vector<std::pair<double, double>> table);
};

double log_cover(const CoverModel& model, double u);

/// Both circulant branches evaluated at the same u (for splice diagnostics).
struct CirculantBranches {
  double large_u = 0.0;  // c (s/m)(ln n/u)^2
  double small_u = 0.0;  // c s ln(en/(su))
};
CirculantBranches circulant_branches(const CoverModel& model, double u);

/// Points in (lo, hi) where log_cover is discontinuous or has a kink.
std::vector<double> cover_breakpoints(const CoverModel& model, double lo, double hi);

struct DudleyOptions {
  /// Log-spaced nodes from u_max * 1e-8 to u_max (breakpoints are added).
  int nodes = 512;
  double lower_ratio = 1e-8;
  /// Gauss-Laguerre order for the analytic tail on (0, u_min].
  int tail_order = 64;
};

/// int_0^{u_max} (ln N(u))^{1/alpha} du. Panels between log-spaced nodes use
/// 4-point Gauss-Legendre; the piece below u_min is mapped to (0, inf) with
/// u = u_min e^{-v} and evaluated by Gauss-Laguerre.
double dudley_gamma(double alpha, const CoverModel& model, double u_max, const DudleyOptions& options = {});

struct DudleyTracePoint {
  double u;
  double log_cover;
  double integrand;
};
std::vector<DudleyTracePoint> dudley_trace(double alpha, const CoverModel& model, double u_max,
                                           int points = 128, double lower_ratio = 1e-8);

/// Gauss-Laguerre nodes and weights for int_0^inf f(x) e^{-x} dx
/// (Golub-Welsch on the Jacobi matrix).
std::pair<std::vector<double>, std::vector<double>> gauss_laguerre(int order);

/// alpha = 2: C sqrt(s/m) ln s ln n;  alpha < 2: C s^{1/alpha}/sqrt(m) (ln n)^{2/alpha}.
/// Logs floored at 1.
double closed_form_gamma(double alpha, double s, double n, double m, double constant = 1.0);

struct SampleComplexity {
  double f1 = 0.0;
  double f2 = 0.0;
  double m_required = 0.0;
};

/// f1 = max{s^{2/a} (ln n)^{4/a}, s ln^2 s ln^2 n}, f2 = max{s^{(2-a)/2} ln^2 n,
/// ln^a s ln^a n}, m_required = ceil(c1 delta^{-2} f1). Logs floored at 1.
SampleComplexity sample_complexity(double alpha, double s, double n, double delta, double c1 = 1.0);

/// Farthest-point greedy net: starts at the first point, then repeatedly adds
/// the point farthest from the current net until every point lies within u.
/// Ties go to the lowest index. Returns the selected indices in insertion order.
template <typename Point, typename Metric>
std::vector<std::size_t> greedy_net(std::span<const Point> points, Metric&& distance, double u) {
  std::vector<std::size_t> net;
  if (points.empty()) return net;
  std::vector<double> gap(points.size(), std::numeric_limits<double>::infinity());
  std::size_t next = 0;
  for (;;) {
    net.push_back(next);
    for (std::size_t i = 0; i < points.size(); ++i) {
      gap[i] = std::min(gap[i], static_cast<double>(distance(points[next], points[i])));
    }
    std::size_t far = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (gap[i] > gap[far]) far = i;
    }
    if (!(gap[far] > u)) break;
    next = far;
  }
  return net;
}

/// Empirical cover table: ln(greedy net size) at each radius.
template <typename Point, typename Metric>
std::vector<std::pair<double, double>> empirical_cover_table(std::span<const Point> points, Metric&& distance,
                                                             std::span<const double> radii) {
  std::vector<std::pair<double, double>> table;
  for (double u : radii) {
    const auto net = greedy_net(points, distance, u);
    table.emplace_back(u, std::log(static_cast<double>(net.size())));
  }
  std::sort(table.begin(), table.end());
  return table;
}

}  // namespace chaoslab
