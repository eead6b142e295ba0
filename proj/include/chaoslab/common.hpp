#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>

namespace chaoslab {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Vector l_p norm; p = +inf gives the max norm.
template <typename Derived>
double lp_norm(const Eigen::MatrixBase<Derived>& v, double p) {
  if (std::isinf(p)) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
  }
  if (p == 2.0) return v.norm();
  if (p == 1.0) return v.cwiseAbs().sum();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v(i)), p);
  return std::pow(acc, 1.0 / p);
}

/// Hoelder conjugate q/(q-1); 1 maps to +inf and +inf maps to 1.
inline double conjugate_exponent(double q) {
  if (std::isinf(q)) return 1.0;
  if (q == 1.0) return kInf;
  return q / (q - 1.0);
}

/// Natural log floored at 1, used throughout the sample-complexity and
/// closed-form chaining formulas so they stay positive for tiny s.
inline double log_floor1(double x) { return std::max(1.0, std::log(x)); }

/// Wilson score interval for k successes in n trials (95% by default).
inline std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double centre = (phat + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z / (1 + z2 / nn) * std::sqrt(phat * (1 - phat) / nn + z2 / (4 * nn * nn));
  return {k == 0 ? 0.0 : std::max(0.0, centre - half), k == n ? 1.0 : std::min(1.0, centre + half)};
}

}  // namespace chaoslab
