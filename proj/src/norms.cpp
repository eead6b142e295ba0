#include "chaoslab/norms.hpp"

#include "chaoslab/parallel.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

namespace chaoslab {

namespace {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

double magnitude(double v) { return std::abs(v); }
double magnitude(const Complex& v) { return std::abs(v); }

/// Unit-modulus factor of v (0 maps to 0).
double phase_of(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }
Complex phase_of(const Complex& v) {
  const double r = std::abs(v);
  return r > 0 ? v / r : Complex(0.0, 0.0);
}

template <typename Scalar>
ExactNorms exact_norms_impl(const Mat<Scalar>& a) {
  if (!a.allFinite()) throw std::invalid_argument("exact_norms: non-finite entries");
  ExactNorms out;
  out.row_norms = a.rowwise().norm();
  out.frobenius = a.norm();
  out.max_entry = a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
  out.l2_to_inf = out.row_norms.size() == 0 ? 0.0 : out.row_norms.maxCoeff();
  return out;
}

template <typename Scalar>
Vec<Scalar> random_direction(Eigen::Index n, RngStream& stream) {
  std::normal_distribution<double> normal;
  Vec<Scalar> v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if constexpr (std::is_same_v<Scalar, Complex>) {
      const double re = normal(stream);
      const double im = normal(stream);
      v(i) = Complex(re, im);
    } else {
      v(i) = normal(stream);
    }
  }
  return v;
}

template <typename Scalar>
SpectralNorm spectral_norm_impl(const Mat<Scalar>& a) {
  if (!a.allFinite()) throw std::invalid_argument("spectral_norm: non-finite entries");
  SpectralNorm out;
  if (a.size() == 0) {
    out.method = "svd";
    return out;
  }
  if (std::min(a.rows(), a.cols()) <= 512) {
    Eigen::BDCSVD<Mat<Scalar>> svd(a);
    out.value = svd.singularValues()(0);
    out.method = "svd";
    return out;
  }
  out.method = "power_iteration";
  RngStream stream(0x73706563ULL, {"spectral_norm", "power"});
  Vec<Scalar> x = random_direction<Scalar>(a.cols(), stream);
  x.normalize();
  double lambda = 0.0;
  out.converged = false;
  for (int it = 1; it <= 10000; ++it) {
    Vec<Scalar> y = a.adjoint() * (a * x);
    const double next = y.norm();
    out.iterations = it;
    if (next == 0.0) {
      lambda = 0.0;
      out.converged = true;
      break;
    }
    x = y / next;
    if (std::abs(next - lambda) <= 1e-10 * next) {
      lambda = next;
      out.converged = true;
      break;
    }
    lambda = next;
  }
  out.value = std::sqrt(lambda);
  return out;
}

/// Maximizer of Re<y, v> over the unit ball of the l_{p*} norm, where p is the
/// norm measured on v: y_i = phase(v_i) |v_i|^{p-1} / ||v||_p^{p-1}.
template <typename Scalar>
Vec<Scalar> dual_alignment(const Vec<Scalar>& v, double p) {
  const double norm = lp_norm(v, p);
  Vec<Scalar> y = Vec<Scalar>::Zero(v.size());
  if (norm == 0.0) return y;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double r = magnitude(v(i)) / norm;
    if (r > 0) y(i) = phase_of(v(i)) * std::pow(r, p - 1.0);
  }
  return y;
}

/// Alternating ascent for sup ||A x||_q over the unit sphere of l_{source_p}.
/// The x-update maximizes Re<x, A* y> over the l_{source_p} ball, i.e. aligns
/// with A* y in the dual exponent source_p*.
template <typename Scalar>
double ascent(const Mat<Scalar>& a, double source_p, double q, const AscentOptions& options) {
  const double source_dual = conjugate_exponent(source_p);
  std::vector<double> best(static_cast<std::size_t>(std::max(options.restarts, 1)), 0.0);
  parallel_for(best.size(), [&](std::size_t r) {
    RngStream stream(options.seed, {"norm-ascent", std::to_string(r)});
    Vec<Scalar> x = random_direction<Scalar>(a.cols(), stream);
    const double nx = lp_norm(x, source_p);
    if (nx == 0.0) return;
    x /= nx;
    double value = lp_norm(Vec<Scalar>(a * x), q);
    for (int it = 0; it < options.max_iterations; ++it) {
      const Vec<Scalar> v = a * x;
      if (v.norm() == 0.0) break;  // zero image: keep the previous iterate
      const Vec<Scalar> y = dual_alignment<Scalar>(v, q);
      const Vec<Scalar> w = a.adjoint() * y;
      if (w.norm() == 0.0) break;
      Vec<Scalar> x_next = dual_alignment<Scalar>(w, source_dual);
      const double next_value = lp_norm(Vec<Scalar>(a * x_next), q);
      if (!(next_value > value)) break;
      const bool done = next_value - value <= options.tolerance * next_value;
      x = std::move(x_next);
      value = next_value;
      if (done) break;
    }
    best[r] = value;
  });
  return *std::max_element(best.begin(), best.end());
}

template <typename Scalar>
NormInterval mixed_norm_impl(const Mat<Scalar>& a, double q, const AscentOptions& options) {
  if (!(q >= 2.0)) throw std::invalid_argument("mixed_norm_interval: q must be >= 2");
  NormInterval out;
  if (std::isinf(q)) {
    out.lo = out.hi = exact_norms_impl(a).l2_to_inf;
    out.method = IntervalMethod::exact;
    return out;
  }
  const SpectralNorm spectral = spectral_norm_impl(a);
  if (q == 2.0) {
    out.lo = out.hi = spectral.value;
    out.method = spectral.method == "svd" ? IntervalMethod::exact : IntervalMethod::power_iteration;
    return out;
  }
  const double s = spectral.value;
  const double r = exact_norms_impl(a).l2_to_inf;
  out.hi = std::min(s, std::pow(s, 2.0 / q) * std::pow(r, 1.0 - 2.0 / q));
  out.lo = ascent(a, 2.0, q, options);
  out.hi = std::max(out.hi, out.lo);  // rounding only; lo is an attained value
  out.method = IntervalMethod::restart_ascent_plus_interpolation;
  return out;
}

template <typename Scalar>
NormInterval dual_pair_impl(const Mat<Scalar>& a, const AlphaShape& alpha, const AscentOptions& options) {
  NormInterval out;
  if (alpha.alpha() == 1.0) {
    out.lo = out.hi = exact_norms_impl(a).max_entry;
    out.method = IntervalMethod::exact;
    return out;
  }
  if (alpha.alpha() == 2.0) return mixed_norm_impl(a, 2.0, options);
  out.hi = mixed_norm_impl(a, alpha.alpha_star(), options).hi;
  out.lo = ascent(a, alpha.alpha(), alpha.alpha_star(), options);
  out.hi = std::max(out.hi, out.lo);
  out.method = IntervalMethod::restart_ascent_plus_interpolation;
  return out;
}

}  // namespace

std::string to_string(IntervalMethod method) {
  switch (method) {
    case IntervalMethod::exact: return "exact";
    case IntervalMethod::power_iteration: return "power_iteration";
    case IntervalMethod::restart_ascent_plus_interpolation: return "restart_ascent_plus_interpolation";
  }
  return "?";
}

ExactNorms exact_norms(const Matrix& a) { return exact_norms_impl(a); }
ExactNorms exact_norms(const CMatrix& a) { return exact_norms_impl(a); }
SpectralNorm spectral_norm(const Matrix& a) { return spectral_norm_impl(a); }
SpectralNorm spectral_norm(const CMatrix& a) { return spectral_norm_impl(a); }

NormInterval mixed_norm_interval(const Matrix& a, double q, const AscentOptions& options) {
  return mixed_norm_impl(a, q, options);
}
NormInterval mixed_norm_interval(const CMatrix& a, double q, const AscentOptions& options) {
  return mixed_norm_impl(a, q, options);
}
NormInterval dual_pair_norm_interval(const Matrix& a, const AlphaShape& alpha, const AscentOptions& options) {
  return dual_pair_impl(a, alpha, options);
}
NormInterval dual_pair_norm_interval(const CMatrix& a, const AlphaShape& alpha, const AscentOptions& options) {
  return dual_pair_impl(a, alpha, options);
}

}  // namespace chaoslab
