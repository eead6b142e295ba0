#include "doctest.h"

#include "chaoslab/ensemble.hpp"
#include "chaoslab/structured_ops.hpp"

#include <cmath>
#include <numeric>

using namespace chaoslab;

namespace {

Vector naive_convolution(const Vector& z, const Vector& x) {
  const Eigen::Index n = z.size();
  Vector out = Vector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) out(j) += z(((j - k) % n + n) % n) * x(k);
  return out;
}

// Row-restricted circulant H_{jk} = z_{(j-k) mod n}, scaled by 1/sqrt(m).
Matrix circulant_oracle(const Vector& z, const std::vector<std::size_t>& omega) {
  const Eigen::Index n = z.size();
  const auto m = static_cast<Eigen::Index>(omega.size());
  Matrix out(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index k = 0; k < n; ++k)
      out(i, k) = z(((static_cast<Eigen::Index>(omega[i]) - k) % n + n) % n) / std::sqrt(static_cast<double>(m));
  return out;
}

// Columns pi(k,l)h, (pi(k,l)h)_j = e^{2 pi i l j/m} h_{(j-k) mod m}, lambda = k*m + l.
CMatrix gabor_oracle(const CVector& h) {
  const Eigen::Index m = h.size();
  CMatrix out(m, m * m);
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index l = 0; l < m; ++l)
      for (Eigen::Index j = 0; j < m; ++j)
        out(j, k * m + l) = std::polar(1.0, 2.0 * M_PI * static_cast<double>(l * j) / static_cast<double>(m)) *
                            h(((j - k) % m + m) % m);
  return out;
}

CVector complex_gaussian(std::size_t n, RngStream& s) {
  const Vector re = sample_gaussian(n, s), im = sample_gaussian(n, s);
  CVector out(static_cast<Eigen::Index>(n));
  out.real() = re;
  out.imag() = im;
  return out;
}

std::vector<std::size_t> first_rows(std::size_t m) {
  std::vector<std::size_t> omega(m);
  std::iota(omega.begin(), omega.end(), std::size_t{0});
  return omega;
}

}  // namespace

TEST_CASE("circular convolution matches the double loop") {
  RngStream s(1, {"conv"});
  for (std::size_t n : {1u, 2u, 7u, 64u, 100u}) {
    const Vector z = sample_gaussian(n, s), x = sample_gaussian(n, s);
    CHECK((circular_convolve(z, x) - naive_convolution(z, x)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((circular_convolve_naive(z, x) - naive_convolution(z, x)).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(circular_convolve(Vector::Ones(3), Vector::Ones(4)), std::invalid_argument);
}

TEST_CASE("correlation is the transpose of convolution") {
  RngStream s(2, {"corr"});
  const Vector z = sample_gaussian(33, s), x = sample_gaussian(33, s), u = sample_gaussian(33, s);
  CHECK(circular_convolve(z, x).dot(u) == doctest::Approx(x.dot(circular_correlate(z, u))).epsilon(1e-12));
}

TEST_CASE("partial circulant against the dense definition") {
  RngStream s(3, {"pc"});
  const Vector z = sample_gaussian(64, s), x = sample_gaussian(64, s), v = sample_gaussian(5, s);
  const std::vector<std::size_t> omega{0, 3, 17, 40, 63};
  const PartialCirculantSpec spec(z, omega);
  const Matrix oracle = circulant_oracle(z, omega);
  CHECK((apply_partial_circulant(spec, x) - oracle * x).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((adjoint_partial_circulant(spec, v) - oracle.transpose() * v).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((dense_partial_circulant(spec) - oracle).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(PartialCirculantSpec(z, {3, 1}), std::invalid_argument);
  CHECK_THROWS_AS(PartialCirculantSpec(z, {64}), std::invalid_argument);
}

TEST_CASE("partial circulant preserves norms in expectation") {
  RngStream s(4, {"isotropy"});
  Vector x = sample_gaussian(32, s);
  x /= x.norm();
  const std::size_t trials = 10000;
  double sum = 0, sum2 = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Vector z = sample_gaussian(32, s);
    const double v = apply_partial_circulant(PartialCirculantSpec(z, first_rows(8)), x).squaredNorm();
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / trials, se = std::sqrt((sum2 / trials - mean * mean) / trials);
  CHECK(std::abs(mean - 1.0) < 3 * se);
}

TEST_CASE("gabor synthesis against the dense definition") {
  RngStream s(5, {"gabor"});
  const CVector h = complex_gaussian(8, s), x = complex_gaussian(64, s), v = complex_gaussian(8, s);
  const GaborSpec spec(h);
  const CMatrix oracle = gabor_oracle(h);
  CHECK((gabor_apply(spec, x) - oracle * x).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((gabor_adjoint(spec, v) - oracle.adjoint() * v).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((dense_gabor(spec) - oracle).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((gabor_column(spec, 19) - oracle.col(19)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((time_frequency_shift(8, 2, 5) * h - oracle.col(2 * 8 + 5)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("V_x for circulant measurements") {
  RngStream s(6, {"vx"});
  const Vector x = sample_gaussian(32, s), eta = sample_gaussian(32, s);
  const auto omega = first_rows(8);
  const VxOperator vx = build_vx_circulant(x, omega);
  CHECK(vx.frobenius() == doctest::Approx(x.norm()).epsilon(1e-12));
  CHECK((vx.real() * eta - circulant_oracle(eta, omega) * x).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("V_x for gabor measurements") {
  RngStream s(7, {"vx_gabor"});
  const CVector x = complex_gaussian(64, s), eta = complex_gaussian(8, s);
  const VxOperator vx = build_vx_gabor(x);
  CHECK(vx.frobenius() == doctest::Approx(x.norm()).epsilon(1e-12));
  CHECK((vx.matrix * eta - gabor_oracle(eta / std::sqrt(8.0)) * x).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(build_vx_gabor(CVector::Ones(10)), std::invalid_argument);
}

TEST_CASE("measurement operators agree with their dense forms") {
  RngStream s(8, {"ops"});
  const SamplerSpec gauss{SamplerKind::gaussian, AlphaShape(2.0), false, 0};
  for (auto kind : {EnsembleKind::dense, EnsembleKind::partial_circulant, EnsembleKind::gabor,
                    EnsembleKind::identity}) {
    EnsembleSpec e{kind, 16, 4, gauss};
    const MeasurementOperator op = e.draw(s);
    CHECK(op.rows() == 4);
    CHECK(op.cols() == e.columns());
    CHECK(op.is_real() == !e.complex_field());
    const CVector x = complex_gaussian(op.cols(), s), v = complex_gaussian(op.rows(), s);
    const CMatrix d = op.dense_complex();
    CHECK((op.apply(x) - d * x).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((op.adjoint_apply(v) - d.adjoint() * v).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((op.column(3) - d.col(3)).cwiseAbs().maxCoeff() < 1e-12);
    if (!op.is_real()) {
      CHECK_THROWS_AS(op.dense_real(), std::logic_error);
    }
  }
  CHECK(EnsembleSpec{EnsembleKind::gabor, 0, 5, gauss}.columns() == 25);
}

TEST_CASE("dense ensemble columns have unit second moment") {
  RngStream s(9, {"dense"});
  const SamplerSpec spec{SamplerKind::weibull_symmetric, AlphaShape(1.0), true, 0};
  const std::size_t trials = 10000;
  double sum = 0, sum2 = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const double v = dense_ensemble(8, 4, spec, s).column(2).squaredNorm();
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / trials, se = std::sqrt((sum2 / trials - mean * mean) / trials);
  CHECK(std::abs(mean - 1.0) < 3 * se);
}

TEST_CASE("ensemble names round trip") {
  for (auto k : {EnsembleKind::dense, EnsembleKind::partial_circulant, EnsembleKind::gabor, EnsembleKind::identity})
    CHECK(ensemble_kind_from_string(to_string(k)) == k);
  for (auto k : {SamplerKind::weibull_symmetric, SamplerKind::alpha_density, SamplerKind::rademacher,
                 SamplerKind::gaussian})
    CHECK(sampler_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(ensemble_kind_from_string("nope"), std::invalid_argument);
}
