#include "doctest.h"

#include "chaoslab/norms.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace chaoslab;

namespace {

Matrix gaussian(Eigen::Index r, Eigen::Index c, RngStream& s) {
  Matrix a(r, c);
  const Vector v = sample_gaussian(static_cast<std::size_t>(r * c), s);
  std::copy(v.data(), v.data() + v.size(), a.data());
  return a;
}

// Random points on the l_p unit sphere, maximizing ||A x||_q.
double sphere_search(const Matrix& a, double p, double q, std::size_t points, RngStream& s) {
  double best = 0;
  for (std::size_t i = 0; i < points; ++i) {
    Vector x = sample_gaussian(static_cast<std::size_t>(a.cols()), s);
    x /= lp_norm(x, p);
    best = std::max(best, lp_norm(Vector(a * x), q));
  }
  return best;
}

}  // namespace

TEST_CASE("exact norms against extended precision") {
  RngStream s(1, {"exact"});
  const Matrix a = gaussian(5, 7, s);
  long double fro = 0, max_row = 0, max_entry = 0;
  for (Eigen::Index i = 0; i < 5; ++i) {
    long double row = 0;
    for (Eigen::Index j = 0; j < 7; ++j) {
      const long double v = a(i, j);
      row += v * v;
      max_entry = std::max(max_entry, std::abs(v));
    }
    fro += row;
    max_row = std::max(max_row, std::sqrt(row));
  }
  const ExactNorms n = exact_norms(a);
  CHECK(n.frobenius == doctest::Approx(static_cast<double>(std::sqrt(fro))).epsilon(1e-14));
  CHECK(n.l2_to_inf == doctest::Approx(static_cast<double>(max_row)).epsilon(1e-14));
  CHECK(n.max_entry == static_cast<double>(max_entry));
  CHECK(n.l1_to_inf() == n.max_entry);
  CHECK(n.lp_l2(2.0) == doctest::Approx(n.frobenius).epsilon(1e-14));
  CHECK(n.lp_l2(kInf) == n.l2_to_inf);
}

TEST_CASE("spectral norm against the eigenvalues of A^T A") {
  RngStream s(2, {"spectral"});
  const Matrix a = gaussian(6, 6, s);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(a.transpose() * a);
  const SpectralNorm sn = spectral_norm(a);
  CHECK(sn.value == doctest::Approx(std::sqrt(eig.eigenvalues().maxCoeff())).epsilon(1e-12));
  CHECK(sn.method == "svd");
  CHECK(sn.converged);
}

TEST_CASE("spectral norm by power iteration on a large matrix") {
  RngStream s(3, {"power"});
  Vector u = sample_gaussian(600, s), v = sample_gaussian(520, s);
  const Matrix a = u * v.transpose() + 0.01 * gaussian(600, 520, s);
  const SpectralNorm sn = spectral_norm(a);
  CHECK(sn.method == "power_iteration");
  CHECK(sn.converged);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(a.transpose() * a, Eigen::EigenvaluesOnly);
  CHECK(sn.value == doctest::Approx(std::sqrt(eig.eigenvalues().maxCoeff())).epsilon(1e-8));
}

TEST_CASE("mixed norm of a rank one matrix") {
  RngStream s(4, {"rank1"});
  const Vector u = sample_gaussian(6, s), v = sample_gaussian(5, s);
  const Matrix a = u * v.transpose();
  for (double q : {2.0, 3.0, 4.0, kInf}) {
    const double exact = lp_norm(u, q) * v.norm();
    const NormInterval iv = mixed_norm_interval(a, q);
    CHECK(iv.lo == doctest::Approx(exact).epsilon(1e-8));
    CHECK(iv.hi >= exact * (1 - 1e-12));
    CHECK(iv.lo <= iv.hi * (1 + 1e-12));
  }
  CHECK(mixed_norm_interval(a, 2.0).method == IntervalMethod::exact);
  CHECK(mixed_norm_interval(a, 3.0).method == IntervalMethod::restart_ascent_plus_interpolation);
  CHECK_THROWS_AS(mixed_norm_interval(a, 1.5), std::invalid_argument);
}

TEST_CASE("mixed and dual pair norms bracket a random search") {
  RngStream s(5, {"search"});
  const Matrix a = gaussian(4, 4, s);
  const AlphaShape shape(1.5);
  const double q = shape.alpha_star();

  const NormInterval mixed = mixed_norm_interval(a, q);
  const double mixed_search = sphere_search(a, 2.0, q, 100000, s);
  CHECK(mixed.lo >= mixed_search * (1 - 1e-9));
  CHECK(mixed.hi >= mixed.lo);

  // sup over y in the l_alpha ball of y^T A x is ||A x||_{alpha*}.
  const NormInterval dual = dual_pair_norm_interval(a, shape);
  const double dual_search = sphere_search(a, shape.alpha(), q, 100000, s);
  CHECK(dual.lo >= dual_search * (1 - 1e-9));
  CHECK(dual.hi >= dual.lo);
  CHECK(dual.lo <= dual_search * 1.02);
}

TEST_CASE("dual pair endpoints are exact at alpha 1 and 2") {
  RngStream s(6, {"ends"});
  const Matrix a = gaussian(5, 5, s);
  const NormInterval one = dual_pair_norm_interval(a, AlphaShape(1.0));
  CHECK(one.lo == exact_norms(a).max_entry);
  CHECK(one.hi == one.lo);
  const NormInterval two = dual_pair_norm_interval(a, AlphaShape(2.0));
  CHECK(two.lo == doctest::Approx(spectral_norm(a).value).epsilon(1e-12));
  CHECK(two.width() <= 1e-12 * two.hi);
}

TEST_CASE("complex inputs") {
  RngStream s(7, {"complex"});
  CMatrix a(3, 4);
  a.real() = gaussian(3, 4, s);
  a.imag() = gaussian(3, 4, s);
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(a.adjoint() * a);
  CHECK(spectral_norm(a).value == doctest::Approx(std::sqrt(eig.eigenvalues().maxCoeff())).epsilon(1e-12));
  CHECK(exact_norms(a).frobenius == doctest::Approx(a.norm()).epsilon(1e-14));
}

TEST_CASE("non-finite input is rejected") {
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = std::nan("");
  CHECK_THROWS_AS(exact_norms(a), std::invalid_argument);
  CHECK_THROWS_AS(spectral_norm(a), std::invalid_argument);
}
