#include "chaoslab/recovery.hpp"

#include "chaoslab/parallel.hpp"
#include "chaoslab/rip_lab.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace chaoslab {

namespace {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
Vec<Scalar> shrink_impl(const Vec<Scalar>& v, double tau) {
  Vec<Scalar> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double r = std::abs(v(i));
    out(i) = r > tau ? v(i) * (1.0 - tau / r) : Scalar(0);
  }
  return out;
}

template <typename Scalar>
BasisPursuitOutcome admm(const Mat<Scalar>& phi, const Vec<Scalar>& y, const BasisPursuitOptions& options) {
  if (phi.rows() != y.size()) throw std::invalid_argument("basis_pursuit: y length must equal row count");
  if (phi.rows() > phi.cols()) throw std::invalid_argument("basis_pursuit: need m <= n");
  BasisPursuitOutcome out;
  Mat<Scalar> gram = phi * phi.adjoint();
  Eigen::LLT<Mat<Scalar>> llt(gram);
  // LLT only flags negative pivots; a numerically singular Gram shows up as a
  // vanishing pivot instead.
  const auto degenerate = [&] {
    if (llt.info() != Eigen::Success) return true;
    const auto d = llt.matrixLLT().diagonal().real().cwiseAbs2();
    return d.minCoeff() <= 64 * std::numeric_limits<double>::epsilon() * d.maxCoeff();
  };
  if (degenerate()) {
    gram.diagonal().array() += 1e-12;
    llt.compute(gram);
    out.ridge_added = true;
    if (llt.info() != Eigen::Success) throw std::runtime_error("basis_pursuit: Phi Phi^* is singular");
  }
  const auto project = [&](const Vec<Scalar>& v) -> Vec<Scalar> {
    return v - phi.adjoint() * llt.solve(Vec<Scalar>(phi * v - y));
  };
  const Eigen::Index n = phi.cols();
  Vec<Scalar> z = Vec<Scalar>::Zero(n), u = Vec<Scalar>::Zero(n), w = project(z);
  const double tau = 1.0 / options.rho;
  for (int it = 1; it <= options.max_iter; ++it) {
    w = project(Vec<Scalar>(z - u));
    Vec<Scalar> z_next = shrink_impl<Scalar>(Vec<Scalar>(w + u), tau);
    u += w - z_next;
    const double gap = (z_next - z).norm();
    z = std::move(z_next);
    out.iterations = it;
    if ((w - z).norm() <= options.tolerance && gap <= options.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.solution = w.template cast<Complex>();
  out.residual = (phi * w - y).norm();
  return out;
}

}  // namespace

CVector shrink(const CVector& v, double tau) { return shrink_impl<Complex>(v, tau); }

BasisPursuitOutcome basis_pursuit(const MeasurementOperator& op, const CVector& y,
                                  const BasisPursuitOptions& options) {
  if (op.is_real()) {
    if (y.imag().cwiseAbs().maxCoeff() != 0.0) {
      // Real operator, complex data: real and imaginary parts decouple but the
      // l1 norm does not, so solve over the complex field.
      return admm<Complex>(op.dense_complex(), y, options);
    }
    return admm<double>(op.dense_real(), Vector(y.real()), options);
  }
  return admm<Complex>(op.dense_complex(), y, options);
}

BasisPursuitOutcome basis_pursuit(const Matrix& phi, const Vector& y, const BasisPursuitOptions& options) {
  return admm<double>(phi, y, options);
}

TrialOutcome recovery_trial(const EnsembleSpec& ensemble, std::size_t s, const RngStream& stream,
                            const BasisPursuitOptions& options, bool flat_values) {
  if (s > ensemble.m) throw std::invalid_argument("recovery_trial: need s <= m");
  RngStream op_stream = stream.child("op");
  const MeasurementOperator op = ensemble.draw(op_stream);
  RngStream xs = stream.child("signal");
  const std::size_t n = op.cols();
  const auto support = random_support(n, s, xs);
  CVector x = CVector::Zero(static_cast<Eigen::Index>(n));
  std::normal_distribution<double> normal;
  for (std::size_t k : support) {
    if (flat_values) {
      x(static_cast<Eigen::Index>(k)) = op.is_real() ? Complex(xs.sign(), 0.0)
                                                     : std::polar(1.0, 2.0 * M_PI * xs.uniform());
    } else if (op.is_real()) {
      x(static_cast<Eigen::Index>(k)) = normal(xs);
    } else {
      const double re = normal(xs);
      const double im = normal(xs);
      x(static_cast<Eigen::Index>(k)) = Complex(re, im);
    }
  }
  if (s > 0) x /= x.norm();
  const BasisPursuitOutcome bp = basis_pursuit(op, op.apply(x), options);
  TrialOutcome out;
  out.converged = bp.converged;
  out.iterations = bp.iterations;
  out.error = (bp.solution - x).norm();
  out.success = bp.converged && out.error <= 1e-4;
  return out;
}

std::vector<PhaseCell> phase_transition(const EnsembleSpec& ensemble, const std::vector<std::size_t>& m_grid,
                                        const std::vector<std::size_t>& s_grid, std::size_t trials,
                                        const RngStream& stream, const BasisPursuitOptions& options) {
  if (m_grid.empty() || s_grid.empty()) throw std::invalid_argument("phase_transition: grids must be nonempty");
  const std::size_t cells = m_grid.size() * s_grid.size();
  std::vector<TrialOutcome> outcomes(cells * trials);
  parallel_for(outcomes.size(), [&](std::size_t q) {
    const std::size_t cell = q / trials, t = q % trials;
    const std::size_t m = m_grid[cell / s_grid.size()], s = s_grid[cell % s_grid.size()];
    const RngStream ts = stream.child("m" + std::to_string(m)).child("s" + std::to_string(s)).child(t);
    outcomes[q] = recovery_trial(ensemble.with_rows(m), s, ts, options);
  });
  std::vector<PhaseCell> out(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    PhaseCell& pc = out[c];
    pc.m = m_grid[c / s_grid.size()];
    pc.s = s_grid[c % s_grid.size()];
    pc.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto& o = outcomes[c * trials + t];
      pc.successes += o.success;
      pc.nonconverged += !o.converged;
    }
    pc.rate = trials ? static_cast<double>(pc.successes) / static_cast<double>(trials) : 0.0;
    std::tie(pc.ci_lo, pc.ci_hi) = wilson_interval(pc.successes, trials);
  }
  return out;
}

}  // namespace chaoslab
