#pragma once

#include "chaoslab/ensemble.hpp"
#include "chaoslab/structured_ops.hpp"

#include <vector>

namespace chaoslab {

struct BasisPursuitOptions {
  int max_iter = 5000;
  double rho = 1.0;
  double tolerance = 1e-8;
};

struct BasisPursuitOutcome {
  /// The last affine-projection iterate, so it is feasible to rounding.
  CVector solution;
  double residual = 0.0;  // ||Phi z - y||_2
  int iterations = 0;
  bool converged = false;
  /// Set when Phi Phi^* was not numerically positive definite and a 1e-12
  /// ridge was added before factoring.
  bool ridge_added = false;
};

/// min ||z||_1 subject to Phi z = y by ADMM: w = P(z - u), z = shrink(w + u, 1/rho),
/// u += w - z, where P projects onto the affine set with Phi Phi^* factored once.
/// Converged when ||w - z|| and the successive gap are both <= tolerance.
BasisPursuitOutcome basis_pursuit(const MeasurementOperator& op, const CVector& y,
                                  const BasisPursuitOptions& options = {});
BasisPursuitOutcome basis_pursuit(const Matrix& phi, const Vector& y, const BasisPursuitOptions& options = {});

/// v * max(1 - tau/|v|, 0), elementwise (modulus shrinkage for complex entries).
CVector shrink(const CVector& v, double tau);

struct TrialOutcome {
  bool success = false;
  bool converged = false;
  double error = 0.0;  // ||z - x||_2
  int iterations = 0;
};

/// Draws Phi and an s-sparse unit-norm x (uniform support, Gaussian values,
/// complex for gabor; flat unit-modulus values when flat_values is set),
/// solves from y = Phi x, succeeds when ||z - x||_2 <= 1e-4.
TrialOutcome recovery_trial(const EnsembleSpec& ensemble, std::size_t s, const RngStream& stream,
                            const BasisPursuitOptions& options = {}, bool flat_values = false);

struct PhaseCell {
  std::size_t m = 0;
  std::size_t s = 0;
  std::size_t successes = 0;
  std::size_t trials = 0;
  std::size_t nonconverged = 0;
  double rate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Row-major over (m, s): cells[i * s_grid.size() + j].
std::vector<PhaseCell> phase_transition(const EnsembleSpec& ensemble, const std::vector<std::size_t>& m_grid,
                                        const std::vector<std::size_t>& s_grid, std::size_t trials,
                                        const RngStream& stream, const BasisPursuitOptions& options = {});

}  // namespace chaoslab
