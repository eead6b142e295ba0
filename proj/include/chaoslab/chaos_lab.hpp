#pragma once

#include "chaoslab/chaining.hpp"
#include "chaoslab/common.hpp"
#include "chaoslab/norms.hpp"
#include "chaoslab/samplers.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace chaoslab {

/// Draws of a centered chaos xi^T A xi - E xi^T A xi, or of a decoupled form
/// xi^T A xi' with an independent copy xi'.
struct ChaosSampleSet {
  std::string matrix_id;
  SamplerSpec source;
  bool decoupled = false;
  std::vector<double> values;

  std::size_t count() const { return values.size(); }
};

/// The centering is the exact mean Var(source) * trace(A), so raw
/// (non-standardized) sources are allowed as well. Samples are produced in
/// blocks of 4096 with one derived stream per block.
ChaosSampleSet chaos_samples(const Matrix& a, const SamplerSpec& source, std::size_t count,
                             const RngStream& stream, std::string matrix_id = {});
ChaosSampleSet decoupled_samples(const Matrix& a, const SamplerSpec& source, std::size_t count,
                                 const RngStream& stream, std::string matrix_id = {});

struct LpEstimate {
  double value = 0.0;
  /// false when p > ln N; the plug-in estimate is then dominated by a few draws.
  bool reliable = true;
};

/// (mean |x_i|^p)^{1/p}. Needs at least 100 samples.
LpEstimate empirical_lp(const ChaosSampleSet& set, double p);

struct TailCurve {
  std::vector<double> t;
  std::vector<double> empirical;  // fraction of |x_i| > t
  std::vector<double> bound;
};

/// t_grid must be nondecreasing; the result is then nonincreasing.
TailCurve empirical_tail(const ChaosSampleSet& set, const std::vector<double>& t_grid);

/// Norms entering the decoupled moment formula and the phi_2 exponent. The
/// hard ones are hi endpoints of their certified intervals.
struct ChaosNorms {
  double frobenius = 0.0;
  double spectral = 0.0;
  double lstar_l2 = 0.0;         // ||A||_{l_{alpha*}(l_2)}
  double two_to_star_hi = 0.0;   // hi of ||A||_{l_2 -> l_{alpha*}}
  double alpha_to_star_hi = 0.0; // hi of ||A||_{l_alpha -> l_{alpha*}}
};

ChaosNorms chaos_norms(const Matrix& a, const AlphaShape& alpha, const AscentOptions& options = {});

struct MomentFormula {
  double five_term = 0.0;
  double two_term = 0.0;
  std::array<double, 5> terms{};
};

/// five_term = p^{1/2}F + p S + p^{1/alpha} ||A||_{alpha*(2)} + p^{(alpha+2)/(2alpha)} ||A||_{2->alpha*}
///             + p^{2/alpha} ||A||_{alpha->alpha*};  two_term = p^{1/2}F + p^{2/alpha} S.
MomentFormula decoupled_moment_formula(const ChaosNorms& norms, const AlphaShape& alpha, double p);
MomentFormula decoupled_moment_formula(const Matrix& a, const AlphaShape& alpha, double p,
                                       const AscentOptions& options = {});

/// min{(t/F)^2, t/S, (t/N_{alpha*(2)})^alpha, (t/N_{2->alpha*})^{2alpha/(alpha+2)}, (t/N_{alpha->alpha*})^{alpha/2}}.
/// Zero norms give +inf.
double hw_phi2(const ChaosNorms& norms, const AlphaShape& alpha, double t);
/// Checks that A is symmetric; the zero matrix gives +inf.
double hw_phi2(const Matrix& a, const AlphaShape& alpha, double t, const AscentOptions& options = {});

struct MomentTail {
  double threshold_form1 = 0.0;  // e (m t + C_last)
  double bound_form1 = 0.0;      // e^{p0} exp(-min_k (t/C_k)^{1/beta_k})
  double threshold_form2 = 0.0;  // e (sum_k C_k t^{beta_k} + C_last)
  double bound_form2 = 0.0;      // e^{p0} e^{-t}
};

/// Converts a moment bound ||X||_p <= sum_k C_k p^{beta_k} + C_last (p >= p0)
/// into the two tail forms.
MomentTail moment_to_tail(const std::vector<double>& c, const std::vector<double>& beta, double c_last, double p0,
                          double t);

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
};

struct SupExpectations {
  McEstimate bilinear;  // E sup |eta^T A eta'|
  McEstimate aeta_2;    // E sup ||A eta||_2
  McEstimate aeta_star; // E sup ||A eta||_{alpha*}
  std::size_t family_size = 0;
};

/// Plug-in means of per-draw maxima over a finite family (a net standing in
/// for a possibly infinite set, so the estimates approach the true suprema
/// from below). For an m x n member, eta' has length n and eta length m in the
/// bilinear form; A eta uses the length-n draw.
SupExpectations sup_expectations(const std::vector<Matrix>& family, const SamplerSpec& source,
                                 const AlphaShape& alpha, std::size_t count, const RngStream& stream);

/// Unspecified constants of the deviation bounds, all defaulting to 1.
struct BoundConstants {
  double c_alpha = 1.0;   // C(alpha)
  double c1_alpha = 1.0;  // C_1(alpha)
  double psi_l = 1.0;     // L
};

enum class GammaSource { dudley, closed_form, given };

/// How Gamma(alpha, family) = gamma_2(., 2->2) + gamma_alpha(., 2->alpha*) is
/// obtained. Both functionals are taken against the 2->2 cover model, which is
/// valid because the 2->alpha* metric is dominated by the 2->2 one.
struct GammaInput {
  GammaSource source = GammaSource::dudley;
  /// dudley: model and diameter; when absent the model is the empirical greedy
  /// cover of the family itself in the 2->2 metric.
  std::optional<CoverModel> model;
  double u_max = 0.0;
  /// closed_form parameters.
  double s = 1.0, n = 1.0, m = 2.0, constant = 1.0;
  /// given.
  double gamma2 = 0.0, gamma_alpha = 0.0;
};

double gamma_functional(const GammaInput& input, const AlphaShape& alpha, const std::vector<Matrix>& family);

struct BoundReport {
  double m_f = 0.0;
  double m_22 = 0.0;
  double m_2star = 0.0;
  double gamma = 0.0;
  double t_a = 0.0;
  double u1 = 0.0, u2 = 0.0, u3 = 0.0, u2_prime = 0.0, u3_prime = 0.0;
  double sup_ata_frobenius = 0.0;
  SupExpectations expectations;
  BoundConstants constants;
  std::size_t net_size = 0;
};

struct DeviationCurvePoint {
  double t = 0.0;
  double threshold_14 = 0.0;  // C L^2 (E sup |eta^T A eta'| + t)
  double rhs_14 = 0.0;
  double threshold_16 = 0.0;  // C L^2 (U1 + t)
  double rhs_16 = 0.0;
};

struct DeviationSuite {
  BoundReport report;
  std::vector<DeviationCurvePoint> curve;
};

struct SuiteOptions {
  std::size_t mc_count = 10000;
  BoundConstants constants;
  AscentOptions ascent;
};

DeviationSuite deviation_bound_suite(const std::vector<Matrix>& family, const AlphaShape& alpha,
                                     const GammaInput& gamma, const std::vector<double>& t_grid,
                                     const RngStream& stream, const SuiteOptions& options = {});

struct DecouplingResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct BootstrapOptions {
  std::size_t blocks = 1000;
  std::size_t resamples = 1000;
  double level = 0.95;
};

/// lhs = mean |S_A(xi) - E S_A(xi)|^p, rhs = mean |C eta^T A eta'|^p, with a
/// block-bootstrap percentile interval for lhs/rhs. A = 0 gives all zeros.
DecouplingResult decoupling_check(const Matrix& a, const SamplerSpec& source_xi, const SamplerSpec& source_eta,
                                  double p, std::size_t count, double c, const RngStream& stream,
                                  const BootstrapOptions& bootstrap = {});

/// Same check on precomputed draws (chaos and decoupled sets of equal size).
DecouplingResult decoupling_check(const ChaosSampleSet& chaos, const ChaosSampleSet& decoupled, double p, double c,
                                  const RngStream& stream, const BootstrapOptions& bootstrap = {});

}  // namespace chaoslab
