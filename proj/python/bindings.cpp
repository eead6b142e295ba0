#include "chaoslab/chaining.hpp"
#include "chaoslab/chaos_lab.hpp"
#include "chaoslab/ensemble.hpp"
#include "chaoslab/io.hpp"
#include "chaoslab/norms.hpp"
#include "chaoslab/parallel.hpp"
#include "chaoslab/recovery.hpp"
#include "chaoslab/rip_lab.hpp"
#include "chaoslab/samplers.hpp"
#include "chaoslab/structured_ops.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pybind11::literals;
using namespace chaoslab;

namespace {

RngStream stream(std::uint64_t seed, const std::vector<std::string>& path) {
  return RngStream(seed, path.empty() ? std::vector<std::string>{"python"} : path);
}

SamplerSpec sampler(const std::string& kind, double alpha, bool standardized) {
  return {sampler_kind_from_string(kind), AlphaShape(alpha), standardized, 0.0};
}

py::dict interval(const NormInterval& iv) {
  return py::dict("lo"_a = iv.lo, "hi"_a = iv.hi, "method"_a = to_string(iv.method));
}

CoverModel cover_model(const std::string& kind, double s, double n, double m, double c_cov) {
  if (kind == "sparse_ball") return CoverModel::sparse_ball(s, n);
  if (kind == "euclidean_ball") return CoverModel::euclidean_ball(n);
  if (kind == "circulant") return CoverModel::circulant_family(s, n, m, c_cov);
  if (kind == "gabor") return CoverModel::gabor_family(s, m, c_cov);
  throw std::invalid_argument("unknown cover model: " + kind);
}

MeasurementOperator as_operator(const py::object& phi) {
  if (py::isinstance<py::array>(phi) && py::array(phi).dtype().kind() == 'c') {
    return MeasurementOperator::explicit_complex(phi.cast<CMatrix>());
  }
  return MeasurementOperator::explicit_real(phi.cast<Matrix>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "chaoslab core: samplers, structured measurements, chaos bounds, RIP and recovery";

  m.def("set_num_threads", &set_num_threads, "threads"_a);
  m.def("num_threads", &num_threads);

  m.def(
      "sample",
      [](const std::string& kind, double alpha, std::size_t n, std::uint64_t seed, bool standardized,
         const std::vector<std::string>& path) {
        return sample_blocks(sampler(kind, alpha, standardized), n, stream(seed, path));
      },
      "kind"_a, "alpha"_a, "n"_a, "seed"_a = 0, "standardized"_a = false, "path"_a = std::vector<std::string>{});
  m.def(
      "psi_alpha_norm",
      [](const Vector& x, double alpha) {
        return estimate_psi_alpha_norm(std::span<const double>(x.data(), x.size()), AlphaShape(alpha));
      },
      "samples"_a, "alpha"_a);

  m.def("circular_convolve", &circular_convolve, "z"_a, "x"_a);
  m.def(
      "partial_circulant",
      [](const Vector& z, const std::vector<std::size_t>& omega) {
        return dense_partial_circulant(PartialCirculantSpec(z, omega));
      },
      "z"_a, "omega"_a);
  m.def(
      "gabor_matrix", [](const CVector& h) { return dense_gabor(GaborSpec(h)); }, "h"_a);
  m.def(
      "vx_circulant",
      [](const Vector& x, const std::vector<std::size_t>& omega) { return build_vx_circulant(x, omega).real(); },
      "x"_a, "omega"_a);
  m.def(
      "vx_gabor", [](const CVector& x) { return build_vx_gabor(x).matrix; }, "x"_a);

  m.def(
      "exact_norms",
      [](const Matrix& a) {
        const ExactNorms n = exact_norms(a);
        return py::dict("frobenius"_a = n.frobenius, "max_entry"_a = n.max_entry, "l2_to_inf"_a = n.l2_to_inf,
                        "row_norms"_a = n.row_norms);
      },
      "a"_a);
  m.def(
      "spectral_norm", [](const Matrix& a) { return spectral_norm(a).value; }, "a"_a);
  m.def(
      "mixed_norm_interval", [](const Matrix& a, double q) { return interval(mixed_norm_interval(a, q)); }, "a"_a,
      "q"_a);
  m.def(
      "dual_pair_norm_interval",
      [](const Matrix& a, double alpha) { return interval(dual_pair_norm_interval(a, AlphaShape(alpha))); }, "a"_a,
      "alpha"_a);

  m.def(
      "chaos_samples",
      [](const Matrix& a, const std::string& kind, double alpha, std::size_t count, std::uint64_t seed,
         bool standardized, bool decoupled) {
        const SamplerSpec src = sampler(kind, alpha, standardized);
        const RngStream s = stream(seed, {"chaos"});
        const ChaosSampleSet set = decoupled ? decoupled_samples(a, src, count, s) : chaos_samples(a, src, count, s);
        return Vector(Eigen::Map<const Vector>(set.values.data(), static_cast<Eigen::Index>(set.values.size())));
      },
      "a"_a, "kind"_a, "alpha"_a, "count"_a, "seed"_a = 0, "standardized"_a = true, "decoupled"_a = false);
  m.def(
      "decoupled_moment_formula",
      [](const Matrix& a, double alpha, double p) {
        const MomentFormula f = decoupled_moment_formula(a, AlphaShape(alpha), p);
        return py::dict("five_term"_a = f.five_term, "two_term"_a = f.two_term, "terms"_a = f.terms);
      },
      "a"_a, "alpha"_a, "p"_a);
  m.def(
      "hw_phi2", [](const Matrix& a, double alpha, double t) { return hw_phi2(a, AlphaShape(alpha), t); }, "a"_a,
      "alpha"_a, "t"_a);

  m.def(
      "log_cover",
      [](const std::string& kind, double u, double s, double n, double m, double c_cov) {
        return log_cover(cover_model(kind, s, n, m, c_cov), u);
      },
      "kind"_a, "u"_a, "s"_a = 1.0, "n"_a = 1.0, "m"_a = 1.0, "c_cov"_a = 1.0);
  m.def(
      "dudley_gamma",
      [](double alpha, const std::string& kind, double u_max, double s, double n, double m, double c_cov) {
        return dudley_gamma(alpha, cover_model(kind, s, n, m, c_cov), u_max);
      },
      "alpha"_a, "kind"_a, "u_max"_a, "s"_a = 1.0, "n"_a = 1.0, "m"_a = 1.0, "c_cov"_a = 1.0);
  m.def("closed_form_gamma", &closed_form_gamma, "alpha"_a, "s"_a, "n"_a, "m"_a, "constant"_a = 1.0);
  m.def(
      "sample_complexity",
      [](double alpha, double s, double n, double delta, double c1) {
        const SampleComplexity c = sample_complexity(alpha, s, n, delta, c1);
        return py::dict("f1"_a = c.f1, "f2"_a = c.f2, "m_required"_a = c.m_required);
      },
      "alpha"_a, "s"_a, "n"_a, "delta"_a = 0.5, "c1"_a = 1.0);

  m.def(
      "delta_s",
      [](const py::object& phi, std::size_t s, std::size_t mc_trials, std::uint64_t seed) {
        const MeasurementOperator op = as_operator(phi);
        const RipResult r = mc_trials ? delta_s_mc_lower(op, s, mc_trials, stream(seed, {"rip"})) : delta_s_exact(op, s);
        return py::dict("delta"_a = r.delta, "method"_a = to_string(r.method),
                        "supports_examined"_a = r.supports_examined, "support"_a = r.witness_support,
                        "witness"_a = r.witness);
      },
      "phi"_a, "s"_a, "mc_trials"_a = 0, "seed"_a = 0,
      "Exact delta_s, or a Monte Carlo lower estimate over mc_trials random supports when mc_trials > 0.");

  m.def(
      "basis_pursuit",
      [](const py::object& phi, const py::object& y, int max_iter, double tolerance) {
        BasisPursuitOptions o;
        o.max_iter = max_iter;
        o.tolerance = tolerance;
        const BasisPursuitOutcome r = basis_pursuit(as_operator(phi), y.cast<CVector>(), o);
        py::object sol = py::cast(r.solution);
        if (r.solution.imag().cwiseAbs().maxCoeff() == 0.0) sol = py::cast(Vector(r.solution.real()));
        return py::dict("solution"_a = sol, "residual"_a = r.residual, "iterations"_a = r.iterations,
                        "converged"_a = r.converged);
      },
      "phi"_a, "y"_a, "max_iter"_a = 5000, "tolerance"_a = 1e-8);

  m.def(
      "phase_transition",
      [](const std::string& ensemble, std::size_t n, const std::vector<std::size_t>& m_grid,
         const std::vector<std::size_t>& s_grid, std::size_t trials, std::uint64_t seed, const std::string& entries,
         double alpha) {
        EnsembleSpec e{ensemble_kind_from_string(ensemble), n, m_grid.empty() ? 1 : m_grid.front(),
                       sampler(entries, alpha, entries == "weibull" || entries == "alpha_density")};
        py::list rows;
        for (const auto& c : phase_transition(e, m_grid, s_grid, trials, stream(seed, {"phase"}))) {
          rows.append(py::dict("m"_a = c.m, "s"_a = c.s, "successes"_a = c.successes, "trials"_a = c.trials,
                               "rate"_a = c.rate, "ci_lo"_a = c.ci_lo, "ci_hi"_a = c.ci_hi,
                               "nonconverged"_a = c.nonconverged));
        }
        return rows;
      },
      "ensemble"_a, "n"_a, "m_grid"_a, "s_grid"_a, "trials"_a, "seed"_a = 0, "entries"_a = "gaussian",
      "alpha"_a = 2.0);

  m.def(
      "git_blob_sha256", [](const py::bytes& b) { return git_blob_sha256(std::string(b)); }, "data"_a);
}
