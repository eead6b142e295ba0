// Acceptance suite. `acceptance` runs every criterion; `acceptance 3 7` runs a
// subset. Prints one PASS/FAIL line per criterion and exits nonzero on any
// failure.

#include "chaoslab/chaining.hpp"
#include "chaoslab/chaos_lab.hpp"
#include "chaoslab/ensemble.hpp"
#include "chaoslab/io.hpp"
#include "chaoslab/recovery.hpp"
#include "chaoslab/rip_lab.hpp"
#include "chaoslab/samplers.hpp"
#include "chaoslab/structured_ops.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

using namespace chaoslab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

CVector complex_gaussian(std::size_t n, RngStream& s) {
  CVector out(static_cast<Eigen::Index>(n));
  out.real() = sample_gaussian(n, s);
  out.imag() = sample_gaussian(n, s);
  return out;
}

struct TestMatrix {
  std::string id;
  Matrix a;
};

std::vector<TestMatrix> chaos_matrices() {
  const int n = 16;
  const RngStream root(2024, {"acceptance", "matrices"});
  std::vector<TestMatrix> out;
  out.push_back({"I16", Matrix::Identity(n, n)});
  RngStream r = root.child("rank1");
  Vector u = sample_gaussian(n, r);
  u.normalize();
  out.push_back({"rank1", u * u.transpose()});
  RngStream g = root.child("symmetric");
  Matrix m(n, n);
  for (int j = 0; j < n; ++j) m.col(j) = sample_gaussian(n, g);
  out.push_back({"sym16", (m + m.transpose()) / 2});
  return out;
}

std::string alpha_tag(double a) { return fmt("%g", a); }

// ---------------------------------------------------------------------------

Outcome fft_convolution() {
  RngStream s(1, {"acceptance", "fft"});
  double worst = 0, fft_time = 0;
  for (std::size_t n : {64u, 1024u, 4096u}) {
    for (int c = 0; c < 100; ++c) {
      const Vector z = sample_gaussian(n, s), x = sample_gaussian(n, s);
      const auto t0 = Clock::now();
      const Vector fast = circular_convolve(z, x);
      fft_time += seconds_since(t0);
      const auto nn = static_cast<Eigen::Index>(n);
      for (Eigen::Index j = 0; j < nn; ++j) {
        double acc = 0;
        for (Eigen::Index k = 0; k < nn; ++k) acc += z((j - k + nn) % nn) * x(k);
        worst = std::max(worst, std::abs(acc - fast(j)));
      }
    }
  }
  return {worst <= 1e-9 && fft_time < 5.0, fmt("max_abs_err=%.3g fft_time=%.3fs", worst, fft_time)};
}

Outcome exchange_identities() {
  RngStream s(2, {"acceptance", "exchange"});
  double circ = 0, gab = 0;
  const Eigen::Index n = 64, m = 16;
  for (int c = 0; c < 100; ++c) {
    const Vector x = sample_gaussian(n, s), eta = sample_gaussian(n, s);
    std::vector<std::size_t> omega = random_support(n, m, s);
    // Phi_eta x = (1/sqrt m) sum_k eta_{(omega_i - k) mod n} x_k.
    Vector phi_x = Vector::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index k = 0; k < n; ++k)
        phi_x(i) += eta(((static_cast<Eigen::Index>(omega[i]) - k) % n + n) % n) * x(k);
    phi_x /= std::sqrt(static_cast<double>(m));
    circ = std::max(circ, (build_vx_circulant(x, omega).real() * eta - phi_x).cwiseAbs().maxCoeff());
  }
  const Eigen::Index g = 8;
  for (int c = 0; c < 100; ++c) {
    const CVector x = complex_gaussian(g * g, s), eta = complex_gaussian(g, s);
    const CVector h = eta / std::sqrt(static_cast<double>(g));
    // Psi_h x = sum_{k,l} x_{k g + l} e^{2 pi i l j / g} h_{(j - k) mod g}.
    CVector psi_x = CVector::Zero(g);
    for (Eigen::Index j = 0; j < g; ++j)
      for (Eigen::Index k = 0; k < g; ++k)
        for (Eigen::Index l = 0; l < g; ++l)
          psi_x(j) += x(k * g + l) * std::polar(1.0, 2 * M_PI * static_cast<double>(l * j) / g) *
                      h(((j - k) % g + g) % g);
    gab = std::max(gab, (build_vx_gabor(x).matrix * eta - psi_x).cwiseAbs().maxCoeff());
  }
  return {circ <= 1e-10 && gab <= 1e-10, fmt("circulant_err=%.3g gabor_err=%.3g", circ, gab)};
}

Outcome rip_oracle() {
  const SamplerSpec gauss{SamplerKind::gaussian, AlphaShape(2.0), false, 0};
  const int grid = 1000;  // real: 10^6 angles; complex: 10^3 x 10^3 (theta, phase)
  std::vector<double> c1(grid * grid), s1(grid * grid);
  for (int i = 0; i < grid * grid; ++i) {
    const double th = M_PI * i / (grid * grid);
    c1[i] = std::cos(th);
    s1[i] = std::sin(th);
  }
  double worst = 0;
  bool above = false;
  for (int inst = 0; inst < 40; ++inst) {
    const bool cx = inst >= 20;
    RngStream s(3, {"acceptance", "rip", std::to_string(inst)});
    const EnsembleSpec e{cx ? EnsembleKind::gabor : EnsembleKind::dense, 8, 3, gauss};
    const MeasurementOperator op = e.draw(s);
    const CMatrix phi = op.dense_complex();
    const CMatrix gram = phi.adjoint() * phi;
    const auto n = static_cast<Eigen::Index>(op.cols());
    double brute = 0;
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = a + 1; b < n; ++b) {
        const double gaa = gram(a, a).real(), gbb = gram(b, b).real();
        const Complex gab = gram(a, b);
        if (!cx) {
          for (int i = 0; i < grid * grid; ++i) {
            const double q = gaa * c1[i] * c1[i] + gbb * s1[i] * s1[i] + 2 * gab.real() * c1[i] * s1[i];
            brute = std::max(brute, std::abs(q - 1));
          }
        } else {
          // x = (cos t, e^{i p} sin t), t in [0, pi/2], p in [0, 2 pi).
          for (int i = 0; i <= grid; ++i) {
            const double t = M_PI / 2 * i / grid, ct = std::cos(t), st = std::sin(t);
            for (int j = 0; j < grid; ++j) {
              const double p = 2 * M_PI * j / grid;
              const double q = gaa * ct * ct + gbb * st * st +
                               2 * ct * st * (gab.real() * std::cos(p) - gab.imag() * std::sin(p));
              brute = std::max(brute, std::abs(q - 1));
            }
          }
        }
      }
    const double exact = delta_s_exact(op, 2).delta;
    worst = std::max(worst, std::abs(exact - brute));
    above = above || brute > exact + 1e-12;
  }
  double identity = 0;
  for (std::size_t s = 1; s <= 3; ++s)
    identity = std::max(identity, delta_s_exact(MeasurementOperator::explicit_real(Matrix::Identity(8, 8)), s).delta);
  Matrix dup = Matrix::Identity(3, 8);
  dup.col(5) = dup.col(0);
  const double dup_delta = delta_s_exact(MeasurementOperator::explicit_real(dup), 2).delta;
  return {worst <= 2e-3 && !above && identity == 0.0 && dup_delta == 1.0,
          fmt("max|exact-grid|=%.3g identity=%g duplicate=%.17g", worst, identity, dup_delta)};
}

Outcome sampler_moments() {
  const std::size_t n = 1000000;
  double worst_se = 0, worst_psi = 0;
  for (double alpha : {1.0, 1.5, 2.0}) {
    const SamplerSpec spec{SamplerKind::weibull_symmetric, AlphaShape(alpha), false, 0};
    const Vector x = sample_blocks(spec, n, RngStream(4, {"acceptance", "moments", alpha_tag(alpha)}));
    for (double p : {1.0, 2.0}) {
      double sum = 0, sum2 = 0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double v = std::pow(std::abs(x(i)), p);
        sum += v;
        sum2 += v * v;
      }
      const double mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / n);
      worst_se = std::max(worst_se, std::abs(mean - std::tgamma(1 + p / alpha)) / se);
    }
    const double psi = estimate_psi_alpha_norm(std::span<const double>(x.data(), x.size()), AlphaShape(alpha));
    worst_psi = std::max(worst_psi, std::abs(psi / std::pow(2.0, 1 / alpha) - 1));
  }
  return {worst_se <= 4 && worst_psi <= 0.05, fmt("worst_moment_dev=%.2f SE worst_psi_rel=%.4f", worst_se, worst_psi)};
}

Outcome moment_bracket() {
  const auto t0 = Clock::now();
  double lo = kInf, hi = 0;
  for (const auto& tm : chaos_matrices()) {
    for (double alpha : {1.0, 1.5, 2.0}) {
      const AlphaShape shape(alpha);
      const SamplerSpec src{SamplerKind::weibull_symmetric, shape, false, 0};
      const ChaosSampleSet set = decoupled_samples(
          tm.a, src, 1000000, RngStream(5, {"acceptance", "bracket", tm.id, alpha_tag(alpha)}), tm.id);
      const ChaosNorms norms = chaos_norms(tm.a, shape);
      for (double p : {2.0, 4.0, 8.0}) {
        const double r = empirical_lp(set, p).value / decoupled_moment_formula(norms, shape, p).five_term;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    }
  }
  const double t = seconds_since(t0);
  return {lo >= 1.0 / 32 && hi <= 32 && t < 180, fmt("ratio range [%.3f, %.3f] time=%.1fs", lo, hi, t)};
}

Outcome tail_domination() {
  const std::size_t n = 1000000;
  const double c1 = 2.0;
  struct Curve {
    std::string id;
    double alpha;
    TailCurve tail;
    ChaosNorms norms;
  };
  std::vector<Curve> curves;
  for (const auto& tm : chaos_matrices()) {
    for (double alpha : {1.0, 1.5, 2.0}) {
      const AlphaShape shape(alpha);
      const SamplerSpec src{SamplerKind::weibull_symmetric, shape, true, 0};
      const ChaosSampleSet set =
          chaos_samples(tm.a, src, n, RngStream(6, {"acceptance", "tails", tm.id, alpha_tag(alpha)}), tm.id);
      std::vector<double> mags(n);
      for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(set.values[i]);
      std::nth_element(mags.begin(), mags.begin() + static_cast<long>(0.999 * n), mags.end());
      const double t_max = mags[static_cast<std::size_t>(0.999 * n)];
      std::vector<double> grid(64);
      for (int i = 0; i < 64; ++i) grid[i] = t_max * i / 63.0;
      curves.push_back({tm.id, alpha, empirical_tail(set, grid), chaos_norms(tm.a, shape)});
    }
  }
  // Calibrate C2 once: the smallest value that dominates the I16, alpha = 2 curve.
  double c2 = 0;
  for (const auto& c : curves) {
    if (c.id != "I16" || c.alpha != 2.0) continue;
    for (std::size_t i = 0; i < c.tail.t.size(); ++i) {
      const double e = c.tail.empirical[i];
      if (e > 0) c2 = std::max(c2, hw_phi2(c.norms, AlphaShape(2.0), c.tail.t[i]) / std::log(c1 / e));
    }
  }
  double worst = 0;
  std::string where;
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.tail.t.size(); ++i) {
      const double e = c.tail.empirical[i], se = std::sqrt(e * (1 - e) / n);
      const double bound = c1 * std::exp(-hw_phi2(c.norms, AlphaShape(c.alpha), c.tail.t[i]) / c2);
      const double excess = (e - 3 * se) / bound;
      if (excess > worst) {
        worst = excess;
        where = c.id + " alpha=" + alpha_tag(c.alpha);
      }
    }
  }
  return {worst <= 1.0, fmt("C1=%g C2=%.4f worst (emp-3SE)/bound=%.3f at %s", c1, c2, worst, where.c_str())};
}

Outcome decoupling() {
  const auto mats = chaos_matrices();
  double worst_hi = 0, worst_ratio = 0;
  for (const auto& tm : mats) {
    for (double alpha : {1.0, 2.0}) {
      const SamplerSpec src{SamplerKind::weibull_symmetric, AlphaShape(alpha), true, 0};
      const RngStream root(7, {"acceptance", "decoupling", tm.id, alpha_tag(alpha)});
      const ChaosSampleSet chaos = chaos_samples(tm.a, src, 1000000, root.child("chaos"));
      const ChaosSampleSet dec = decoupled_samples(tm.a, src, 1000000, root.child("decoupled"));
      for (double p : {2.0, 4.0, 8.0}) {
        const DecouplingResult r = decoupling_check(chaos, dec, p, 100.0, root.child(fmt("p%g", p)));
        worst_hi = std::max(worst_hi, r.ci_hi);
        worst_ratio = std::max(worst_ratio, r.ratio);
      }
    }
  }
  return {worst_hi < 1.0, fmt("C=100 worst lhs/rhs=%.3g worst CI upper=%.3g", worst_ratio, worst_hi)};
}

Outcome basis_pursuit_oracle() {
  const SamplerSpec gauss{SamplerKind::gaussian, AlphaShape(2.0), false, 0};
  const EnsembleSpec e{EnsembleKind::dense, 12, 6, gauss};
  double worst_diff = 0, worst_res = 0;
  int nonconverged = 0;
  for (int inst = 0; inst < 20; ++inst) {
    RngStream s(8, {"acceptance", "bp", std::to_string(inst)});
    RngStream os = s.child("op");
    const Matrix phi = e.draw(os).dense_real();
    RngStream xs = s.child("signal");
    Vector x = Vector::Zero(12);
    for (auto k : random_support(12, 2, xs)) x(static_cast<Eigen::Index>(k)) = sample_gaussian(1, xs)(0);
    const Vector y = phi * x;
    // LP oracle: an l1 minimizer over {Phi z = y} sits at a basic feasible
    // solution, so enumerate all 6-column bases.
    double best = kInf;
    Vector best_z;
    std::vector<int> pick(12, 0);
    std::fill(pick.begin(), pick.begin() + 6, 1);
    do {
      std::vector<Eigen::Index> cols;
      for (int j = 0; j < 12; ++j)
        if (pick[j]) cols.push_back(j);
      Matrix basis(6, 6);
      for (int j = 0; j < 6; ++j) basis.col(j) = phi.col(cols[j]);
      const Eigen::FullPivLU<Matrix> lu(basis);
      if (lu.rank() < 6) continue;
      const Vector sol = lu.solve(y);
      Vector z = Vector::Zero(12);
      for (int j = 0; j < 6; ++j) z(cols[j]) = sol(j);
      if (z.lpNorm<1>() < best) {
        best = z.lpNorm<1>();
        best_z = z;
      }
    } while (std::prev_permutation(pick.begin(), pick.end()));
    const BasisPursuitOutcome bp = basis_pursuit(phi, y);
    nonconverged += !bp.converged;
    worst_diff = std::max(worst_diff, (bp.solution.real() - best_z).norm());
    worst_res = std::max(worst_res, (phi * bp.solution.real() - y).norm());
  }
  return {worst_diff <= 1e-4 && worst_res <= 1e-10 && nonconverged == 0,
          fmt("max l2 diff=%.3g max residual=%.3g nonconverged=%d", worst_diff, worst_res, nonconverged)};
}

Outcome phase_monotonicity() {
  const auto t0 = Clock::now();
  const SamplerSpec gauss{SamplerKind::gaussian, AlphaShape(2.0), false, 0};
  const std::vector<std::size_t> ms{8, 16, 24, 32, 40, 48}, ss{1, 2, 4, 8};
  const auto cells = phase_transition(EnsembleSpec{EnsembleKind::dense, 64, 64, gauss}, ms, ss, 100,
                                      RngStream(9, {"acceptance", "phase"}));
  const auto at = [&](std::size_t i, std::size_t j) -> const PhaseCell& { return cells[i * ss.size() + j]; };
  const auto half = [](const PhaseCell& c) { return (c.ci_hi - c.ci_lo) / 2; };
  int violations = 0;
  double worst = -1;
  // (a, b) with b expected to be at least as successful as a.
  const auto check = [&](const PhaseCell& a, const PhaseCell& b) {
    const double drop = a.rate - b.rate, slack = 2 * std::max(half(a), half(b));
    worst = std::max(worst, drop - slack);
    violations += drop > slack;
  };
  for (std::size_t j = 0; j < ss.size(); ++j)
    for (std::size_t i = 0; i < ms.size(); ++i)
      for (std::size_t k = i + 1; k < ms.size(); ++k) check(at(i, j), at(k, j));
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = 0; j < ss.size(); ++j)
      for (std::size_t k = j + 1; k < ss.size(); ++k) check(at(i, k), at(i, j));
  std::string rates;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    rates += fmt(" m=%zu:", ms[i]);
    for (std::size_t j = 0; j < ss.size(); ++j) rates += fmt("%s%.2f", j ? "/" : "", at(i, j).rate);
  }
  const double t = seconds_since(t0);
  return {violations == 0 && t < 600, fmt("violations=%d time=%.1fs rates(s=1/2/4/8)%s", violations, t, rates.c_str())};
}

Outcome rip_scaling() {
  const auto t0 = Clock::now();
  const SamplerSpec w2{SamplerKind::weibull_symmetric, AlphaShape(2.0), true, 0};
  const EnsembleSpec e{EnsembleKind::partial_circulant, 512, 512, w2};
  const ScanResult r = minimal_m_scan(e, {2, 4, 8}, 0.4, 0.9, RngStream(10, {"acceptance", "scan"}));
  const double ln_n = std::log(512.0);
  bool monotone = true;
  double lo = kInf, hi = 0;
  std::string rows;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    const double s = static_cast<double>(row.s);
    const double scale = s * std::pow(std::log(s), 2) * ln_n * ln_n;
    const double ratio = static_cast<double>(row.m_star) / scale;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    if (i > 0) monotone = monotone && row.m_star >= r.rows[i - 1].m_star;
    rows += fmt(" s=%zu:m*=%zu%s", row.s, row.m_star, row.reached ? "" : "(unreached)");
  }
  const double t = seconds_since(t0);
  const double spread = hi / lo;
  return {monotone && spread <= 4 && t < 1800,
          fmt("mc_lower delta;%s spread=%.2f (vs f1: %.2f) slope=%.2f time=%.1fs", rows.c_str(), spread,
              r.ratio_spread, r.slope, t)};
}

Outcome dudley_quadrature() {
  double exact_err = 0;
  for (double alpha : {1.0, 1.5, 2.0})
    exact_err = std::max(exact_err, std::abs(dudley_gamma(alpha, CoverModel::empirical({{0.0, 3.0}}), 2.0) -
                                             2 * std::pow(3.0, 1 / alpha)));
  double conv = 0, lo = kInf, hi = 0;
  DudleyOptions fine;
  fine.nodes = 1024;
  for (double alpha : {1.0, 1.5, 2.0})
    for (double s : {2.0, 4.0, 8.0, 16.0})
      for (double n : {256.0, 1024.0})
        for (double m = 32; m <= n; m *= 2) {
          const CoverModel model = CoverModel::circulant_family(s, n, m);
          const double u = std::sqrt(s / m);
          const double d = dudley_gamma(alpha, model, u);
          conv = std::max(conv, std::abs(dudley_gamma(alpha, model, u, fine) / d - 1));
          const double ratio = d / closed_form_gamma(alpha, s, n, m);
          lo = std::min(lo, ratio);
          hi = std::max(hi, ratio);
        }
  return {exact_err <= 1e-6 && conv < 1e-4 && lo >= 1.0 / 8 && hi <= 8,
          fmt("constant_err=%.3g self_convergence=%.3g dudley/closed in [%.3f, %.3f]", exact_err, conv, lo, hi)};
}

#ifdef CHAOSLAB_CLI_PATH
int run_cli(const std::string& args) {
  const std::string cmd = std::string(CHAOSLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) out[entry.path().filename()] = read_file(entry.path());
  return out;
}
#endif

Outcome cli_determinism() {
#ifndef CHAOSLAB_CLI_PATH
  return {false, "command line driver was not built"};
#else
  const std::vector<std::pair<std::string, std::string>> runs{
      {"sample", "--count 20000"},
      {"norms", ""},
      {"chaos-tails", "--matrix random_symmetric --alpha 1.5 --count 20000"},
      {"hw-bound", "--mc-count 5000"},
      {"hw-bound", "--family vx_circulant --gamma empirical --mc-count 5000"},
      {"gamma", ""},
      {"rip-exact", "--draws 4"},
      {"rip-scan", ""},
      {"recover", "--trials 12"},
      {"phase", ""},
  };
  const fs::path root = fs::temp_directory_path() / ("chaoslab_determinism_" + std::to_string(::getpid()));
  int mismatches = 0, failures = 0;
  std::string bad;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    std::map<std::string, std::string> reference;
    for (unsigned threads : {1u, 4u, 8u}) {
      const fs::path out = root / fmt("%zu_%u", r, threads);
      fs::remove_all(out);
      if (run_cli(fmt("--seed 77 --threads %u %s %s --out %s", threads, runs[r].first.c_str(),
                      runs[r].second.c_str(), out.c_str())) != 0) {
        ++failures;
        bad += " " + runs[r].first + "(exit)";
        continue;
      }
      const auto snap = snapshot(out);
      if (threads == 1) {
        reference = snap;
      } else if (snap != reference) {
        ++mismatches;
        bad += " " + runs[r].first + fmt("(t=%u)", threads);
      }
    }
  }
  fs::remove_all(root);
  return {mismatches == 0 && failures == 0,
          fmt("%zu runs x 3 thread counts, mismatches=%d failures=%d%s", runs.size(), mismatches, failures,
              bad.c_str())};
#endif
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"fft_convolution", fft_convolution},
      {"exchange_identities", exchange_identities},
      {"rip_oracle", rip_oracle},
      {"sampler_moments", sampler_moments},
      {"moment_bracket", moment_bracket},
      {"tail_domination", tail_domination},
      {"decoupling", decoupling},
      {"basis_pursuit_oracle", basis_pursuit_oracle},
      {"phase_monotonicity", phase_monotonicity},
      {"rip_scaling", rip_scaling},
      {"dudley_quadrature", dudley_quadrature},
      {"cli_determinism", cli_determinism},
  };
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion %s\n", argv[i]);
      return 2;
    }
    selected.push_back(static_cast<std::size_t>(id - 1));
  }
  if (selected.empty()) {
    selected.resize(criteria.size());
    std::iota(selected.begin(), selected.end(), std::size_t{0});
  }
  int failed = 0;
  for (std::size_t k : selected) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %02zu %-22s %7.1fs  %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
