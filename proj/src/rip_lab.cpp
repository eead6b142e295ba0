#include "chaoslab/rip_lab.hpp"

#include "chaoslab/chaining.hpp"
#include "chaoslab/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace chaoslab {

namespace {

/// Gram matrix of the operator, real or complex.
struct Gram {
  bool real = true;
  Matrix re;
  CMatrix cx;
  CMatrix phi;  // dense operator, kept for witness checks

  explicit Gram(const MeasurementOperator& op) : real(op.is_real()) {
    phi = op.dense_complex();
    if (real) {
      const Matrix p = phi.real();
      re = p.transpose() * p;
    } else {
      cx = phi.adjoint() * phi;
    }
  }

  struct Extreme {
    double deviation = 0.0;
    CVector vector;
  };

  Extreme extreme(const std::vector<std::size_t>& support, bool want_vector) const {
    const auto k = static_cast<Eigen::Index>(support.size());
    Extreme out;
    const auto pick = [&](const auto& solver) {
      const auto& ev = solver.eigenvalues();
      const bool low = std::abs(ev(0)) > std::abs(ev(k - 1));
      out.deviation = low ? std::abs(ev(0)) : std::abs(ev(k - 1));
      if (want_vector) out.vector = solver.eigenvectors().col(low ? 0 : k - 1).template cast<Complex>();
    };
    if (k <= 2 && !want_vector) {
      // Closed form, so structured cases (duplicate columns, identity) come out exact.
      const double a = (real ? re(support[0], support[0]) : cx(support[0], support[0]).real()) - 1.0;
      if (k == 1) {
        out.deviation = std::abs(a);
        return out;
      }
      const double d = (real ? re(support[1], support[1]) : cx(support[1], support[1]).real()) - 1.0;
      const double b = real ? std::abs(re(support[0], support[1])) : std::abs(cx(support[0], support[1]));
      const double mid = (a + d) / 2, rad = std::hypot((a - d) / 2, b);
      out.deviation = std::max(std::abs(mid + rad), std::abs(mid - rad));
      return out;
    }
    const auto options = want_vector ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
    if (real) {
      Matrix g(k, k);
      for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) g(i, j) = re(support[i], support[j]) - (i == j ? 1.0 : 0.0);
      pick(Eigen::SelfAdjointEigenSolver<Matrix>(g, options));
    } else {
      CMatrix g(k, k);
      for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) g(i, j) = cx(support[i], support[j]) - (i == j ? 1.0 : 0.0);
      pick(Eigen::SelfAdjointEigenSolver<CMatrix>(g, options));
    }
    return out;
  }
};

void check_sparsity(const MeasurementOperator& op, std::size_t s) {
  if (s == 0 || s > op.cols()) throw std::invalid_argument("delta_s: need 1 <= s <= n");
}

/// Evaluates every support in parallel, then picks the first maximum.
RipResult best_of(const Gram& gram, const std::vector<std::vector<std::size_t>>& supports, std::size_t s,
                  RipMethod method) {
  std::vector<double> dev(supports.size());
  constexpr std::size_t kChunk = 256;
  parallel_for((supports.size() + kChunk - 1) / kChunk, [&](std::size_t c) {
    const std::size_t end = std::min(supports.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) dev[i] = gram.extreme(supports[i], false).deviation;
  });
  const std::size_t best =
      static_cast<std::size_t>(std::max_element(dev.begin(), dev.end()) - dev.begin());
  RipResult out;
  out.s = s;
  out.method = method;
  out.supports_examined = supports.size();
  const auto ext = gram.extreme(supports[best], true);
  out.delta = dev[best];
  out.witness_support = supports[best];
  out.witness = CVector::Zero(gram.phi.cols());
  for (std::size_t i = 0; i < s; ++i) out.witness(static_cast<Eigen::Index>(supports[best][i])) = ext.vector(static_cast<Eigen::Index>(i));
  return out;
}

}  // namespace

std::string to_string(RipMethod method) { return method == RipMethod::exact ? "exact" : "mc_lower"; }

double binomial(double n, double k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (double i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return std::round(out);
}

std::vector<std::size_t> random_support(std::size_t n, std::size_t s, RngStream& stream) {
  if (s > n) throw std::invalid_argument("random_support: s > n");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < s; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(stream.uniform() * static_cast<double>(n - i));
    std::swap(idx[i], idx[std::min(j, n - 1)]);
  }
  idx.resize(s);
  std::sort(idx.begin(), idx.end());
  return idx;
}

double support_deviation(const MeasurementOperator& op, const std::vector<std::size_t>& support) {
  if (support.empty()) return 0.0;
  const CMatrix cols = op.columns_complex(support);
  CMatrix g = cols.adjoint() * cols;
  g.diagonal().array() -= 1.0;
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(g, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

RipResult delta_s_exact(const MeasurementOperator& op, std::size_t s) {
  check_sparsity(op, s);
  const std::size_t n = op.cols();
  if (binomial(static_cast<double>(n), static_cast<double>(s)) > kExactSupportBudget) {
    throw std::length_error("delta_s_exact: C(n, s) exceeds the 1e5 support budget; use delta_s_mc_lower");
  }
  std::vector<std::vector<std::size_t>> supports;
  std::vector<std::size_t> c(s);
  std::iota(c.begin(), c.end(), std::size_t{0});
  for (;;) {
    supports.push_back(c);
    // Colex successor: bump the lowest position that can move, reset below it.
    std::size_t i = 0;
    while (i < s && c[i] + 1 == (i + 1 < s ? c[i + 1] : n)) ++i;
    if (i == s) break;
    ++c[i];
    for (std::size_t j = 0; j < i; ++j) c[j] = j;
  }
  return best_of(Gram(op), supports, s, RipMethod::exact);
}

RipResult delta_s_mc_lower(const MeasurementOperator& op, std::size_t s, std::size_t trials,
                           const RngStream& stream) {
  check_sparsity(op, s);
  if (trials == 0) throw std::invalid_argument("delta_s_mc_lower: need trials >= 1");
  std::vector<std::vector<std::size_t>> supports(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    RngStream ts = stream.child(t);
    supports[t] = random_support(op.cols(), s, ts);
  }
  return best_of(Gram(op), supports, s, RipMethod::mc_lower);
}

SuccessEstimate rip_success_prob(const EnsembleSpec& ensemble, std::size_t s, double delta, std::size_t draws,
                                 const RngStream& stream, const RipProbeOptions& options) {
  if (draws == 0) throw std::invalid_argument("rip_success_prob: need draws >= 1");
  std::vector<char> ok(draws, 0);
  parallel_for(draws, [&](std::size_t d) {
    const RngStream ds = stream.child(d);
    RngStream op_stream = ds.child("op");
    const MeasurementOperator op = ensemble.draw(op_stream);
    const RipResult r = options.method == RipMethod::exact
                            ? delta_s_exact(op, s)
                            : delta_s_mc_lower(op, s, options.mc_trials, ds.child("supports"));
    ok[d] = r.delta <= delta;
  });
  SuccessEstimate out;
  out.draws = draws;
  out.successes = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 1));
  out.rate = static_cast<double>(out.successes) / static_cast<double>(draws);
  std::tie(out.ci_lo, out.ci_hi) = wilson_interval(out.successes, draws);
  out.method = options.method;
  out.upper_estimate = options.method == RipMethod::mc_lower;
  return out;
}

ScanResult minimal_m_scan(const EnsembleSpec& ensemble, const std::vector<std::size_t>& s_list, double delta,
                          double target_prob, const RngStream& stream, const ScanOptions& options) {
  if (!(target_prob > 0 && target_prob < 1)) throw std::invalid_argument("minimal_m_scan: need 0 < target < 1");
  if (ensemble.kind == EnsembleKind::gabor) {
    throw std::invalid_argument("minimal_m_scan: gabor ties n to m; scan a fixed-n ensemble");
  }
  const std::size_t n = ensemble.n;
  ScanResult result;
  for (std::size_t s : s_list) {
    if (s == 0 || s > n) throw std::invalid_argument("minimal_m_scan: need 1 <= s <= n");
    ScanRow row;
    row.s = s;
    const RngStream ss = stream.child("s" + std::to_string(s));
    const auto passes = [&](std::size_t m) {
      ++row.probes;
      const EnsembleSpec e = ensemble.with_rows(m);
      const RngStream ms = ss.child(m);
      const auto vote = [&](std::size_t rep) {
        return rip_success_prob(e, s, delta, options.draws, ms.child(rep), options.probe).rate >= target_prob;
      };
      const bool a = vote(0), b = vote(1);
      if (a == b) return a;
      ++row.split_votes;
      return vote(2);
    };
    if (!passes(n)) {
      row.m_star = n;
      row.reached = false;
    } else {
      std::size_t lo = 0, hi = n;  // lo fails (m = 0 cannot measure), hi passes
      while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        (passes(mid) ? hi : lo) = mid;
      }
      row.m_star = hi;
    }
    row.f1 = sample_complexity(ensemble.entries.shape.alpha(), static_cast<double>(s), static_cast<double>(n), 0.5)
                 .f1;
    row.ratio = static_cast<double>(row.m_star) / row.f1;
    result.rows.push_back(row);
  }
  if (result.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(result.rows.size());
    for (const auto& r : result.rows) {
      const double x = std::log(r.f1), y = std::log(static_cast<double>(r.m_star));
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double den = k * sxx - sx * sx;
    result.slope = den != 0 ? (k * sxy - sx * sy) / den : 0.0;
  }
  if (!result.rows.empty()) {
    const auto [mn, mx] = std::minmax_element(result.rows.begin(), result.rows.end(),
                                              [](const ScanRow& a, const ScanRow& b) { return a.ratio < b.ratio; });
    result.ratio_spread = mx->ratio / mn->ratio;
  }
  return result;
}

}  // namespace chaoslab
