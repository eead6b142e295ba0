#include "chaoslab/chaos_lab.hpp"

#include "chaoslab/io.hpp"
#include "chaoslab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chaoslab {

namespace {

constexpr std::size_t kBlock = 4096;

std::size_t block_count(std::size_t count) { return (count + kBlock - 1) / kBlock; }

Matrix draw_block(const SamplerSpec& source, Eigen::Index rows, Eigen::Index cols, RngStream& stream) {
  Matrix x(rows, cols);
  sample_into(source, stream, std::span<double>(x.data(), static_cast<std::size_t>(x.size())));
  return x;
}

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) throw std::invalid_argument(std::string(what) + ": A must be square");
}

// Drives fn(block_index, first, size) over count samples in parallel.
template <typename Fn>
void for_each_block(std::size_t count, Fn&& fn) {
  parallel_for(block_count(count), [&](std::size_t b) {
    const std::size_t first = b * kBlock;
    fn(b, first, std::min(kBlock, count - first));
  });
}

double sum_of(const std::vector<double>& v) { return pairwise_sum(v); }

McEstimate mean_and_se(const std::vector<double>& v) {
  McEstimate out;
  if (v.empty()) return out;
  const double n = static_cast<double>(v.size());
  out.mean = pairwise_sum(v) / n;
  if (v.size() > 1) {
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - out.mean) * (v[i] - out.mean);
    out.se = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  }
  return out;
}

}  // namespace

ChaosSampleSet chaos_samples(const Matrix& a, const SamplerSpec& source, std::size_t count, const RngStream& stream,
                             std::string matrix_id) {
  require_square(a, "chaos_samples");
  ChaosSampleSet set{std::move(matrix_id), source, false, std::vector<double>(count)};
  const double centre = population_variance(source) * a.trace();
  for_each_block(count, [&](std::size_t b, std::size_t first, std::size_t size) {
    RngStream s = stream.child(b);
    const Matrix x = draw_block(source, a.rows(), static_cast<Eigen::Index>(size), s);
    const Eigen::RowVectorXd q = (a * x).cwiseProduct(x).colwise().sum();
    for (std::size_t i = 0; i < size; ++i) set.values[first + i] = q(static_cast<Eigen::Index>(i)) - centre;
  });
  return set;
}

ChaosSampleSet decoupled_samples(const Matrix& a, const SamplerSpec& source, std::size_t count,
                                 const RngStream& stream, std::string matrix_id) {
  require_square(a, "decoupled_samples");
  ChaosSampleSet set{std::move(matrix_id), source, true, std::vector<double>(count)};
  for_each_block(count, [&](std::size_t b, std::size_t first, std::size_t size) {
    RngStream s = stream.child(b);
    const Matrix x = draw_block(source, a.rows(), static_cast<Eigen::Index>(size), s);
    const Matrix y = draw_block(source, a.rows(), static_cast<Eigen::Index>(size), s);
    const Eigen::RowVectorXd q = (a * y).cwiseProduct(x).colwise().sum();
    for (std::size_t i = 0; i < size; ++i) set.values[first + i] = q(static_cast<Eigen::Index>(i));
  });
  return set;
}

LpEstimate empirical_lp(const ChaosSampleSet& set, double p) {
  if (set.count() < 100) throw std::invalid_argument("empirical_lp: need at least 100 samples");
  if (!(p >= 1.0)) throw std::invalid_argument("empirical_lp: need p >= 1");
  std::vector<double> powers(set.count());
  for (std::size_t i = 0; i < powers.size(); ++i) powers[i] = std::pow(std::abs(set.values[i]), p);
  LpEstimate out;
  out.value = std::pow(sum_of(powers) / static_cast<double>(powers.size()), 1.0 / p);
  out.reliable = p <= std::log(static_cast<double>(set.count()));
  return out;
}

TailCurve empirical_tail(const ChaosSampleSet& set, const std::vector<double>& t_grid) {
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) {
    throw std::invalid_argument("empirical_tail: t grid must be nondecreasing");
  }
  std::vector<double> mags(set.values.size());
  for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(set.values[i]);
  std::sort(mags.begin(), mags.end());
  TailCurve curve;
  curve.t = t_grid;
  curve.bound.assign(t_grid.size(), 0.0);
  const double n = static_cast<double>(std::max<std::size_t>(mags.size(), 1));
  for (double t : t_grid) {
    const auto above = mags.end() - std::upper_bound(mags.begin(), mags.end(), t);
    curve.empirical.push_back(static_cast<double>(above) / n);
  }
  return curve;
}

ChaosNorms chaos_norms(const Matrix& a, const AlphaShape& alpha, const AscentOptions& options) {
  const ExactNorms exact = exact_norms(a);
  ChaosNorms out;
  out.frobenius = exact.frobenius;
  out.spectral = spectral_norm(a).value;
  out.lstar_l2 = exact.lp_l2(alpha.alpha_star());
  out.two_to_star_hi = mixed_norm_interval(a, alpha.alpha_star(), options).hi;
  out.alpha_to_star_hi = dual_pair_norm_interval(a, alpha, options).hi;
  return out;
}

MomentFormula decoupled_moment_formula(const ChaosNorms& nm, const AlphaShape& alpha, double p) {
  if (!(p >= 2.0)) throw std::invalid_argument("decoupled_moment_formula: need p >= 2");
  const double a = alpha.alpha();
  MomentFormula out;
  out.terms = {std::sqrt(p) * nm.frobenius, p * nm.spectral, std::pow(p, 1.0 / a) * nm.lstar_l2,
               std::pow(p, (a + 2.0) / (2.0 * a)) * nm.two_to_star_hi, std::pow(p, 2.0 / a) * nm.alpha_to_star_hi};
  for (double t : out.terms) out.five_term += t;
  out.two_term = std::sqrt(p) * nm.frobenius + std::pow(p, 2.0 / a) * nm.spectral;
  return out;
}

MomentFormula decoupled_moment_formula(const Matrix& a, const AlphaShape& alpha, double p,
                                       const AscentOptions& options) {
  require_square(a, "decoupled_moment_formula");
  return decoupled_moment_formula(chaos_norms(a, alpha, options), alpha, p);
}

double hw_phi2(const ChaosNorms& nm, const AlphaShape& alpha, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("hw_phi2: t must be nonnegative");
  const double a = alpha.alpha();
  const auto term = [&](double norm, double power) { return norm > 0 ? std::pow(t / norm, power) : kInf; };
  return std::min({term(nm.frobenius, 2.0), term(nm.spectral, 1.0), term(nm.lstar_l2, a),
                   term(nm.two_to_star_hi, 2.0 * a / (a + 2.0)), term(nm.alpha_to_star_hi, a / 2.0)});
}

double hw_phi2(const Matrix& a, const AlphaShape& alpha, double t, const AscentOptions& options) {
  require_square(a, "hw_phi2");
  if (!(t >= 0.0)) throw std::invalid_argument("hw_phi2: t must be nonnegative");
  const double scale = a.cwiseAbs().maxCoeff();
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("hw_phi2: A must be symmetric");
  }
  if (scale == 0.0) return kInf;
  return hw_phi2(chaos_norms(a, alpha, options), alpha, t);
}

MomentTail moment_to_tail(const std::vector<double>& c, const std::vector<double>& beta, double c_last, double p0,
                          double t) {
  if (c.empty() || c.size() != beta.size()) throw std::invalid_argument("moment_to_tail: C and beta sizes differ");
  if (!(p0 >= 1.0)) throw std::invalid_argument("moment_to_tail: need p0 >= 1");
  double exponent = kInf, sum = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (!(c[k] > 0 && beta[k] > 0)) throw std::invalid_argument("moment_to_tail: C_k and beta_k must be positive");
    exponent = std::min(exponent, std::pow(t / c[k], 1.0 / beta[k]));
    sum += c[k] * std::pow(t, beta[k]);
  }
  const double e = std::numbers::e;
  MomentTail out;
  out.threshold_form1 = e * (static_cast<double>(c.size()) * t + c_last);
  out.bound_form1 = std::exp(p0 - exponent);
  out.threshold_form2 = e * (sum + c_last);
  out.bound_form2 = std::exp(p0 - t);
  return out;
}

SupExpectations sup_expectations(const std::vector<Matrix>& family, const SamplerSpec& source,
                                 const AlphaShape& alpha, std::size_t count, const RngStream& stream) {
  if (family.empty()) throw std::invalid_argument("sup_expectations: empty family");
  const Eigen::Index m = family.front().rows(), n = family.front().cols();
  for (const auto& a : family) {
    if (a.rows() != m || a.cols() != n) throw std::invalid_argument("sup_expectations: members differ in shape");
  }
  std::vector<double> bil(count), two(count), star(count);
  for_each_block(count, [&](std::size_t b, std::size_t first, std::size_t size) {
    RngStream s = stream.child(b);
    const Matrix eta_n = draw_block(source, n, static_cast<Eigen::Index>(size), s);
    const Matrix eta_m = draw_block(source, m, static_cast<Eigen::Index>(size), s);
    for (std::size_t i = 0; i < size; ++i) {
      bil[first + i] = two[first + i] = star[first + i] = 0.0;
    }
    for (const auto& a : family) {
      const Matrix v = a * eta_n;
      for (std::size_t i = 0; i < size; ++i) {
        const auto col = v.col(static_cast<Eigen::Index>(i));
        auto& bb = bil[first + i];
        bb = std::max(bb, std::abs(eta_m.col(static_cast<Eigen::Index>(i)).dot(col)));
        two[first + i] = std::max(two[first + i], col.norm());
        star[first + i] = std::max(star[first + i], lp_norm(col, alpha.alpha_star()));
      }
    }
  });
  return {mean_and_se(bil), mean_and_se(two), mean_and_se(star), family.size()};
}

double gamma_functional(const GammaInput& input, const AlphaShape& alpha, const std::vector<Matrix>& family) {
  switch (input.source) {
    case GammaSource::given:
      return input.gamma2 + input.gamma_alpha;
    case GammaSource::closed_form:
      return closed_form_gamma(2.0, input.s, input.n, input.m, input.constant) +
             closed_form_gamma(alpha.alpha(), input.s, input.n, input.m, input.constant);
    case GammaSource::dudley: {
      if (input.model) {
        return dudley_gamma(2.0, *input.model, input.u_max) + dudley_gamma(alpha.alpha(), *input.model, input.u_max);
      }
      if (family.size() < 2) return 0.0;
      // Pairwise 2->2 distances give both the diameter and every radius at
      // which the greedy net size can change.
      const std::size_t k = family.size();
      Matrix dist = Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
      std::vector<double> d(pairs.size());
      parallel_for(pairs.size(), [&](std::size_t q) {
        d[q] = spectral_norm(Matrix(family[pairs[q].first] - family[pairs[q].second])).value;
      });
      for (std::size_t q = 0; q < pairs.size(); ++q) {
        dist(static_cast<Eigen::Index>(pairs[q].first), static_cast<Eigen::Index>(pairs[q].second)) = d[q];
        dist(static_cast<Eigen::Index>(pairs[q].second), static_cast<Eigen::Index>(pairs[q].first)) = d[q];
      }
      const double diameter = *std::max_element(d.begin(), d.end());
      if (diameter == 0.0) return 0.0;
      std::vector<double> radii = d;
      radii.push_back(0.0);
      std::sort(radii.begin(), radii.end());
      radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
      std::vector<std::size_t> index(k);
      for (std::size_t i = 0; i < k; ++i) index[i] = i;
      const auto metric = [&](std::size_t i, std::size_t j) {
        return dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      };
      const CoverModel model = CoverModel::empirical(
          empirical_cover_table(std::span<const std::size_t>(index), metric, std::span<const double>(radii)));
      return dudley_gamma(2.0, model, diameter) + dudley_gamma(alpha.alpha(), model, diameter);
    }
  }
  return 0.0;
}

DeviationSuite deviation_bound_suite(const std::vector<Matrix>& family, const AlphaShape& alpha,
                                     const GammaInput& gamma, const std::vector<double>& t_grid,
                                     const RngStream& stream, const SuiteOptions& options) {
  if (family.empty()) throw std::invalid_argument("deviation_bound_suite: empty family");
  DeviationSuite suite;
  BoundReport& r = suite.report;
  r.constants = options.constants;
  r.net_size = family.size();
  for (const auto& a : family) {
    r.m_f = std::max(r.m_f, a.norm());
    r.m_22 = std::max(r.m_22, spectral_norm(a).value);
    r.m_2star = std::max(r.m_2star, mixed_norm_interval(a, alpha.alpha_star(), options.ascent).hi);
    r.sup_ata_frobenius = std::max(r.sup_ata_frobenius, (a.transpose() * a).norm());
  }
  r.gamma = gamma_functional(gamma, alpha, family);
  const SamplerSpec eta{SamplerKind::alpha_density, alpha, false, 0.0};
  r.expectations = sup_expectations(family, eta, alpha, options.mc_count, stream.child("sup"));
  r.t_a = std::max(r.expectations.aeta_2.mean, r.m_f);
  r.u1 = r.gamma * (r.gamma + r.m_f);
  r.u2 = r.m_22 * (r.gamma + r.m_f);
  r.u3 = r.m_2star * (r.gamma + r.m_f);
  r.u2_prime = r.m_22 * r.gamma + r.sup_ata_frobenius;
  r.u3_prime = r.m_2star * r.gamma;

  const double a = alpha.alpha();
  const double scale = options.constants.c_alpha * options.constants.psi_l * options.constants.psi_l;
  const auto ratio = [](double t, double d, double power) { return d > 0 ? std::pow(t / d, power) : kInf; };
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw std::invalid_argument("deviation_bound_suite: t must be nonnegative");
    DeviationCurvePoint pt;
    pt.t = t;
    pt.threshold_14 = scale * (r.expectations.bilinear.mean + t);
    pt.rhs_14 = options.constants.c1_alpha *
                std::exp(-std::min({ratio(t, r.t_a, 2.0), ratio(t, r.expectations.aeta_star.mean, a),
                                    ratio(t, r.m_22, a / 2.0)}));
    pt.threshold_16 = scale * (r.u1 + t);
    pt.rhs_16 = options.constants.c1_alpha *
                std::exp(-std::min({ratio(t, r.u2, 2.0), ratio(t, r.u3, a), ratio(t, r.m_22 * r.m_22, a / 2.0)}));
    suite.curve.push_back(pt);
  }
  return suite;
}

DecouplingResult decoupling_check(const ChaosSampleSet& chaos, const ChaosSampleSet& decoupled, double p, double c,
                                  const RngStream& stream, const BootstrapOptions& bootstrap) {
  if (chaos.count() != decoupled.count() || chaos.count() == 0) {
    throw std::invalid_argument("decoupling_check: sample sets must be nonempty and of equal size");
  }
  if (!(p >= 1.0)) throw std::invalid_argument("decoupling_check: need p >= 1");
  const std::size_t n = chaos.count();
  std::vector<double> lhs(n), rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    lhs[i] = std::pow(std::abs(chaos.values[i]), p);
    rhs[i] = std::pow(std::abs(c * decoupled.values[i]), p);
  }
  DecouplingResult out;
  out.lhs = pairwise_sum(lhs) / static_cast<double>(n);
  out.rhs = pairwise_sum(rhs) / static_cast<double>(n);
  const auto safe_ratio = [](double l, double r) { return r > 0 ? l / r : (l > 0 ? kInf : 0.0); };
  out.ratio = safe_ratio(out.lhs, out.rhs);
  if (out.lhs == 0.0 && out.rhs == 0.0) return out;

  const std::size_t k = std::max<std::size_t>(1, std::min(bootstrap.blocks, n));
  std::vector<double> block_l(k), block_r(k);
  for (std::size_t b = 0; b < k; ++b) {
    const std::size_t lo = b * n / k, hi = (b + 1) * n / k;
    block_l[b] = pairwise_sum(std::span<const double>(lhs).subspan(lo, hi - lo));
    block_r[b] = pairwise_sum(std::span<const double>(rhs).subspan(lo, hi - lo));
  }
  std::vector<double> ratios(std::max<std::size_t>(bootstrap.resamples, 1));
  const RngStream boot = stream.child("bootstrap");
  parallel_for(ratios.size(), [&](std::size_t r) {
    RngStream s = boot.child(r);
    double sl = 0.0, sr = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t pick = static_cast<std::size_t>(s.uniform() * static_cast<double>(k));
      sl += block_l[std::min(pick, k - 1)];
      sr += block_r[std::min(pick, k - 1)];
    }
    ratios[r] = safe_ratio(sl, sr);
  });
  std::sort(ratios.begin(), ratios.end());
  const double tail = (1.0 - bootstrap.level) / 2.0;
  const auto at = [&](double q) {
    return ratios[static_cast<std::size_t>(std::floor(q * static_cast<double>(ratios.size() - 1)))];
  };
  out.ci_lo = at(tail);
  out.ci_hi = at(1.0 - tail);
  return out;
}

DecouplingResult decoupling_check(const Matrix& a, const SamplerSpec& source_xi, const SamplerSpec& source_eta,
                                  double p, std::size_t count, double c, const RngStream& stream,
                                  const BootstrapOptions& bootstrap) {
  const ChaosSampleSet chaos = chaos_samples(a, source_xi, count, stream.child("chaos"));
  const ChaosSampleSet dec = decoupled_samples(a, source_eta, count, stream.child("decoupled"));
  return decoupling_check(chaos, dec, p, c, stream, bootstrap);
}

}  // namespace chaoslab
