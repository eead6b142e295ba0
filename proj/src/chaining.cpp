#include "chaoslab/chaining.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chaoslab {

CoverModel CoverModel::sparse_ball(double s, double n) {
  CoverModel m;
  m.kind = CoverKind::sparse_ball;
  m.s = s;
  m.n = n;
  return m;
}

CoverModel CoverModel::euclidean_ball(double n) {
  CoverModel m;
  m.kind = CoverKind::euclidean_ball;
  m.n = n;
  return m;
}

CoverModel CoverModel::circulant_family(double s, double n, double rows, double c_cov) {
  CoverModel m;
  m.kind = CoverKind::circulant_family;
  m.s = s;
  m.n = n;
  m.m = rows;
  m.c_cov = c_cov;
  return m;
}

CoverModel CoverModel::gabor_family(double s, double rows, double c_cov) {
  CoverModel m;
  m.kind = CoverKind::gabor_family;
  m.s = s;
  m.m = rows;
  m.n = rows * rows;
  m.c_cov = c_cov;
  return m;
}

CoverModel CoverModel::empirical(std::vector<std::pair<double, double>> table) {
  if (table.empty()) throw std::invalid_argument("CoverModel::empirical: empty table");
  std::sort(table.begin(), table.end());
  CoverModel m;
  m.kind = CoverKind::empirical;
  m.table = std::move(table);
  return m;
}

namespace {

double gabor_branch_a(const CoverModel& c, double u) {
  return c.s * (std::log(std::numbers::e * c.m * c.m / c.s) + std::log(3.0 * std::sqrt(c.s / c.m) / u));
}

double gabor_branch_b(const CoverModel& c, double u) {
  const double r = std::log(c.m) / u;
  return c.s / c.m * r * r;
}

}  // namespace

CirculantBranches circulant_branches(const CoverModel& c, double u) {
  if (!(u > 0)) throw std::invalid_argument("circulant_branches: u must be positive");
  const double r = std::log(c.n) / u;
  return {c.c_cov * c.s / c.m * r * r, c.c_cov * c.s * std::log(std::numbers::e * c.n / (c.s * u))};
}

double log_cover(const CoverModel& c, double u) {
  if (!(u > 0)) throw std::invalid_argument("log_cover: u must be positive");
  double value = 0.0;
  switch (c.kind) {
    case CoverKind::sparse_ball:
      value = c.s * std::log(std::numbers::e * c.n / c.s) + c.s * std::log1p(2.0 / u);
      break;
    case CoverKind::euclidean_ball:
      value = c.n * std::log1p(2.0 / u);
      break;
    case CoverKind::circulant_family: {
      const auto b = circulant_branches(c, u);
      value = u >= 1.0 / std::sqrt(c.m) ? b.large_u : b.small_u;
      break;
    }
    case CoverKind::gabor_family:
      value = c.c_cov * std::min(gabor_branch_a(c, u), gabor_branch_b(c, u));
      break;
    case CoverKind::empirical: {
      auto it = std::upper_bound(c.table.begin(), c.table.end(), std::make_pair(u, kInf));
      value = it == c.table.begin() ? c.table.front().second : std::prev(it)->second;
      break;
    }
  }
  return std::max(value, 0.0);
}

std::vector<double> cover_breakpoints(const CoverModel& c, double lo, double hi) {
  std::vector<double> out;
  const auto keep = [&](double u) {
    if (u > lo && u < hi) out.push_back(u);
  };
  switch (c.kind) {
    case CoverKind::circulant_family:
      keep(1.0 / std::sqrt(c.m));
      break;
    case CoverKind::empirical:
      for (const auto& [u, _] : c.table) keep(u);
      break;
    case CoverKind::gabor_family: {
      // Sign changes of (a - b) and of a (where the clamp engages), refined by bisection.
      const auto refine = [&](auto&& f) {
        constexpr int kScan = 4096;
        double prev_u = lo;
        double prev_f = f(lo);
        for (int i = 1; i <= kScan; ++i) {
          const double u = lo * std::pow(hi / lo, static_cast<double>(i) / kScan);
          const double fu = f(u);
          if ((prev_f < 0) != (fu < 0)) {
            double a = prev_u, b = u;
            for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
              const double mid = 0.5 * (a + b);
              if ((f(mid) < 0) == (prev_f < 0)) a = mid; else b = mid;
            }
            keep(0.5 * (a + b));
          }
          prev_u = u;
          prev_f = fu;
        }
      };
      refine([&](double u) { return gabor_branch_a(c, u) - gabor_branch_b(c, u); });
      refine([&](double u) { return gabor_branch_a(c, u); });
      break;
    }
    case CoverKind::sparse_ball:
    case CoverKind::euclidean_ball:
      break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::pair<std::vector<double>, std::vector<double>> gauss_laguerre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_laguerre: order must be positive");
  Matrix jacobi = Matrix::Zero(order, order);
  for (int i = 0; i < order; ++i) {
    jacobi(i, i) = 2.0 * i + 1.0;
    if (i + 1 < order) jacobi(i, i + 1) = jacobi(i + 1, i) = i + 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  std::vector<double> nodes(order), weights(order);
  for (int i = 0; i < order; ++i) {
    nodes[i] = eig.eigenvalues()(i);
    const double v0 = eig.eigenvectors()(0, i);
    weights[i] = v0 * v0;
  }
  return {nodes, weights};
}

double dudley_gamma(double alpha, const CoverModel& model, double u_max, const DudleyOptions& options) {
  if (!(u_max > 0)) throw std::invalid_argument("dudley_gamma: u_max must be positive");
  if (!(alpha > 0)) throw std::invalid_argument("dudley_gamma: alpha must be positive");
  if (options.nodes < 2) throw std::invalid_argument("dudley_gamma: need at least 2 nodes");
  const double inv_alpha = 1.0 / alpha;
  const auto integrand = [&](double u) { return std::pow(log_cover(model, u), inv_alpha); };

  const double u_min = u_max * options.lower_ratio;
  std::vector<double> grid(options.nodes);
  for (int i = 0; i < options.nodes; ++i) {
    grid[i] = u_min * std::pow(u_max / u_min, static_cast<double>(i) / (options.nodes - 1));
  }
  grid.front() = u_min;
  grid.back() = u_max;
  for (double b : cover_breakpoints(model, u_min, u_max)) grid.push_back(b);
  std::sort(grid.begin(), grid.end());

  static constexpr double kNodes[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                       0.8611363115940526};
  static constexpr double kWeights[4] = {0.3478548451374638, 0.6521451548625461, 0.6521451548625461,
                                         0.3478548451374638};
  double body = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = grid[i], b = grid[i + 1];
    if (!(b > a)) continue;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double panel = 0.0;
    for (int k = 0; k < 4; ++k) panel += kWeights[k] * integrand(mid + half * kNodes[k]);
    body += half * panel;
  }

  const auto [nodes, weights] = gauss_laguerre(options.tail_order);
  double tail = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double u = u_min * std::exp(-nodes[i]);
    if (u > 0) tail += weights[i] * integrand(u);
  }
  tail *= u_min;
  return body + tail;
}

std::vector<DudleyTracePoint> dudley_trace(double alpha, const CoverModel& model, double u_max, int points,
                                           double lower_ratio) {
  std::vector<DudleyTracePoint> out;
  const double u_min = u_max * lower_ratio;
  for (int i = 0; i < points; ++i) {
    const double u = u_min * std::pow(u_max / u_min, static_cast<double>(i) / std::max(points - 1, 1));
    const double lc = log_cover(model, u);
    out.push_back({u, lc, std::pow(lc, 1.0 / alpha)});
  }
  return out;
}

double closed_form_gamma(double alpha, double s, double n, double m, double constant) {
  if (!(s >= 1 && s <= n)) throw std::invalid_argument("closed_form_gamma: need 1 <= s <= n");
  if (!(m >= 2)) throw std::invalid_argument("closed_form_gamma: need m >= 2");
  if (alpha == 2.0) return constant * std::sqrt(s / m) * log_floor1(s) * log_floor1(n);
  return constant * std::pow(s, 1.0 / alpha) / std::sqrt(m) * std::pow(log_floor1(n), 2.0 / alpha);
}

SampleComplexity sample_complexity(double alpha, double s, double n, double delta, double c1) {
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("sample_complexity: need 0 < delta < 1");
  if (!(s >= 1 && s <= n)) throw std::invalid_argument("sample_complexity: need 1 <= s <= n");
  const double ls = log_floor1(s), ln = log_floor1(n);
  SampleComplexity out;
  out.f1 = std::max(std::pow(s, 2.0 / alpha) * std::pow(ln, 4.0 / alpha), s * ls * ls * ln * ln);
  out.f2 = std::max(std::pow(s, (2.0 - alpha) / 2.0) * ln * ln, std::pow(ls, alpha) * std::pow(ln, alpha));
  out.m_required = std::ceil(c1 * out.f1 / (delta * delta));
  return out;
}

}  // namespace chaoslab
