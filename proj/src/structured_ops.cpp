#include "chaoslab/structured_ops.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <mutex>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace chaoslab {

namespace {

// kissfft cannot plan a length-1 transform; it is the identity anyway.
CVector fft_forward(const CVector& in) {
  if (in.size() <= 1) return in;
  Eigen::FFT<double> fft;
  CVector out;
  fft.fwd(out, in);
  return out;
}

// Unnormalized inverse: out_j = sum_f in_f e^{+2 pi i f j / n}.
CVector fft_inverse_unscaled(const CVector& in) {
  if (in.size() <= 1) return in;
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  CVector out;
  fft.inv(out, in);
  return out;
}

Vector real_part_checked(const CVector& v, double scale) {
  const double residue = v.imag().cwiseAbs().maxCoeff();
  if (residue > 1e-9 * std::max(scale, std::numeric_limits<double>::min())) {
    throw std::runtime_error("FFT convolution left a non-negligible imaginary residue");
  }
  return v.real();
}

std::size_t cyclic_sub(std::size_t j, std::size_t k, std::size_t n) { return (j + n - k % n) % n; }

}  // namespace

void verify_fft_backend() {
  static std::once_flag once;
  std::call_once(once, [] {
    for (Eigen::Index n : {1, 2, 3, 5, 7, 8, 12, 64, 97, 128, 1000, 1024, 4096}) {
      CVector x(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        x(i) = Complex(std::sin(0.37 * i + 0.1), std::cos(1.13 * i * i + 0.2));
      }
      CVector back = fft_inverse_unscaled(fft_forward(x)) / static_cast<double>(n);
      const double err = (back - x).norm() / x.norm();
      if (!(err < 1e-9)) {
        throw std::runtime_error("FFT backend self-test failed at length " + std::to_string(n));
      }
    }
  });
}

Vector circular_convolve_naive(const Vector& z, const Vector& x) {
  if (z.size() != x.size()) throw std::invalid_argument("circular_convolve: length mismatch");
  const auto n = static_cast<std::size_t>(z.size());
  Vector out = Vector::Zero(z.size());
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += z(cyclic_sub(j, k, n)) * x(k);
    out(j) = acc;
  }
  return out;
}

namespace {

Vector convolve_with_spectrum(const CVector& z_hat, const Vector& x, double scale) {
  const CVector x_hat = fft_forward(x.cast<Complex>());
  const CVector prod = z_hat.cwiseProduct(x_hat);
  const CVector conv = fft_inverse_unscaled(prod) / static_cast<double>(x.size());
  return real_part_checked(conv, scale);
}

Vector correlate_with_spectrum(const CVector& z_hat, const Vector& u, double scale) {
  const CVector u_hat = fft_forward(u.cast<Complex>());
  const CVector prod = z_hat.conjugate().cwiseProduct(u_hat);
  const CVector corr = fft_inverse_unscaled(prod) / static_cast<double>(u.size());
  return real_part_checked(corr, scale);
}

}  // namespace

Vector circular_convolve(const Vector& z, const Vector& x) {
  if (z.size() != x.size()) throw std::invalid_argument("circular_convolve: length mismatch");
  if (z.size() == 0) throw std::invalid_argument("circular_convolve: empty input");
  verify_fft_backend();
  return convolve_with_spectrum(fft_forward(z.cast<Complex>()), x, z.norm() * x.norm());
}

Vector circular_correlate(const Vector& z, const Vector& u) {
  if (z.size() != u.size()) throw std::invalid_argument("circular_correlate: length mismatch");
  if (z.size() == 0) throw std::invalid_argument("circular_correlate: empty input");
  verify_fft_backend();
  return correlate_with_spectrum(fft_forward(z.cast<Complex>()), u, z.norm() * u.norm());
}

// ---------------------------------------------------------------------------
// Partial circulant

PartialCirculantSpec::PartialCirculantSpec(Vector generator, std::vector<std::size_t> rows)
    : z(std::move(generator)), omega(std::move(rows)) {
  if (z.size() == 0) throw std::invalid_argument("PartialCirculantSpec: empty generator");
  if (omega.empty() || omega.size() > n()) {
    throw std::invalid_argument("PartialCirculantSpec: need 1 <= |omega| <= n");
  }
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (omega[i] >= n()) throw std::invalid_argument("PartialCirculantSpec: row index out of range");
    if (i > 0 && omega[i] <= omega[i - 1]) {
      throw std::invalid_argument("PartialCirculantSpec: rows must be sorted and distinct");
    }
  }
  verify_fft_backend();
  spectrum = fft_forward(z.cast<Complex>());
}

Vector apply_partial_circulant(const PartialCirculantSpec& spec, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != spec.n()) {
    throw std::invalid_argument("apply_partial_circulant: dimension mismatch");
  }
  const Vector full = convolve_with_spectrum(spec.spectrum, x, spec.z.norm() * x.norm());
  Vector out(spec.m());
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.m()));
  for (std::size_t i = 0; i < spec.m(); ++i) out(i) = scale * full(spec.omega[i]);
  return out;
}

Vector adjoint_partial_circulant(const PartialCirculantSpec& spec, const Vector& v) {
  if (static_cast<std::size_t>(v.size()) != spec.m()) {
    throw std::invalid_argument("adjoint_partial_circulant: dimension mismatch");
  }
  Vector scattered = Vector::Zero(spec.n());
  for (std::size_t i = 0; i < spec.m(); ++i) scattered(spec.omega[i]) = v(i);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.m()));
  return scale * correlate_with_spectrum(spec.spectrum, scattered, spec.z.norm() * v.norm());
}

Matrix dense_partial_circulant(const PartialCirculantSpec& spec) {
  const std::size_t n = spec.n();
  Matrix a(spec.m(), n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.m()));
  for (std::size_t i = 0; i < spec.m(); ++i) {
    for (std::size_t k = 0; k < n; ++k) a(i, k) = scale * spec.z(cyclic_sub(spec.omega[i], k, n));
  }
  return a;
}

// ---------------------------------------------------------------------------
// Gabor

GaborSpec::GaborSpec(CVector window) : h(std::move(window)) {
  if (h.size() == 0 || h.norm() == 0.0) throw std::invalid_argument("GaborSpec: window must be nonzero");
  verify_fft_backend();
}

CVector gabor_apply(const GaborSpec& spec, const CVector& x) {
  const std::size_t m = spec.m();
  if (static_cast<std::size_t>(x.size()) != m * m) {
    throw std::invalid_argument("gabor_apply: expected m^2 coefficients");
  }
  CVector out = CVector::Zero(m);
  for (std::size_t k = 0; k < m; ++k) {
    // X_k(j) = sum_l x_{k,l} e^{2 pi i l j / m}
    const CVector xk = fft_inverse_unscaled(x.segment(k * m, m));
    for (std::size_t j = 0; j < m; ++j) out(j) += spec.h(cyclic_sub(j, k, m)) * xk(j);
  }
  return out;
}

CVector gabor_adjoint(const GaborSpec& spec, const CVector& v) {
  const std::size_t m = spec.m();
  if (static_cast<std::size_t>(v.size()) != m) throw std::invalid_argument("gabor_adjoint: dimension mismatch");
  CVector out(m * m);
  CVector w(m);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < m; ++j) w(j) = std::conj(spec.h(cyclic_sub(j, k, m))) * v(j);
    out.segment(k * m, m) = fft_forward(w);
  }
  return out;
}

CVector gabor_column(const GaborSpec& spec, std::size_t lambda) {
  const std::size_t m = spec.m();
  if (lambda >= m * m) throw std::out_of_range("gabor_column: index out of range");
  const std::size_t k = lambda / m;
  const std::size_t l = lambda % m;
  CVector col(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>((l * j) % m) / static_cast<double>(m);
    col(j) = std::polar(1.0, phase) * spec.h(cyclic_sub(j, k, m));
  }
  return col;
}

CMatrix dense_gabor(const GaborSpec& spec) {
  CMatrix a(spec.m(), spec.n());
  for (std::size_t c = 0; c < spec.n(); ++c) a.col(c) = gabor_column(spec, c);
  return a;
}

CMatrix time_frequency_shift(std::size_t m, std::size_t k, std::size_t l) {
  CMatrix p = CMatrix::Zero(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>((l * j) % m) / static_cast<double>(m);
    p(j, cyclic_sub(j, k, m)) = std::polar(1.0, phase);
  }
  return p;
}

// ---------------------------------------------------------------------------
// MeasurementOperator

MeasurementOperator::MeasurementOperator(Backend backend, Backing backing)
    : backend_(std::move(backend)), backing_(backing) {
  std::visit(
      [this](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, PartialCirculantSpec>) {
          field_ = Field::real;
          rows_ = b.m();
          cols_ = b.n();
        } else if constexpr (std::is_same_v<T, GaborSpec>) {
          field_ = Field::complex;
          rows_ = b.m();
          cols_ = b.n();
        } else if constexpr (std::is_same_v<T, Matrix>) {
          field_ = Field::real;
          rows_ = static_cast<std::size_t>(b.rows());
          cols_ = static_cast<std::size_t>(b.cols());
        } else {
          field_ = Field::complex;
          rows_ = static_cast<std::size_t>(b.rows());
          cols_ = static_cast<std::size_t>(b.cols());
        }
      },
      backend_);
}

MeasurementOperator MeasurementOperator::partial_circulant(PartialCirculantSpec spec) {
  return MeasurementOperator(std::move(spec), Backing::partial_circulant);
}
MeasurementOperator MeasurementOperator::gabor(GaborSpec spec) {
  return MeasurementOperator(std::move(spec), Backing::gabor);
}
MeasurementOperator MeasurementOperator::dense(Matrix phi) {
  return MeasurementOperator(std::move(phi), Backing::dense);
}
MeasurementOperator MeasurementOperator::explicit_real(Matrix a) {
  return MeasurementOperator(std::move(a), Backing::explicit_matrix);
}
MeasurementOperator MeasurementOperator::explicit_complex(CMatrix a) {
  return MeasurementOperator(std::move(a), Backing::explicit_matrix);
}

CVector MeasurementOperator::apply(const CVector& x) const {
  if (static_cast<std::size_t>(x.size()) != cols_) throw std::invalid_argument("apply: dimension mismatch");
  return std::visit(
      [&](const auto& b) -> CVector {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, PartialCirculantSpec>) {
          const Vector re = apply_partial_circulant(b, x.real());
          const Vector im = apply_partial_circulant(b, x.imag());
          CVector out(re.size());
          out.real() = re;
          out.imag() = im;
          return out;
        } else if constexpr (std::is_same_v<T, GaborSpec>) {
          return gabor_apply(b, x);
        } else if constexpr (std::is_same_v<T, Matrix>) {
          return b.template cast<Complex>() * x;
        } else {
          return b * x;
        }
      },
      backend_);
}

CVector MeasurementOperator::adjoint_apply(const CVector& v) const {
  if (static_cast<std::size_t>(v.size()) != rows_) {
    throw std::invalid_argument("adjoint_apply: dimension mismatch");
  }
  return std::visit(
      [&](const auto& b) -> CVector {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, PartialCirculantSpec>) {
          const Vector re = adjoint_partial_circulant(b, v.real());
          const Vector im = adjoint_partial_circulant(b, v.imag());
          CVector out(re.size());
          out.real() = re;
          out.imag() = im;
          return out;
        } else if constexpr (std::is_same_v<T, GaborSpec>) {
          return gabor_adjoint(b, v);
        } else if constexpr (std::is_same_v<T, Matrix>) {
          return b.transpose().template cast<Complex>() * v;
        } else {
          return b.adjoint() * v;
        }
      },
      backend_);
}

Vector MeasurementOperator::apply(const Vector& x) const {
  if (!is_real()) throw std::logic_error("apply: real path requested on a complex operator");
  if (static_cast<std::size_t>(x.size()) != cols_) throw std::invalid_argument("apply: dimension mismatch");
  if (const auto* pc = std::get_if<PartialCirculantSpec>(&backend_)) return apply_partial_circulant(*pc, x);
  return std::get<Matrix>(backend_) * x;
}

Vector MeasurementOperator::adjoint_apply(const Vector& v) const {
  if (!is_real()) throw std::logic_error("adjoint_apply: real path requested on a complex operator");
  if (static_cast<std::size_t>(v.size()) != rows_) {
    throw std::invalid_argument("adjoint_apply: dimension mismatch");
  }
  if (const auto* pc = std::get_if<PartialCirculantSpec>(&backend_)) return adjoint_partial_circulant(*pc, v);
  return std::get<Matrix>(backend_).transpose() * v;
}

CVector MeasurementOperator::column(std::size_t k) const {
  if (k >= cols_) throw std::out_of_range("column: index out of range");
  return std::visit(
      [&](const auto& b) -> CVector {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, PartialCirculantSpec>) {
          CVector col(b.m());
          const double scale = 1.0 / std::sqrt(static_cast<double>(b.m()));
          for (std::size_t i = 0; i < b.m(); ++i) col(i) = scale * b.z(cyclic_sub(b.omega[i], k, b.n()));
          return col;
        } else if constexpr (std::is_same_v<T, GaborSpec>) {
          return gabor_column(b, k);
        } else if constexpr (std::is_same_v<T, Matrix>) {
          return b.col(k).template cast<Complex>();
        } else {
          return b.col(k);
        }
      },
      backend_);
}

Matrix MeasurementOperator::dense_real() const {
  if (!is_real()) throw std::logic_error("dense_real: operator is complex");
  if (const auto* pc = std::get_if<PartialCirculantSpec>(&backend_)) return dense_partial_circulant(*pc);
  return std::get<Matrix>(backend_);
}

CMatrix MeasurementOperator::dense_complex() const {
  if (is_real()) return dense_real().cast<Complex>();
  if (const auto* g = std::get_if<GaborSpec>(&backend_)) return dense_gabor(*g);
  return std::get<CMatrix>(backend_);
}

Matrix MeasurementOperator::columns_real(const std::vector<std::size_t>& cols) const {
  if (!is_real()) throw std::logic_error("columns_real: operator is complex");
  Matrix out(rows_, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (const auto* dense = std::get_if<Matrix>(&backend_)) {
      out.col(c) = dense->col(cols[c]);
    } else {
      out.col(c) = column(cols[c]).real();
    }
  }
  return out;
}

CMatrix MeasurementOperator::columns_complex(const std::vector<std::size_t>& cols) const {
  CMatrix out(rows_, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(c) = column(cols[c]);
  return out;
}

MeasurementOperator dense_ensemble(std::size_t m, std::size_t n, const SamplerSpec& spec,
                                   RngStream& stream) {
  if (m == 0 || n == 0) throw std::invalid_argument("dense_ensemble: empty dimensions");
  SamplerSpec entries = spec;
  entries.standardized = true;
  Matrix phi(m, n);
  sample_into(entries, stream, std::span<double>(phi.data(), m * n));
  phi /= std::sqrt(static_cast<double>(m));
  return MeasurementOperator::dense(std::move(phi));
}

// ---------------------------------------------------------------------------
// V_x

VxOperator build_vx_circulant(const Vector& x, const std::vector<std::size_t>& omega) {
  const auto n = static_cast<std::size_t>(x.size());
  if (n == 0 || omega.empty()) throw std::invalid_argument("build_vx_circulant: empty input");
  VxOperator vx;
  vx.source = x.cast<Complex>();
  vx.complex_field = false;
  vx.matrix = CMatrix::Zero(omega.size(), n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(omega.size()));
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (omega[i] >= n) throw std::invalid_argument("build_vx_circulant: row index out of range");
    for (std::size_t k = 0; k < n; ++k) vx.matrix(i, k) = scale * x(cyclic_sub(omega[i], k, n));
  }
  return vx;
}

VxOperator build_vx_gabor(const CVector& x) {
  const auto n = static_cast<std::size_t>(x.size());
  const auto m = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (m == 0 || m * m != n) throw std::invalid_argument("build_vx_gabor: length must be a perfect square m^2");
  VxOperator vx;
  vx.source = x;
  vx.complex_field = true;
  vx.matrix = CMatrix::Zero(m, m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l < m; ++l) {
      const Complex coeff = x(k * m + l);
      if (coeff == Complex(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < m; ++j) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>((l * j) % m) / static_cast<double>(m);
        vx.matrix(j, cyclic_sub(j, k, m)) += scale * coeff * std::polar(1.0, phase);
      }
    }
  }
  return vx;
}

void write_dense_csv(std::ostream& os, const CMatrix& a) {
  os << "row,col,re,im\n";
  char buf[96];
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g,%.17g\n", static_cast<long>(r), static_cast<long>(c),
                    a(r, c).real(), a(r, c).imag());
      os << buf;
    }
  }
}

}  // namespace chaoslab
