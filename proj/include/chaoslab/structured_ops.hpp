#pragma once

#include "chaoslab/common.hpp"
#include "chaoslab/samplers.hpp"

#include <cstddef>
#include <iosfwd>
#include <variant>
#include <vector>

namespace chaoslab {

/// Runs the FFT round-trip self-test once per process (relative error must be
/// below 1e-9 on a battery of lengths). Throws std::runtime_error on failure.
void verify_fft_backend();

/// (z * x)_j = sum_k z_{(j-k) mod n} x_k, via a length-n FFT.
Vector circular_convolve(const Vector& z, const Vector& x);
/// (corr(z, u))_k = sum_j z_{(j-k) mod n} u_j; the transpose of convolution by z.
Vector circular_correlate(const Vector& z, const Vector& u);

/// O(n^2) reference loop. Used by tests and the self-check paths.
Vector circular_convolve_naive(const Vector& z, const Vector& x);

/// Generator z and sorted, distinct row set omega (0-based).
struct PartialCirculantSpec {
  Vector z;
  std::vector<std::size_t> omega;
  /// DFT of z, cached at construction.
  CVector spectrum;

  PartialCirculantSpec(Vector generator, std::vector<std::size_t> rows);
  std::size_t n() const { return static_cast<std::size_t>(z.size()); }
  std::size_t m() const { return omega.size(); }
};

/// Window h in C^m; the system has m^2 columns pi(k,l)h indexed by
/// lambda = k*m + l (k = translation, outer; l = modulation, inner).
struct GaborSpec {
  CVector h;

  explicit GaborSpec(CVector window);
  std::size_t m() const { return static_cast<std::size_t>(h.size()); }
  std::size_t n() const { return m() * m(); }
};

/// Phi x = (1/sqrt m) (z * x) restricted to omega.
Vector apply_partial_circulant(const PartialCirculantSpec& spec, const Vector& x);
/// Phi^T v: scatter onto omega, then cross-correlate with z.
Vector adjoint_partial_circulant(const PartialCirculantSpec& spec, const Vector& v);
Matrix dense_partial_circulant(const PartialCirculantSpec& spec);

/// sum_lambda x_lambda pi(lambda) h with (pi(k,l)h)_j = e^{2 pi i l j / m} h_{(j-k) mod m}.
CVector gabor_apply(const GaborSpec& spec, const CVector& x);
CVector gabor_adjoint(const GaborSpec& spec, const CVector& v);
/// Column lambda = k*m + l of Psi_h, i.e. pi(k,l)h.
CVector gabor_column(const GaborSpec& spec, std::size_t lambda);
CMatrix dense_gabor(const GaborSpec& spec);
/// The m x m matrix of the time-frequency shift pi(k,l) = M^l T^k.
CMatrix time_frequency_shift(std::size_t m, std::size_t k, std::size_t l);

enum class Field { real, complex };
enum class Backing { partial_circulant, gabor, dense, explicit_matrix };

/// An m x n linear map with fast apply / adjoint and dense materialization.
/// Immutable after construction; apply is reentrant.
class MeasurementOperator {
 public:
  static MeasurementOperator partial_circulant(PartialCirculantSpec spec);
  static MeasurementOperator gabor(GaborSpec spec);
  /// A random dense ensemble (backing = dense).
  static MeasurementOperator dense(Matrix phi);
  static MeasurementOperator explicit_real(Matrix a);
  static MeasurementOperator explicit_complex(CMatrix a);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Field field() const { return field_; }
  Backing backing() const { return backing_; }
  bool is_real() const { return field_ == Field::real; }

  CVector apply(const CVector& x) const;
  CVector adjoint_apply(const CVector& v) const;
  /// Real paths; throw std::logic_error for complex operators.
  Vector apply(const Vector& x) const;
  Vector adjoint_apply(const Vector& v) const;

  CVector column(std::size_t k) const;
  Matrix dense_real() const;
  CMatrix dense_complex() const;

  /// Restriction to the listed columns, materialized.
  Matrix columns_real(const std::vector<std::size_t>& cols) const;
  CMatrix columns_complex(const std::vector<std::size_t>& cols) const;

 private:
  using Backend = std::variant<PartialCirculantSpec, GaborSpec, Matrix, CMatrix>;
  MeasurementOperator(Backend backend, Backing backing);

  Backend backend_;
  Backing backing_;
  Field field_;
  std::size_t rows_;
  std::size_t cols_;
};

/// Phi = (1/sqrt m) (xi_ij) with i.i.d. standardized entries drawn from spec.
MeasurementOperator dense_ensemble(std::size_t m, std::size_t n, const SamplerSpec& spec,
                                   RngStream& stream);

/// Chaos reformulation matrix V_x and the vector it was built from.
struct VxOperator {
  CMatrix matrix;
  CVector source;
  bool complex_field = false;

  Matrix real() const { return matrix.real(); }
  double frobenius() const { return matrix.norm(); }
};

/// m x n real matrix with rows (V_x)_{i,k} = x_{(omega_i - k) mod n} / sqrt(m);
/// V_x eta equals the partial circulant generated by eta applied to x.
VxOperator build_vx_circulant(const Vector& x, const std::vector<std::size_t>& omega);

/// m x m complex matrix (1/sqrt m) sum_lambda x_lambda pi(lambda); V_x eta
/// equals Psi_h x with h = eta / sqrt(m).
VxOperator build_vx_gabor(const CVector& x);

/// Column-major CSV dump: header "row,col,re,im", one line per entry.
void write_dense_csv(std::ostream& os, const CMatrix& a);

}  // namespace chaoslab
