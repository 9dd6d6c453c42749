#pragma once

#include <Eigen/Dense>
#include <complex>

#include "seaqt/errors.hpp"

namespace seaqt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Dense Hermitian operator on a finite-dimensional Hilbert space.
///
/// Construction symmetrizes the input as (F + F^dag)/2. Inputs whose
/// anti-Hermitian part exceeds 1e-8 (relative to the operator norm) are
/// rejected: silent drift from integrators must be caught, small floating
/// asymmetry must not.
class HermitianOperator {
public:
  explicit HermitianOperator(Matrix m);

  static HermitianOperator identity(Eigen::Index dim);
  static HermitianOperator zero(Eigen::Index dim);
  static HermitianOperator diagonal(const RealVector& entries);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double frobenius_norm() const { return m_.norm(); }

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;

private:
  struct AlreadyHermitian {};
  HermitianOperator(Matrix m, AlreadyHermitian) : m_(std::move(m)) {}
  Matrix m_;
};

/// Real scalar product (F|G) = Tr(F^dag G + G^dag F)/2 on general linear operators.
double scalar_product(const Matrix& f, const Matrix& g);

/// Real antisymmetric bilinear form (F\G) = i Tr(F^dag G - G^dag F)/2.
double skew_product(const Matrix& f, const Matrix& g);

inline double scalar_product(const HermitianOperator& f, const HermitianOperator& g) {
  return scalar_product(f.matrix(), g.matrix());
}
inline double skew_product(const HermitianOperator& f, const HermitianOperator& g) {
  return skew_product(f.matrix(), g.matrix());
}

namespace detail {
void require_same_dim(Eigen::Index a, Eigen::Index b, const char* where);
}

}  // namespace seaqt
