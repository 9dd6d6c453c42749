#pragma once

#include <Eigen/Dense>

#include "seaqt/operators.hpp"
#include "seaqt/units.hpp"

namespace seaqt {

/// Unit-trace positive-semidefinite state with a cached spectral decomposition.
///
/// Validation rules:
///  - trace within 1e-10 of 1,
///  - eigenvalues in [-1e-10, 1 + 1e-10]; values in [-1e-10, 0) are clipped to 0
///    and the spectrum renormalized (rounding), anything more negative is a
///    hard error (genuine positivity violation),
///  - eigenvalues below rank_epsilon * lambda_max count as exact zeros for the
///    range/kernel split used by the entropy operator.
///
/// Instances are immutable; the spectral decomposition and sqrt(rho) are
/// computed once at construction and shared freely across threads.
class DensityOperator {
public:
  explicit DensityOperator(const Matrix& m, double rank_epsilon = 1e-12);

  /// Diagonal state from a probability vector (identity eigenvectors).
  static DensityOperator diagonal(const RealVector& p, double rank_epsilon = 1e-12);

  /// Rank-one projector onto psi (normalized internally).
  static DensityOperator pure(const Eigen::VectorXcd& psi, double rank_epsilon = 1e-12);

  /// Lenient factory for integrator stage states: clips any negative
  /// eigenvalue to zero and renormalizes without erroring. Off-manifold trial
  /// states from rejected adaptive steps must still be evaluable.
  static DensityOperator clipped(const Matrix& m, double rank_epsilon = 1e-12);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

  /// Eigenvalues in descending order with matching eigenvector columns.
  const RealVector& eigenvalues() const { return vals_; }
  const Matrix& eigenvectors() const { return vecs_; }

  /// Square-root density operator: same eigenvectors, square-rooted eigenvalues.
  const Matrix& sqrt() const { return sqrt_; }

  double rank_epsilon() const { return rank_eps_; }
  Eigen::Index rank() const { return rank_; }

private:
  DensityOperator() = default;
  static DensityOperator build(const Matrix& m, double rank_epsilon, bool lenient);

  Matrix m_, vecs_, sqrt_;
  RealVector vals_;
  double rank_eps_ = 1e-12;
  Eigen::Index rank_ = 0;
};

/// Tr(rho F), real by hermiticity.
double mean_value(const DensityOperator& rho, const HermitianOperator& f);
double mean_value(const DensityOperator& rho, const Matrix& f);

/// dF = F - Tr(rho F) I.
HermitianOperator center(const HermitianOperator& f, const DensityOperator& rho);

/// Cov(F,G) = Tr(rho {dF, dG})/2 = (sqrt(rho) dF | sqrt(rho) dG).
double covariance(const DensityOperator& rho, const HermitianOperator& f,
                  const HermitianOperator& g);

/// (1/2i) Tr(rho [F, G]).
double comm_correlation(const DensityOperator& rho, const HermitianOperator& f,
                        const HermitianOperator& g);

/// Correlation coefficients r (symmetric) and c (antisymmetric); r^2 + c^2 <= 1.
struct CorrelationPair {
  double r = 0.0;
  double c = 0.0;
};

CorrelationPair correlation_coeffs(const DensityOperator& rho, const HermitianOperator& f,
                                   const HermitianOperator& g);

/// Entropy operator S = -kB ln(rho) on the range of rho, zero on its kernel.
/// The null operator for pure states.
HermitianOperator entropy_operator(const DensityOperator& rho, const UnitSystem& units = {});

/// <S> = -kB Tr(rho ln rho), summed over nonzero eigenvalues.
double entropy(const DensityOperator& rho, const UnitSystem& units = {});

}  // namespace seaqt
