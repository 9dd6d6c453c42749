#include "seaqt/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seaqt {

namespace {
constexpr double kTraceTol = 1e-10;
constexpr double kEigFloor = -1e-10;
constexpr double kEigCeil = 1.0 + 1e-10;
}  // namespace

DensityOperator DensityOperator::build(const Matrix& m, double rank_epsilon, bool lenient) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionError("DensityOperator: matrix must be square with dim >= 1");
  }
  if (!m.allFinite()) throw ValidationError("DensityOperator: entries must be finite");
  if (!(rank_epsilon > 0.0) || rank_epsilon >= 1.0) {
    throw ArgumentError("DensityOperator: rank_epsilon must lie in (0, 1)");
  }

  const Matrix sym = 0.5 * (m + m.adjoint().eval());
  if (!lenient) {
    const double asym = (m - m.adjoint().eval()).norm();
    if (asym > 1e-8 * std::max(1.0, m.norm())) {
      throw ValidationError("DensityOperator: state is not Hermitian");
    }
    const double tr = sym.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol) {
      throw ValidationError("DensityOperator: trace " + std::to_string(tr) +
                            " deviates from 1 beyond 1e-10");
    }
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) {
    throw ValidationError("DensityOperator: eigendecomposition failed");
  }

  // Eigen returns ascending order; store descending.
  const Eigen::Index d = sym.rows();
  RealVector vals(d);
  Matrix vecs(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    vals[i] = es.eigenvalues()[d - 1 - i];
    vecs.col(i) = es.eigenvectors().col(d - 1 - i);
  }

  for (Eigen::Index i = 0; i < d; ++i) {
    if (vals[i] < 0.0) {
      if (!lenient && vals[i] < kEigFloor) {
        throw ValidationError("DensityOperator: eigenvalue " + std::to_string(vals[i]) +
                              " below -1e-10, state is not positive semidefinite");
      }
      vals[i] = 0.0;
    }
    if (!lenient && vals[i] > kEigCeil) {
      throw ValidationError("DensityOperator: eigenvalue " + std::to_string(vals[i]) +
                            " exceeds 1, rho >= rho^2 violated");
    }
  }

  const double total = vals.sum();
  if (!(total > 0.0)) throw ValidationError("DensityOperator: state has zero trace");
  vals /= total;

  DensityOperator rho;
  rho.rank_eps_ = rank_epsilon;
  rho.vals_ = vals;
  rho.vecs_ = vecs;

  const double cutoff = rank_epsilon * vals[0];
  rho.rank_ = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (vals[i] > cutoff) {
      ++rho.rank_;
    } else {
      rho.vals_[i] = 0.0;  // kernel eigenvalues are exact zeros
    }
  }
  // Renormalize once more after kernel zeroing (no-op unless clipping happened).
  rho.vals_ /= rho.vals_.sum();
  RealVector sq(d);
  for (Eigen::Index i = 0; i < d; ++i) sq[i] = std::sqrt(rho.vals_[i]);

  rho.m_ = vecs * rho.vals_.asDiagonal() * vecs.adjoint();
  rho.sqrt_ = vecs * sq.asDiagonal() * vecs.adjoint();
  return rho;
}

DensityOperator::DensityOperator(const Matrix& m, double rank_epsilon) {
  *this = build(m, rank_epsilon, /*lenient=*/false);
}

DensityOperator DensityOperator::clipped(const Matrix& m, double rank_epsilon) {
  return build(m, rank_epsilon, /*lenient=*/true);
}

DensityOperator DensityOperator::diagonal(const RealVector& p, double rank_epsilon) {
  if (p.size() < 1) throw DimensionError("DensityOperator::diagonal: dim >= 1 required");
  Matrix m = Matrix::Zero(p.size(), p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) m(i, i) = p[i];
  return DensityOperator(m, rank_epsilon);
}

DensityOperator DensityOperator::pure(const Eigen::VectorXcd& psi, double rank_epsilon) {
  const double n2 = psi.squaredNorm();
  if (!(n2 > 0.0)) throw ArgumentError("DensityOperator::pure: zero vector");
  Matrix m = (psi * psi.adjoint()) / n2;
  return DensityOperator(m, rank_epsilon);
}

double mean_value(const DensityOperator& rho, const Matrix& f) {
  detail::require_same_dim(rho.dim(), f.rows(), "mean_value");
  return (rho.matrix() * f).trace().real();
}

double mean_value(const DensityOperator& rho, const HermitianOperator& f) {
  return mean_value(rho, f.matrix());
}

HermitianOperator center(const HermitianOperator& f, const DensityOperator& rho) {
  detail::require_same_dim(rho.dim(), f.dim(), "center");
  const double mean = mean_value(rho, f);
  return f - HermitianOperator::identity(f.dim()) * mean;
}

double covariance(const DensityOperator& rho, const HermitianOperator& f,
                  const HermitianOperator& g) {
  detail::require_same_dim(rho.dim(), f.dim(), "covariance");
  detail::require_same_dim(rho.dim(), g.dim(), "covariance");
  // Tr(rho {dF,dG})/2 = Re Tr(rho F G) - <F><G>
  const double raw = (rho.matrix() * f.matrix() * g.matrix()).trace().real();
  return raw - mean_value(rho, f) * mean_value(rho, g);
}

double comm_correlation(const DensityOperator& rho, const HermitianOperator& f,
                        const HermitianOperator& g) {
  detail::require_same_dim(rho.dim(), f.dim(), "comm_correlation");
  detail::require_same_dim(rho.dim(), g.dim(), "comm_correlation");
  // (1/2i) Tr(rho [F,G]) = Im Tr(rho F G) for Hermitian rho, F, G
  return (rho.matrix() * f.matrix() * g.matrix()).trace().imag();
}

CorrelationPair correlation_coeffs(const DensityOperator& rho, const HermitianOperator& f,
                                   const HermitianOperator& g) {
  const double cff = covariance(rho, f, f);
  const double cgg = covariance(rho, g, g);
  if (!(cff > 0.0) || !(cgg > 0.0)) {
    throw DegenerateSpreadError("correlation_coeffs: both observables need positive spread");
  }
  const double denom = std::sqrt(cff * cgg);
  return CorrelationPair{covariance(rho, f, g) / denom, comm_correlation(rho, f, g) / denom};
}

HermitianOperator entropy_operator(const DensityOperator& rho, const UnitSystem& units) {
  units.validate();
  const Eigen::Index d = rho.dim();
  RealVector s(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double lam = rho.eigenvalues()[i];
    s[i] = (lam > 0.0) ? -units.kB * std::log(lam) : 0.0;
  }
  Matrix m = rho.eigenvectors() * s.asDiagonal() * rho.eigenvectors().adjoint();
  return HermitianOperator(std::move(m));
}

double entropy(const DensityOperator& rho, const UnitSystem& units) {
  units.validate();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rho.dim(); ++i) {
    const double lam = rho.eigenvalues()[i];
    if (lam > 0.0) acc -= lam * std::log(lam);
  }
  return units.kB * acc;
}

}  // namespace seaqt
