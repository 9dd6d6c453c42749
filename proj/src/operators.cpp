#include "seaqt/operators.hpp"

#include <string>

namespace seaqt {

namespace detail {
void require_same_dim(Eigen::Index a, Eigen::Index b, const char* where) {
  if (a != b) {
    throw DimensionError(std::string(where) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}
}  // namespace detail

HermitianOperator::HermitianOperator(Matrix m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionError("HermitianOperator: matrix must be square with dim >= 1");
  }
  if (!m.allFinite()) {
    throw ArgumentError("HermitianOperator: entries must be finite");
  }
  const Matrix asym = m - m.adjoint();
  const double scale = std::max(1.0, m.norm());
  if (asym.norm() > 1e-8 * scale) {
    throw ArgumentError("HermitianOperator: input is not Hermitian (asymmetry " +
                        std::to_string(asym.norm() / scale) + " exceeds 1e-8)");
  }
  m_ = 0.5 * (m + m.adjoint().eval());
}

HermitianOperator HermitianOperator::identity(Eigen::Index dim) {
  return HermitianOperator(Matrix::Identity(dim, dim), AlreadyHermitian{});
}

HermitianOperator HermitianOperator::zero(Eigen::Index dim) {
  return HermitianOperator(Matrix::Zero(dim, dim), AlreadyHermitian{});
}

HermitianOperator HermitianOperator::diagonal(const RealVector& entries) {
  if (entries.size() < 1) throw DimensionError("HermitianOperator::diagonal: dim >= 1 required");
  Matrix m = Matrix::Zero(entries.size(), entries.size());
  for (Eigen::Index i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return HermitianOperator(std::move(m), AlreadyHermitian{});
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  detail::require_same_dim(dim(), o.dim(), "HermitianOperator::operator+");
  return HermitianOperator(m_ + o.m_, AlreadyHermitian{});
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  detail::require_same_dim(dim(), o.dim(), "HermitianOperator::operator-");
  return HermitianOperator(m_ - o.m_, AlreadyHermitian{});
}

HermitianOperator HermitianOperator::operator*(double s) const {
  return HermitianOperator(s * m_, AlreadyHermitian{});
}

double scalar_product(const Matrix& f, const Matrix& g) {
  detail::require_same_dim(f.rows(), g.rows(), "scalar_product");
  // Tr(F^dag G) = sum conj(F_ij) G_ij
  const Complex t = (f.conjugate().cwiseProduct(g)).sum();
  return t.real();
}

double skew_product(const Matrix& f, const Matrix& g) {
  detail::require_same_dim(f.rows(), g.rows(), "skew_product");
  // i(Tr(F^dag G) - conj(Tr(F^dag G)))/2 = -Im Tr(F^dag G)
  const Complex t = (f.conjugate().cwiseProduct(g)).sum();
  return -t.imag();
}

}  // namespace seaqt
