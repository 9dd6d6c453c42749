#include <doctest.h>

#include "seaqt/operators.hpp"
#include "oracles.hpp"

using namespace seaqt;

namespace {

Matrix sigma_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix sigma_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

}  // namespace

TEST_CASE("scalar product basics") {
  const Matrix id = Matrix::Identity(2, 2);
  CHECK_NEAR(scalar_product(id, id), 2.0, 1e-14);
  CHECK_NEAR(scalar_product(sigma_x(), sigma_y()), 0.0, 1e-14);
  CHECK_NEAR(scalar_product(sigma_x(), sigma_x()), 2.0, 1e-14);

  // symmetry
  Matrix a(2, 2), b(2, 2);
  a << Complex(0.3, 0.1), Complex(1, -2), Complex(1, 2), Complex(-0.5, 0);
  b << Complex(2, 0), Complex(0, 1), Complex(0, -1), Complex(1, 0);
  CHECK_NEAR(scalar_product(a, b), scalar_product(b, a), 1e-14);
}

TEST_CASE("skew product basics") {
  CHECK_NEAR(skew_product(sigma_x(), sigma_x()), 0.0, 1e-14);
  // i Tr(sx sy - sy sx)/2 = i Tr(2i sz)/2 has zero trace
  CHECK_NEAR(skew_product(sigma_x(), sigma_y()), 0.0, 1e-14);
  // sqrt(rho)-weighted pair for rho = diag(1,0)
  Matrix sq(2, 2);
  sq << 1, 0, 0, 0;
  const Matrix f = sq * sigma_x();
  const Matrix g = sq * sigma_y();
  CHECK_NEAR(skew_product(f, g), 1.0, 1e-14);
  CHECK_NEAR(skew_product(g, f), -1.0, 1e-14);
}

TEST_CASE("scalar product is positive definite on Hermitian operators") {
  const HermitianOperator f(sigma_x() * 0.5 + sigma_y() * 0.25);
  CHECK(scalar_product(f, f) > 0.0);
  const HermitianOperator z = HermitianOperator::zero(3);
  CHECK(scalar_product(z, z) == 0.0);
}

TEST_CASE("hermiticity is enforced on construction") {
  Matrix bad(2, 2);
  bad << 0, 1, 0, 0;  // grossly non-Hermitian
  CHECK_THROWS_AS(HermitianOperator{bad}, ArgumentError);

  // small asymmetry is symmetrized away
  Matrix nearly(2, 2);
  nearly << 1.0, Complex(0.5, 1e-10), Complex(0.5, -1e-10 + 1e-11), 2.0;
  const HermitianOperator h(nearly);
  const Matrix asym = h.matrix() - h.matrix().adjoint();
  CHECK(asym.norm() <= 1e-15);
}

TEST_CASE("dimension mismatches are rejected") {
  CHECK_THROWS_AS(scalar_product(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), DimensionError);
  CHECK_THROWS_AS(skew_product(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), DimensionError);
}
