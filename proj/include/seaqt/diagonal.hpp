#pragma once

#include <Eigen/Dense>

#include "seaqt/units.hpp"

namespace seaqt {

/// State functionals of a diagonal state (probability vector p over level
/// energies e), evaluated without building any matrix. Zero entries of p are
/// treated as exact kernel levels: they contribute nothing and their
/// delta_m entry is zero, which is what keeps the cardinality invariant.
struct DiagonalCoefficients {
  double mean_energy = 0.0;
  double entropy = 0.0;   ///< <S> = -kB sum p ln p
  double cov_hh = 0.0;
  double cov_hs = 0.0;
  double cov_ss = 0.0;
  double theta = 0.0;     ///< Cov(H,H)/Cov(H,S); +inf when Cov(H,S) = 0
  double cov_mm = 0.0;    ///< sum p dM_n^2, never negative
  Eigen::VectorXd delta_m_diag;  ///< dM_n = -kB ln p_n - <S> - (e_n - <H>)/theta
};

DiagonalCoefficients diagonal_coefficients(const Eigen::VectorXd& p, const Eigen::VectorXd& e,
                                           const UnitSystem& units = {});

}  // namespace seaqt
