#include "seaqt/diagonal.hpp"

#include <cmath>
#include <limits>

#include "seaqt/errors.hpp"

namespace seaqt {

DiagonalCoefficients diagonal_coefficients(const Eigen::VectorXd& p, const Eigen::VectorXd& e,
                                           const UnitSystem& units) {
  if (p.size() != e.size()) throw DimensionError("diagonal_coefficients: size mismatch");
  const Eigen::Index n = p.size();
  const double kB = units.kB;

  DiagonalCoefficients c;
  c.delta_m_diag = Eigen::VectorXd::Zero(n);

  double mean_e = 0.0, s = 0.0, e2 = 0.0, els = 0.0, l2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pi = p[i];
    if (pi <= 0.0) continue;
    const double lp = std::log(pi);
    mean_e += pi * e[i];
    s -= pi * lp;
    e2 += pi * e[i] * e[i];
    els += pi * e[i] * lp;
    l2 += pi * lp * lp;
  }
  c.mean_energy = mean_e;
  c.entropy = kB * s;
  c.cov_hh = e2 - mean_e * mean_e;
  c.cov_hs = kB * (-els - mean_e * s);
  c.cov_ss = kB * kB * (l2 - s * s);
  c.theta = (c.cov_hs != 0.0) ? c.cov_hh / c.cov_hs
                              : std::numeric_limits<double>::infinity();

  // cov_mm from the dM entries directly: the subtraction form
  // Cov(S,S) - Cov(H,H)/theta^2 cancels catastrophically near equilibrium.
  double mm = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pi = p[i];
    if (pi <= 0.0) continue;
    const double dm = -kB * std::log(pi) - c.entropy -
                      (std::isfinite(c.theta) ? (e[i] - mean_e) / c.theta : 0.0);
    c.delta_m_diag[i] = dm;
    mm += pi * dm * dm;
  }
  c.cov_mm = mm;
  return c;
}

}  // namespace seaqt
