// Test-only oracles, independent of the library implementation paths they
// check: plain-loop functionals of diagonal states, finite differences,
// power iteration. Expected values in the tests were frozen from these.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

// Absolute-tolerance check; doctest's Approx is relative and degenerates for
// zero targets.
#define CHECK_NEAR(a, b, tol) CHECK(std::abs((a) - (b)) <= (tol))
#define REQUIRE_NEAR(a, b, tol) REQUIRE(std::abs((a) - (b)) <= (tol))

namespace oracle {

struct DiagonalStats {
  double mean_e = 0.0;
  double entropy = 0.0;  // nats (kB = 1)
  double cov_hh = 0.0;
  double cov_hs = 0.0;
  double cov_ss = 0.0;
  double theta = 0.0;
  double cov_mm = 0.0;
};

/// Direct evaluation of the diagonal-state functionals from first principles:
/// <H> = sum p e, <S> = -sum p ln p, Cov(A,B) = <AB> - <A><B> on the
/// diagonal, theta = Cov(H,H)/Cov(H,S), Cov(M,M) = Cov(S,S) - Cov(H,H)/theta^2.
inline DiagonalStats diagonal_stats(const std::vector<double>& p, const std::vector<double>& e) {
  DiagonalStats s;
  double sum_e = 0, sum_e2 = 0, sum_l = 0, sum_l2 = 0, sum_el = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    const double lp = std::log(p[i]);
    sum_e += p[i] * e[i];
    sum_e2 += p[i] * e[i] * e[i];
    sum_l += p[i] * lp;
    sum_l2 += p[i] * lp * lp;
    sum_el += p[i] * e[i] * lp;
  }
  s.mean_e = sum_e;
  s.entropy = -sum_l;
  s.cov_hh = sum_e2 - sum_e * sum_e;
  s.cov_hs = -sum_el - sum_e * s.entropy;
  s.cov_ss = sum_l2 - sum_l * sum_l;
  s.theta = s.cov_hh / s.cov_hs;
  s.cov_mm = s.cov_ss - s.cov_hh / (s.theta * s.theta);
  return s;
}

/// The bracket of the diagonal master equation, dp_n/dt for tau = 1:
/// -(p ln p + p <S> + p (e - <H>)/theta).
inline std::vector<double> diagonal_rates(const std::vector<double>& p,
                                          const std::vector<double>& e) {
  const DiagonalStats s = diagonal_stats(p, e);
  std::vector<double> out(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      out[i] = -(p[i] * std::log(p[i]) + p[i] * s.entropy + p[i] * (e[i] - s.mean_e) / s.theta);
    }
  }
  return out;
}

/// Central finite difference of a scalar function of time.
inline double central_difference(const std::function<double(double)>& f, double t, double h) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

/// Stationary distribution of a Pauli rate matrix by power iteration on
/// I + dt*L (L the generator), normalized each sweep.
inline Eigen::VectorXd pauli_stationary(const Eigen::MatrixXd& w, int iters = 200000,
                                        double dt = 1e-2) {
  const Eigen::Index n = w.rows();
  Eigen::VectorXd p = Eigen::VectorXd::Constant(n, 1.0 / double(n));
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXd rate = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index r = 0; r < n; ++r) {
        if (r == i) continue;
        rate[i] += w(i, r) * p[r] - w(r, i) * p[i];
      }
    }
    p += dt * rate;
    p = p.cwiseMax(0.0);
    p /= p.sum();
  }
  return p;
}

}  // namespace oracle
