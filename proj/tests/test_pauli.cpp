#include <doctest.h>

#include <cmath>

#include "seaqt/pauli.hpp"
#include "seaqt/scenarios.hpp"
#include "oracles.hpp"

using namespace seaqt;

namespace {

RealVector vec(std::initializer_list<double> v) {
  RealVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("pauli rhs basics") {
  Eigen::MatrixXd wm = Eigen::MatrixXd::Zero(2, 2);
  wm(1, 0) = 1.0;  // rate from level 1 to level 2
  const TransitionMatrix w(wm);

  const Eigen::VectorXd rate = pauli_rhs(vec({1.0, 0.0}), w);
  CHECK_NEAR(rate[0], -1.0, 1e-14);  // zero level repopulates at a finite rate
  CHECK_NEAR(rate[1], 1.0, 1e-14);
  CHECK_NEAR(rate.sum(), 0.0, 1e-14);

  // detailed-balance fixed point
  Eigen::MatrixXd wb(2, 2);
  wb << 0.0, 2.0, 1.0, 0.0;  // w12 = 2 (2->1), w21 = 1 (1->2): p* = (2/3, 1/3)
  const Eigen::VectorXd r0 = pauli_rhs(vec({2.0 / 3.0, 1.0 / 3.0}), TransitionMatrix(wb));
  CHECK(r0.cwiseAbs().maxCoeff() < 1e-14);

  // zero rates
  CHECK(pauli_rhs(vec({0.5, 0.5}), TransitionMatrix(Eigen::MatrixXd::Zero(2, 2))).norm() == 0.0);

  CHECK_THROWS_AS(TransitionMatrix(-Eigen::MatrixXd::Ones(2, 2)), ArgumentError);
}

TEST_CASE("pauli entropy rate") {
  // uniform p with symmetric w: equilibrium, zero rate
  Eigen::MatrixXd wm = Eigen::MatrixXd::Ones(3, 3);
  wm.diagonal().setZero();
  const TransitionMatrix w(wm);
  const PauliEntropyRate eq = pauli_entropy_rate(vec({1.0 / 3, 1.0 / 3, 1.0 / 3}), w);
  CHECK_FALSE(eq.divergent);
  CHECK_NEAR(eq.value, 0.0, 1e-14);

  // p = (1, 0) with inflow to the empty level: divergent
  Eigen::MatrixXd w2 = Eigen::MatrixXd::Zero(2, 2);
  w2(1, 0) = 1.0;
  const PauliEntropyRate dv = pauli_entropy_rate(vec({1.0, 0.0}), TransitionMatrix(w2));
  CHECK(dv.divergent);

  // worked two-level example, recomputed: kB sum w_nr (p_r - p_n) ln p_r
  Eigen::MatrixXd w3(2, 2);
  w3 << 0.0, 1.0, 1.0, 0.0;
  const PauliEntropyRate ex = pauli_entropy_rate(vec({0.6, 0.4}), TransitionMatrix(w3));
  CHECK_FALSE(ex.divergent);
  CHECK_NEAR(ex.value, 0.08109302162163283, 1e-14);

  // cross-check against the direct derivative of -kB sum p ln p
  const Eigen::VectorXd dp = pauli_rhs(vec({0.6, 0.4}), TransitionMatrix(w3));
  const double direct = -(dp[0] * std::log(0.6) + dp[1] * std::log(0.4));
  CHECK_NEAR(ex.value, direct, 1e-14);
}

TEST_CASE("pauli dynamics relaxes to the stationary distribution") {
  Eigen::MatrixXd wm(3, 3);
  wm << 0.0, 0.4, 1.1, 0.7, 0.0, 0.2, 0.3, 0.9, 0.0;  // irreducible, no detailed balance
  const TransitionMatrix w(wm);

  Eigen::VectorXd p = vec({0.9, 0.05, 0.05});
  const double dt = 1e-3;
  for (int i = 0; i < 40000; ++i) {
    const Eigen::VectorXd k1 = pauli_rhs(p, w);
    const Eigen::VectorXd k2 = pauli_rhs((p + 0.5 * dt * k1).cwiseMax(0.0), w);
    const Eigen::VectorXd k3 = pauli_rhs((p + 0.5 * dt * k2).cwiseMax(0.0), w);
    const Eigen::VectorXd k4 = pauli_rhs((p + dt * k3).cwiseMax(0.0), w);
    p = (p + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)).cwiseMax(0.0);
    p /= p.sum();
  }
  const Eigen::VectorXd stat = oracle::pauli_stationary(wm);
  CHECK((p - stat).cwiseAbs().maxCoeff() < 1e-6);

  // entropy-rate formula matches finite differences when all p > 0
  Eigen::VectorXd q = vec({0.5, 0.3, 0.2});
  const double h = 1e-6;
  const Eigen::VectorXd dq = pauli_rhs(q, w);
  auto ent = [](const Eigen::VectorXd& v) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v[i] > 0) s -= v[i] * std::log(v[i]);
    }
    return s;
  };
  const double fd = (ent(q + h * dq) - ent(q - h * dq)) / (2.0 * h);
  const PauliEntropyRate an = pauli_entropy_rate(q, w);
  CHECK_FALSE(an.divergent);
  CHECK_NEAR(an.value, fd, 1e-6);
}

TEST_CASE("contrast run: Pauli repopulates, SEA preserves cardinality") {
  const ContrastConfig cc = default_contrast();
  const SeaModel model(HermitianOperator::diagonal(cc.levels), {}, {},
                       TauPolicy::constant(cc.tau));
  const ContrastRecord rec =
      contrast_run(cc.p0, TransitionMatrix(cc.w), model, cc.horizon, cc.dt, cc.sample_every);

  CHECK(rec.applicable);
  CHECK(rec.zero_level == 2);
  CHECK(std::isfinite(rec.pauli_repopulation_time));
  CHECK(rec.pauli_repopulation_time > 0.0);
  CHECK(rec.sea_level_max == 0.0);  // exactly zero the whole horizon
  CHECK(rec.initial_rate_divergent);

  // Pauli p3(t) > 0 for any t > 0: first recorded sample already positive
  CHECK(rec.pauli_trajectory.probabilities[1][2] > 0.0);

  // strictly positive p0: contrast not applicable, both dynamics stay positive
  Eigen::VectorXd pos = vec({0.6, 0.3, 0.1});
  const ContrastRecord rec2 =
      contrast_run(pos, TransitionMatrix(cc.w), model, 2.0, cc.dt, cc.sample_every);
  CHECK_FALSE(rec2.applicable);
  for (const auto& p : rec2.pauli_trajectory.probabilities) CHECK(p.minCoeff() > 0.0);
  for (const auto& p : rec2.sea_trajectory.probabilities) CHECK(p.minCoeff() > 0.0);

  // w = 0: both static
  const ContrastRecord rec3 = contrast_run(
      cc.p0, TransitionMatrix(Eigen::MatrixXd::Zero(3, 3)), model, 2.0, cc.dt, cc.sample_every);
  CHECK_FALSE(rec3.applicable);
  CHECK((rec3.pauli_trajectory.probabilities.back() - cc.p0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("four-level dynamic contrast: SEA relaxes on its support only") {
  // Support {1,2,3} relaxes internally while level 4 stays exactly zero.
  Eigen::VectorXd levels = vec({0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0});
  Eigen::VectorXd p0 = vec({0.6, 0.3, 0.1, 0.0});
  Eigen::MatrixXd wm = Eigen::MatrixXd::Ones(4, 4);
  wm.diagonal().setZero();
  const SeaModel model(HermitianOperator::diagonal(levels));
  const ContrastRecord rec = contrast_run(p0, TransitionMatrix(wm), model, 10.0, 1e-3, 20);

  CHECK(rec.applicable);
  CHECK(rec.zero_level == 3);
  CHECK(rec.sea_level_max == 0.0);
  CHECK(std::isfinite(rec.pauli_repopulation_time));
  // the SEA support actually moved
  CHECK((rec.sea_trajectory.probabilities.back().head(3) - p0.head(3)).cwiseAbs().maxCoeff() >
        1e-3);
}
