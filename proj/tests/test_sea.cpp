#include <doctest.h>

#include <cmath>

#include "seaqt/equilibrium.hpp"
#include "seaqt/scenarios.hpp"
#include "seaqt/sea.hpp"
#include "oracles.hpp"

using namespace seaqt;

namespace {

RealVector vec(std::initializer_list<double> v) {
  RealVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

SeaModel three_level_model(TauPolicy tau = TauPolicy::constant(1.0)) {
  return SeaModel(HermitianOperator::diagonal(vec({0.0, 0.5, 1.0})), {}, {}, tau);
}

}  // namespace

TEST_CASE("model construction rejects non-commuting generators") {
  Matrix sx(2, 2);
  sx << 0, 1, 1, 0;
  CHECK_THROWS_AS(SeaModel(HermitianOperator::diagonal(vec({0.0, 1.0})), {HermitianOperator(sx)}),
                  ArgumentError);
  SeaModel ok(HermitianOperator::diagonal(vec({0.0, 0.5, 1.0})),
              {HermitianOperator::diagonal(vec({1.0, 2.0, 0.5}))});
  CHECK(ok.generators().size() == 1);
}

TEST_CASE("massieu coefficients at the worked three-level state") {
  const auto stats = oracle::diagonal_stats({0.5, 0.2, 0.3}, {0.0, 0.5, 1.0});
  // frozen oracle values (recomputed from first principles)
  CHECK_NEAR(stats.mean_e, 0.4, 1e-14);
  CHECK_NEAR(stats.cov_hh, 0.19, 1e-13);
  CHECK_NEAR(stats.cov_hs, 0.11027442691536138, 1e-13);
  CHECK_NEAR(stats.cov_ss, 0.1329644104498242, 1e-13);
  CHECK_NEAR(stats.theta, 1.7229742680579072, 1e-12);
  CHECK_NEAR(stats.cov_mm, 0.06896204607344852, 1e-13);

  const SeaModel model = three_level_model();
  const DensityOperator rho = DensityOperator::diagonal(vec({0.5, 0.2, 0.3}));
  const MassieuCoefficients mc = massieu_coefficients(rho, model);

  CHECK_NEAR(mc.theta, stats.theta, 1e-11);
  CHECK_NEAR(mc.cov_mm, stats.cov_mm, 1e-11);
  CHECK_NEAR(mc.cov_hh, 0.19, 1e-12);
  CHECK(mc.nu.empty());

  // invariant identities
  CHECK_NEAR(mean_value(rho, mc.delta_m), 0.0, 1e-10);
  CHECK_NEAR(covariance(rho, model.hamiltonian(), mc.delta_m), 0.0, 1e-9);
  const HermitianOperator s = entropy_operator(rho);
  CHECK_NEAR(covariance(rho, s, mc.delta_m), mc.cov_mm, 1e-9);
}

TEST_CASE("gibbs state gives dM = 0 and theta = T") {
  SpectrumSpec spec;
  spec.levels = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  const CanonicalSolution sol = solve_canonical(spec, 0.4);
  Eigen::VectorXd p(4), e(4);
  for (int i = 0; i < 4; ++i) {
    p[i] = sol.probabilities[i];
    e[i] = spec.levels[i];
  }
  const SeaModel model(HermitianOperator::diagonal(e));
  const MassieuCoefficients mc = massieu_coefficients(DensityOperator::diagonal(p), model);
  CHECK(mc.cov_mm < 1e-20);
  CHECK_NEAR(mc.theta, sol.temperature, 1e-9);
  CHECK(std::abs(mc.theta - 1.366) < 1e-3);
}

TEST_CASE("two-level state is canonical on its support") {
  const SeaModel model(HermitianOperator::diagonal(vec({0.0, 1.0})));
  const DensityOperator rho = DensityOperator::diagonal(vec({0.6, 0.4}));
  const MassieuCoefficients mc = massieu_coefficients(rho, model);
  CHECK_NEAR(mc.theta, 1.0 / std::log(1.5), 1e-12);
  CHECK(mc.cov_mm < 1e-20);
  CHECK(mc.delta_m.frobenius_norm() < 1e-7);
}

TEST_CASE("dissipation time policies") {
  const SeaModel constant = three_level_model(TauPolicy::constant(1.0));
  const DensityOperator rho = DensityOperator::diagonal(vec({0.5, 0.2, 0.3}));
  const MassieuCoefficients mc = massieu_coefficients(rho, constant);
  CHECK(dissipation_time(rho, constant, mc) == 1.0);

  const SeaModel adaptive = three_level_model(TauPolicy::adaptive_equality());
  const MassieuCoefficients mca = massieu_coefficients(rho, adaptive);
  CHECK_NEAR(dissipation_time(rho, adaptive, mca), 0.3012300355329281, 1e-12);

  // nondissipative state: tau = 0 and the dissipator is exactly zero
  const SeaModel adaptive2(HermitianOperator::diagonal(vec({0.0, 1.0})), {}, {},
                           TauPolicy::adaptive_equality());
  const DensityOperator nd = DensityOperator::diagonal(vec({0.6, 0.4}));
  const MassieuCoefficients mc2 = massieu_coefficients(nd, adaptive2);
  CHECK(dissipation_time(nd, adaptive2, mc2) == 0.0);
  CHECK(sea_dissipator(nd, adaptive2, mc2).norm() == 0.0);
}

TEST_CASE("dissipator structure at the worked state") {
  const SeaModel model = three_level_model();
  const DensityOperator rho = DensityOperator::diagonal(vec({0.5, 0.2, 0.3}));
  const Matrix d = sea_dissipator(rho, model);

  CHECK_NEAR(d.trace().real(), 0.0, 1e-10);
  CHECK_NEAR((d * model.hamiltonian().matrix()).trace().real(), 0.0, 1e-9);
  const HermitianOperator s = entropy_operator(rho);
  CHECK((d * s.matrix()).trace().real() >= -1e-12);

  // dp1/dt = -0.05217 for this state (bracket oracle, tau = 1)
  const auto rates = oracle::diagonal_rates({0.5, 0.2, 0.3}, {0.0, 0.5, 1.0});
  CHECK_NEAR(rates[0], -0.05217457263088113, 1e-12);
  CHECK_NEAR(d(0, 0).real(), rates[0], 1e-10);

  // Gibbs and pure states give the zero dissipator
  SpectrumSpec spec;
  spec.levels = {0.0, 0.5, 1.0};
  const CanonicalSolution sol = solve_canonical(spec, 0.4);
  const DensityOperator gibbs = DensityOperator::diagonal(
      vec({sol.probabilities[0], sol.probabilities[1], sol.probabilities[2]}));
  CHECK(sea_dissipator(gibbs, model).norm() == 0.0);

  Eigen::VectorXcd psi(3);
  psi << 1, Complex(0.5, 0.5), Complex(0, -1);
  CHECK(sea_dissipator(DensityOperator::pure(psi), model).norm() == 0.0);
}

TEST_CASE("orthogonality and entropy production over random states") {
  for (int dim = 2; dim <= 6; ++dim) {
    Eigen::VectorXd e(dim);
    for (int i = 0; i < dim; ++i) e[i] = double(i) / (dim - 1);
    const SeaModel model(HermitianOperator::diagonal(e));
    const HermitianOperator& h = model.hamiltonian();

    for (const auto kind : {CorpusKind::Diagonal, CorpusKind::Full}) {
      const auto corpus =
          random_state_corpus(dim, 100, 31 + dim * (kind == CorpusKind::Full ? 7 : 3), kind);
      for (const auto& rho : corpus) {
        const MassieuCoefficients mc = massieu_coefficients(rho, model);
        const double dm = std::sqrt(std::max(mc.cov_mm, 0.0));
        const double dh = std::sqrt(std::max(mc.cov_hh, 0.0));
        const double ds = std::sqrt(std::max(mc.cov_ss, 0.0));
        // spec tolerance plus an absolute floor for nondissipative states,
        // where dm ~ 0 and the relative bound collapses below roundoff
        CHECK(std::abs(covariance(rho, h, mc.delta_m)) <=
              1e-9 * dh * dm + 1e-13 * dh * std::max(ds, 1.0));

        const Matrix d = sea_dissipator(rho, model, mc);
        CHECK(std::abs((d * h.matrix()).trace().real()) <=
              1e-9 * std::max(1e-14, d.norm() * h.frobenius_norm()));
        const HermitianOperator s = entropy_operator(rho);
        CHECK((d * s.matrix()).trace().real() >= -1e-12);

        // Cov(S,M) = Cov(M,M) = Cov(S,S) - Cov(H',H')/theta^2
        const double scale = std::max(1.0, mc.cov_ss);
        CHECK(std::abs(covariance(rho, s, mc.delta_m) - mc.cov_mm) <= 1e-9 * scale);
        CHECK(std::abs(mc.cov_mm - (mc.cov_ss - mc.cov_pp)) <= 1e-9 * scale);

        // c_MH = 0 for the SEA form
        if (dm > 1e-12 && dh > 1e-12) {
          const double cmh = comm_correlation(rho, mc.delta_m, h) / (dm * dh);
          CHECK(std::abs(cmh) <= 1e-9);
        }

        // theta bounds
        if (ds > 1e-12) {
          CHECK(std::sqrt(std::max(mc.cov_pp, 0.0)) <= ds * (1.0 + 1e-9));
          CHECK(2.0 * dm * std::sqrt(std::max(mc.cov_pp, 0.0)) <=
                mc.cov_ss * (1.0 + 1e-9) + 1e-15);
        }
      }
    }
  }
}

TEST_CASE("generators enter the constraint solve") {
  // H and one commuting generator N; dM must be orthogonal to both.
  Eigen::VectorXd e(4), n(4);
  e << 0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0;
  n << 1.0, 0.0, 2.0, 0.5;
  const SeaModel model(HermitianOperator::diagonal(e), {HermitianOperator::diagonal(n)});

  const auto corpus = random_state_corpus(4, 50, 999, CorpusKind::Full);
  for (const auto& rho : corpus) {
    const MassieuCoefficients mc = massieu_coefficients(rho, model);
    CHECK(mc.nu.size() == 1);
    const double dm = std::sqrt(std::max(mc.cov_mm, 0.0));
    CHECK(std::abs(covariance(rho, model.hamiltonian(), mc.delta_m)) <=
          1e-9 * std::max(1e-9, dm));
    CHECK(std::abs(covariance(rho, model.generators()[0], mc.delta_m)) <=
          1e-9 * std::max(1e-9, dm));
    // theta, nu reproduce dM through dS - (dH - nu dN)/theta
    if (std::isfinite(mc.theta)) {
      const HermitianOperator s = entropy_operator(rho);
      const HermitianOperator hprime = model.hamiltonian() - model.generators()[0] * mc.nu[0];
      const Matrix reconstructed =
          center(s, rho).matrix() - center(hprime, rho).matrix() / mc.theta;
      CHECK((reconstructed - mc.delta_m.matrix()).norm() < 1e-9);
    }
  }
}

TEST_CASE("degenerate generator combinations are rejected") {
  // N = H makes the Gram matrix exactly singular.
  const HermitianOperator h = HermitianOperator::diagonal(vec({0.0, 0.5, 1.0}));
  const SeaModel model(h, {h});
  const DensityOperator rho = DensityOperator::diagonal(vec({0.5, 0.2, 0.3}));
  CHECK_THROWS_AS(massieu_coefficients(rho, model), DegenerateGeneratorsError);

  // mixed state concentrated on one degenerate energy shell: Delta_H = 0
  const SeaModel flat(HermitianOperator::diagonal(vec({1.0, 1.0, 2.0})));
  const DensityOperator shell = DensityOperator::diagonal(vec({0.6, 0.4, 0.0}));
  CHECK_THROWS_AS(massieu_coefficients(shell, flat), DegenerateGeneratorsError);
}

TEST_CASE("pure eigenstates of H short-circuit to zero dissipative content") {
  const SeaModel model = three_level_model();
  const DensityOperator eigenstate = DensityOperator::diagonal(vec({0.0, 1.0, 0.0}));
  const MassieuCoefficients mc = massieu_coefficients(eigenstate, model);
  CHECK(mc.cov_mm == 0.0);
  CHECK(sea_dissipator(eigenstate, model, mc).norm() == 0.0);
}
