#include <doctest.h>

#include <cmath>

#include "seaqt/dynamics.hpp"
#include "seaqt/equilibrium.hpp"
#include "oracles.hpp"

using namespace seaqt;

namespace {
const std::vector<double> kFourLevels{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
}

TEST_CASE("four-level Gibbs solution reproduces the published distribution") {
  SpectrumSpec spec;
  spec.levels = kFourLevels;
  const CanonicalSolution sol = solve_canonical(spec, 0.4);

  const std::vector<double> published{0.3474, 0.2722, 0.2133, 0.1671};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(sol.probabilities[i] - published[i]) < 5e-4);
  }
  CHECK(std::abs(sol.temperature - 1.366) < 1e-3);

  // frozen full-precision values from the bracketing+Newton solve
  CHECK(sol.probabilities[0] == doctest::Approx(0.34743961087720165).epsilon(1e-10));
  CHECK(sol.temperature == doctest::Approx(1.365976575367666).epsilon(1e-10));

  double mean = 0.0;
  for (int i = 0; i < 4; ++i) mean += sol.probabilities[i] * spec.levels[i];
  CHECK(mean == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("partial (false target) solution on support {1,2,4}") {
  SpectrumSpec spec;
  spec.levels = kFourLevels;
  spec.support = std::vector<int>{0, 1, 3};
  const CanonicalSolution sol = solve_canonical(spec, 0.4);

  CHECK(std::abs(sol.probabilities[0] - 0.3725) < 5e-4);
  CHECK(std::abs(sol.probabilities[1] - 0.3412) < 5e-4);
  CHECK(sol.probabilities[2] == 0.0);  // exactly zero off support
  CHECK(std::abs(sol.probabilities[3] - 0.2863) < 5e-4);
  CHECK(std::abs(sol.temperature - 3.796) < 1e-3);
}

TEST_CASE("two-level primordial solution") {
  SpectrumSpec spec;
  spec.levels = {0.0, 1.0};
  const CanonicalSolution sol = solve_canonical(spec, 0.4);
  CHECK(sol.probabilities[0] == doctest::Approx(0.6).epsilon(1e-11));
  CHECK(sol.probabilities[1] == doctest::Approx(0.4).epsilon(1e-11));
  CHECK(std::abs(sol.temperature - 2.466) < 1e-3);
  CHECK(sol.temperature == doctest::Approx(1.0 / std::log(1.5)).epsilon(1e-10));
}

TEST_CASE("ratio check against the quoted distributions") {
  // p2/p1 = exp(-(e2-e1)/kB T) must reproduce the published numbers to 5e-4.
  SpectrumSpec spec;
  spec.levels = kFourLevels;
  const CanonicalSolution sol = solve_canonical(spec, 0.4);
  for (int i = 1; i < 4; ++i) {
    const double ratio = sol.probabilities[i] / sol.probabilities[i - 1];
    const double expected = std::exp(-(spec.levels[i] - spec.levels[i - 1]) / sol.temperature);
    CHECK(std::abs(ratio - expected) < 5e-4);
  }
}

TEST_CASE("solver determinism and error taxonomy") {
  SpectrumSpec spec;
  spec.levels = kFourLevels;
  const CanonicalSolution a = solve_canonical(spec, 0.4);
  const CanonicalSolution b = solve_canonical(spec, 0.4);
  for (int i = 0; i < 4; ++i) CHECK(a.probabilities[i] == b.probabilities[i]);  // bitwise
  CHECK(a.beta == b.beta);

  CHECK_THROWS_AS(solve_canonical(spec, 0.0), NoSolutionError);   // at the boundary
  CHECK_THROWS_AS(solve_canonical(spec, 1.5), NoSolutionError);   // outside
  CHECK_THROWS_AS(solve_canonical(spec, std::nan("")), ArgumentError);

  SpectrumSpec one;
  one.levels = {1.0};
  CHECK_THROWS_AS(solve_canonical(one, 1.0), ArgumentError);  // fewer than 2 support levels
}

TEST_CASE("negative temperature above the spectral mean") {
  SpectrumSpec spec;
  spec.levels = {0.0, 1.0};
  const CanonicalSolution sol = solve_canonical(spec, 0.7);
  CHECK(sol.temperature < 0.0);
  CHECK(sol.probabilities[1] > sol.probabilities[0]);
}

TEST_CASE("canonical states are stationary under the dynamics") {
  SpectrumSpec spec;
  spec.levels = kFourLevels;
  const CanonicalSolution sol = solve_canonical(spec, 0.4);
  Eigen::VectorXd p(4), e(4);
  for (int i = 0; i < 4; ++i) {
    p[i] = sol.probabilities[i];
    e[i] = spec.levels[i];
  }
  const Eigen::VectorXd rate = rhs_diagonal(p, e, 1.0);
  CHECK(rate.norm() <= 1e-10);

  const SeaModel model(HermitianOperator::diagonal(e));
  const Matrix full_rate = rhs_full(DensityOperator::diagonal(p), model);
  CHECK(full_rate.norm() <= 1e-10);
}

TEST_CASE("nondissipative detection") {
  Eigen::VectorXd e(4);
  for (int i = 0; i < 4; ++i) e[i] = kFourLevels[i];
  const SeaModel model(HermitianOperator::diagonal(e));

  SpectrumSpec spec;
  spec.levels = kFourLevels;
  const CanonicalSolution gibbs = solve_canonical(spec, 0.4);
  Eigen::VectorXd pg(4);
  for (int i = 0; i < 4; ++i) pg[i] = gibbs.probabilities[i];
  CHECK(is_nondissipative(DensityOperator::diagonal(pg), model));

  // false-target state embedded in dim 4 is nondissipative
  spec.support = std::vector<int>{0, 1, 3};
  const CanonicalSolution ft = solve_canonical(spec, 0.4);
  Eigen::VectorXd pf(4);
  for (int i = 0; i < 4; ++i) pf[i] = ft.probabilities[i];
  CHECK(is_nondissipative(DensityOperator::diagonal(pf), model));

  // a generic three-level state is not: Cov(M,M) ~ 0.0690 from the oracle
  const auto stats = oracle::diagonal_stats({0.5, 0.2, 0.3}, {0.0, 0.5, 1.0});
  CHECK(stats.cov_mm == doctest::Approx(0.06896204607344852).epsilon(1e-12));
  Eigen::VectorXd e3(3), p3(3);
  e3 << 0.0, 0.5, 1.0;
  p3 << 0.5, 0.2, 0.3;
  const SeaModel model3(HermitianOperator::diagonal(e3));
  CHECK_FALSE(is_nondissipative(DensityOperator::diagonal(p3), model3, 1e-6));

  // any two-level full-support diagonal state is nondissipative
  Eigen::VectorXd e2(2), p2(2);
  e2 << 0.0, 1.0;
  p2 << 0.35, 0.65;
  const SeaModel model2(HermitianOperator::diagonal(e2));
  CHECK(is_nondissipative(DensityOperator::diagonal(p2), model2));
}
