#include "seaqt/scenarios.hpp"

#include <cmath>
#include <random>

namespace seaqt {

SeaModel ScenarioConfig::make_model(const UnitSystem& units) const {
  return SeaModel(HermitianOperator::diagonal(levels), {}, units, tau);
}

ScenarioConfig four_level_scenario(const TauPolicy& tau, double delta) {
  if (!(delta >= 0.0) || delta > 1e-2) {
    throw ArgumentError("four_level_scenario: delta must lie in [0, 1e-2]");
  }

  ScenarioConfig cfg;
  cfg.levels = Eigen::Vector4d(0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0);
  cfg.mean_energy = 0.4;
  cfg.tau = tau;

  SpectrumSpec spec;
  spec.levels = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  spec.support = std::vector<int>{0, 1, 3};
  const CanonicalSolution ft = solve_canonical(spec, cfg.mean_energy);

  Eigen::VectorXd q(4);
  for (int i = 0; i < 4; ++i) q[i] = (1.0 - delta) * ft.probabilities[i];
  q[2] = delta;
  // Rebalance the energy excess delta*(e3 - <H>) between the outermost
  // occupied levels so the two constraints hold exactly.
  const double shift = delta * (cfg.levels[2] - cfg.mean_energy) / (cfg.levels[3] - cfg.levels[0]);
  q[0] += shift;
  q[3] -= shift;
  for (int i = 0; i < 4; ++i) {
    if (q[i] < 0.0) {
      throw ArgumentError("four_level_scenario: delta too large, correction went negative");
    }
  }

  cfg.initial = q;
  if (tau.kind == TauPolicy::Kind::Constant) {
    cfg.name = "four-level-const-tau";
    cfg.t_start = -15.0;
    cfg.t_end = 15.0;
    cfg.backward_horizon = 50.0;
    cfg.stepper = FixedRk4{1e-3};
    cfg.sample_every = 25;
    cfg.stop_when_relaxed = false;
  } else {
    cfg.name = "four-level-adaptive-tau";
    cfg.t_start = -5.0;
    cfg.t_end = 5.0;
    cfg.backward_horizon = 5.0;
    cfg.stepper = AdaptiveRk45{};
    cfg.sample_every = 1;
    cfg.stop_when_relaxed = true;
  }
  return cfg;
}

ContrastConfig default_contrast() {
  ContrastConfig cfg;
  cfg.levels = Eigen::Vector3d(0.0, 0.5, 1.0);
  cfg.p0 = Eigen::Vector3d(0.7, 0.3, 0.0);
  cfg.w = Eigen::MatrixXd::Ones(3, 3);
  cfg.w.diagonal().setZero();
  return cfg;
}

std::vector<std::string> scenario_names() {
  return {"four-level-const-tau", "four-level-adaptive-tau", "klgs-contrast"};
}

ScenarioConfig named_scenario(const std::string& name) {
  if (name == "four-level-const-tau") return four_level_scenario(TauPolicy::constant(1.0));
  if (name == "four-level-adaptive-tau") return four_level_scenario(TauPolicy::adaptive_equality());
  if (name == "klgs-contrast") {
    throw ConfigError("scenario 'klgs-contrast' runs under the contrast subcommand");
  }
  throw ConfigError("unknown scenario '" + name + "' (see scenario-list)");
}

namespace {

Eigen::VectorXd dirichlet(int dim, std::mt19937_64& rng) {
  // Symmetric Dirichlet via normalized unit-rate exponentials.
  std::exponential_distribution<double> expo(1.0);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = expo(rng);
  return v / v.sum();
}

Matrix haar_like_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) g(r, c) = Complex(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ();
}

}  // namespace

std::vector<DensityOperator> random_state_corpus(int dim, int count, std::uint64_t seed,
                                                 CorpusKind kind) {
  if (dim < 2 || dim > 8) throw ArgumentError("random_state_corpus: dim must lie in [2, 8]");
  if (count < 1) throw ArgumentError("random_state_corpus: count >= 1");

  std::mt19937_64 rng(seed);
  std::vector<DensityOperator> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd evals = dirichlet(dim, rng);
    if (kind == CorpusKind::RankDeficient) {
      std::uniform_int_distribution<int> nzero(1, dim - 2 >= 1 ? dim - 2 : 1);
      const int zeros = nzero(rng);
      for (int z = 0; z < zeros; ++z) evals[dim - 1 - z] = 0.0;
      evals /= evals.sum();
    }
    if (kind == CorpusKind::Diagonal) {
      out.push_back(DensityOperator::diagonal(evals));
    } else {
      const Matrix u = haar_like_unitary(dim, rng);
      Matrix m = u * evals.asDiagonal() * u.adjoint();
      out.push_back(DensityOperator(m));
    }
  }
  return out;
}

HermitianOperator random_observable(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) g(r, c) = Complex(gauss(rng), gauss(rng));
  }
  return HermitianOperator(0.5 * (g + g.adjoint().eval()));
}

}  // namespace seaqt
