#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seaqt/equilibrium.hpp"
#include "seaqt/metrics.hpp"
#include "seaqt/pauli.hpp"

namespace seaqt {

/// A named, fully specified simulation setup. The initial distribution is
/// anchored at t = 0; windows with t_start < 0 present the leading segment by
/// integrating the anchor backward (the flow is reversible), so the emitted
/// trajectory covers [t_start, t_end] in increasing time with the anchor in
/// the middle.
struct ScenarioConfig {
  std::string name;
  Eigen::VectorXd levels;
  double mean_energy = 0.0;
  Eigen::VectorXd initial;  ///< anchor distribution at t = 0
  TauPolicy tau = TauPolicy::constant(1.0);
  double t_start = 0.0;
  double t_end = 1.0;
  double backward_horizon = 50.0;  ///< used by backward runs
  Stepper stepper = FixedRk4{1e-3};
  int sample_every = 25;
  EvolutionMode mode = EvolutionMode::DiagonalFastPath;
  bool stop_when_relaxed = false;

  SeaModel make_model(const UnitSystem& units = {}) const;
};

/// The four-level relaxation study: levels (0, 1/3, 2/3, 1)*u at mean energy
/// 0.4u. The anchor is the partially canonical state on levels {1, 2, 4} with
/// occupation delta moved onto the excluded third level: every occupied level
/// is scaled by (1 - delta) and the resulting energy excess is rebalanced
/// between the lowest and highest occupied levels. Forward in time the
/// trajectory relaxes to the canonical distribution on all four levels;
/// backward it approaches the two-level lowest-entropy distribution
/// (0.6, 0, 0, 0.4).
///
/// delta in [0, 1e-2]; delta = 0 reproduces the exact three-level
/// sub-dynamics (the third level stays identically zero).
ScenarioConfig four_level_scenario(const TauPolicy& tau, double delta = 1e-4);

/// Default configuration of the Pauli-vs-SEA contrast: three levels
/// (0, 1/2, 1)*u, p0 = (0.7, 0.3, 0), unit all-to-all transition rates.
struct ContrastConfig {
  std::string name = "klgs-contrast";
  Eigen::VectorXd levels;
  Eigen::VectorXd p0;
  Eigen::MatrixXd w;
  double tau = 1.0;
  double horizon = 20.0;
  double dt = 1e-3;
  int sample_every = 10;
};
ContrastConfig default_contrast();

/// Names addressable from the CLI.
std::vector<std::string> scenario_names();

/// Build a named simulate-scenario ("four-level-const-tau",
/// "four-level-adaptive-tau"). Throws ConfigError for unknown names.
ScenarioConfig named_scenario(const std::string& name);

enum class CorpusKind { Diagonal, Full, RankDeficient };

/// Reproducible random density operators: eigenvalues from a symmetric
/// Dirichlet sample, eigenvectors from an orthonormalized complex Gaussian
/// draw (identity for the diagonal kind). The rank-deficient kind zeroes at
/// least one eigenvalue exactly.
std::vector<DensityOperator> random_state_corpus(int dim, int count, std::uint64_t seed,
                                                 CorpusKind kind);

/// Reproducible random Hermitian observable (Gaussian entries, symmetrized).
HermitianOperator random_observable(int dim, std::uint64_t seed);

}  // namespace seaqt
