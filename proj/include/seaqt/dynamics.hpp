#pragma once

#include <functional>
#include <limits>
#include <variant>
#include <vector>

#include "seaqt/diagonal.hpp"
#include "seaqt/sea.hpp"

namespace seaqt {

struct FixedRk4 {
  double dt = 1e-3;
};

struct AdaptiveRk45 {
  double rtol = 1e-8;
  double atol = 1e-12;
  double dt_min = 1e-10;
  double dt_max = 5e-2;
};

using Stepper = std::variant<FixedRk4, AdaptiveRk45>;

enum class EvolutionMode { Full, DiagonalFastPath };

/// One integration leg. t_end may be smaller than t_start (backward time);
/// the flow is mathematically reversible so the same steppers apply with a
/// negative step.
struct EvolutionSpec {
  DensityOperator initial;
  SeaModel model;
  double t_start = 0.0;
  double t_end = 1.0;
  Stepper stepper = FixedRk4{};
  int sample_every = 1;          ///< store every k-th accepted step
  EvolutionMode mode = EvolutionMode::Full;
  bool stop_when_relaxed = false;
  double relaxed_cov_mm = 1e-12;  ///< in kB^2; Cov(M,M) below this counts as relaxed
  int relaxed_samples = 10;       ///< consecutive samples required
};

struct TrajectoryDiagnostics {
  long steps = 0;
  double max_trace_drift = 0.0;     ///< worst |trace - 1| before per-step renormalization
  double max_energy_drift = 0.0;    ///< worst |<H>(t) - <H>(0)|
  double worst_entropy_step = 0.0;  ///< most negative entropy increment per step, forward sense
  bool zeros_preserved = true;      ///< diagonal mode: exact zero levels stayed exactly zero
  double min_dt = std::numeric_limits<double>::infinity();
  double max_dt = 0.0;
  bool relaxed_stop = false;
};

struct Trajectory {
  EvolutionMode mode = EvolutionMode::Full;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> probabilities;  ///< diagonal mode samples
  std::vector<DensityOperator> states;         ///< full mode samples
  TrajectoryDiagnostics diagnostics;

  std::size_t size() const { return times.size(); }
  /// State at sample i regardless of mode (diagonal samples are lifted).
  DensityOperator state_at(std::size_t i) const;
  /// Occupation p_n at sample i for diagonal trajectories.
  const Eigen::VectorXd& probabilities_at(std::size_t i) const;
};

/// Per-sample streaming hook: (time, state, running diagnostics), invoked in
/// time order along the leg. Exactly one of probabilities/state is set.
struct TrajectorySample {
  double t = 0.0;
  const Eigen::VectorXd* probabilities = nullptr;
  const DensityOperator* state = nullptr;
  const TrajectoryDiagnostics* diagnostics = nullptr;
};
using SampleSink = std::function<void(const TrajectorySample&)>;

/// Full master equation right-hand side:
///   drho/dt = -(i/hbar)[H, rho] + {dM(rho), rho}/(2 kB tau).
/// Traceless and Hermitian; Tr(rhs*H) = 0 (energy conserving); the pure
/// commutator remains when dM = 0.
Matrix rhs_full(const DensityOperator& rho, const SeaModel& model);

/// Diagonal (commuting) fast path:
///   dp_n/dt = -(1/tau)[p_n ln p_n + p_n <S>/kB + p_n (e_n - <H>)/(kB theta)].
/// Probability- and energy-conserving; rates vanish exactly on zero levels.
Eigen::VectorXd rhs_diagonal(const Eigen::VectorXd& p, const Eigen::VectorXd& e, double tau,
                             const UnitSystem& units = {});

/// Integrate one leg with invariant-preserving step hygiene: after every
/// accepted step the state is symmetrized, eigenvalues in [-1e-10, 0) are
/// clipped, the trace renormalized; worse positivity loss raises
/// IntegrationError carrying the last good time.
Trajectory integrate(const EvolutionSpec& spec, const SampleSink& sink = {});

}  // namespace seaqt
