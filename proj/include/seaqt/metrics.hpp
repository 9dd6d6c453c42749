#pragma once

#include <string>
#include <vector>

#include "seaqt/dynamics.hpp"
#include "seaqt/sea.hpp"

namespace seaqt {

/// Characteristic times of the combined unitary+dissipative dynamics.
/// Degenerate entries are +inf sentinels, never silent zeros:
///  - tau_u  = hbar/(2 Delta_H), shortest unitary time;
///  - tau_d  = kB tau/Delta_M, shortest dissipative time (+inf when the
///    dissipator is off, i.e. Delta_M below the nondissipative cutoff);
///  - tau_k  = kB tau/Delta_S, entropy-spread time (cannot be attained;
///    always <= tau_d);
///  - tau_s  = Delta_S/|d<S>/dt|, entropy characteristic time
///    (tau_s tau_k = tau_d^2 on SEA trajectories);
///  - tau_ud = combined lower bound, 1/tau_ud^2 = 1/tau_u^2 + 1/tau_d^2
///    + 2 c_MH/(tau_u tau_d);
///  - a_tau  = tau_u/tau_d.
struct TimeScales {
  double tau_u = 0.0;
  double tau_d = 0.0;
  double tau_k = 0.0;
  double tau_s = 0.0;
  double tau_ud = 0.0;
  double a_tau = 0.0;
};

/// A named observable for report rows.
struct NamedObservable {
  std::string name;
  HermitianOperator op;
  bool is_projector = false;
};

/// Projectors onto the eigenspaces of H (eigenvalues grouped within 1e-10
/// relative), named P1..Pk in descending-energy-free index order of first
/// appearance in the spectrum.
std::vector<NamedObservable> energy_projectors(const HermitianOperator& hamiltonian);

/// Default report observables: H plus every energy projector. The entropy
/// snapshot row is always added internally.
std::vector<NamedObservable> default_observables(const SeaModel& model);

struct ObservableRow {
  std::string name;
  double spread = 0.0;   ///< Delta_F
  double rate = 0.0;     ///< d<F>/dt from the commutator/covariance form
  double tau_f = 0.0;    ///< Delta_F/|rate|, +inf sentinel when conserved
  double r_fm = 0.0;     ///< correlation with the Massieu direction (0 when inactive)
  double c_fh = 0.0;     ///< commutator correlation with H (0 when Delta_H = 0)
  bool conserved = false;
  bool degenerate = false;  ///< zero spread; no residuals emitted
};

enum class CheckKind { LowerBound, UpperBound, Equality };

/// One verified relation. For bounds the residual is the signed slack
/// (>= 0 means satisfied); for equalities it is the signed defect (expected
/// zero). All residuals are normalized to be dimensionless.
struct ResidualEntry {
  std::string family;   ///< relation name, e.g. "exact_time_energy"
  std::string subject;  ///< observable name or "state"
  CheckKind kind = CheckKind::LowerBound;
  double residual = 0.0;
  bool degenerate = false;  ///< prerequisites absent; residual not meaningful
};

/// Pass criterion used across the suite: bounds >= -1e-8, equalities within
/// 1e-8 in magnitude. Degenerate entries always pass.
bool residual_ok(const ResidualEntry& e, double tol = 1e-8);

struct StateSummary {
  double mean_h = 0.0;
  double entropy = 0.0;
  double entropy_rate = 0.0;  ///< Cov(S,M)/(kB tau), analytic
  double theta = 0.0;
  double delta_h = 0.0;
  double delta_s = 0.0;
  double delta_m = 0.0;
  double cov_mm = 0.0;
  double tau = 0.0;  ///< dissipation time under the model policy
  TimeScales times;
};

struct UncertaintyReport {
  StateSummary state;
  std::vector<ObservableRow> rows;
  std::vector<ResidualEntry> residuals;

  double worst_bound_residual() const;
  double worst_equality_defect() const;
};

/// tau_F = Delta_F/|d<F>/dt| with the analytic rate. Conserved observables
/// (|rate| <= 1e-14 Delta_F (1/tau_u + 1/tau_d)) return +inf. Zero spread
/// raises DegenerateSpreadError.
double characteristic_time(const DensityOperator& rho, const HermitianOperator& f,
                           const SeaModel& model);

TimeScales time_scales(const DensityOperator& rho, const SeaModel& model);

/// Evolution direction C and its squared norm (C|C). C collects the
/// rate-generating parts of the dynamics: the weighted unitary direction
/// when [H, rho] != 0 plus the weighted Massieu direction when dissipation is
/// active; d<F>/dt = Delta_F (F~|C) for every observable F. At states where
/// a mechanism is inert (commuting rho, or Delta_M below cutoff) that
/// component is absent, so C = 0 at equilibrium.
struct EvolutionDirection {
  Matrix c;
  double norm_squared = 0.0;
};
EvolutionDirection evolution_direction(const DensityOperator& rho, const SeaModel& model);

/// Evaluate every uncertainty relation at one state. Degenerate rows are
/// flagged, not failed.
UncertaintyReport inequality_suite(const DensityOperator& rho, const SeaModel& model,
                                   const std::vector<NamedObservable>& observables);

struct TrajectoryReport {
  std::vector<double> times;
  std::vector<UncertaintyReport> samples;
  /// Finite-interval occupation checks: for every energy level and every
  /// sampled interval, |arccos sqrt(p(t2)) - arccos sqrt(p(t1))| must not
  /// exceed the trapezoidal integral of 1/(2 tau_UD). One worst-pair entry
  /// per level.
  std::vector<ResidualEntry> interval_checks;

  double worst_bound_residual() const;
  double worst_equality_defect() const;
};

TrajectoryReport trajectory_report(const Trajectory& traj, const SeaModel& model,
                                   const std::vector<NamedObservable>& observables);

}  // namespace seaqt
