#pragma once

#include <vector>

#include "seaqt/density.hpp"
#include "seaqt/units.hpp"

namespace seaqt {

/// Dissipation-time policy for the steepest-entropy-ascent generator.
///
/// Constant: tau is a fixed positive number.
/// AdaptiveEquality: tau = (hbar/2kB) * Delta_M / Delta_H at every state, the
/// smallest tau for which observables commuting with H never beat the usual
/// time-energy bound (a_tau = 1, tau_D = tau_U). tau vanishes at
/// nondissipative states; the dissipator is defined by its normalized limit
/// there and evaluates to zero below the Delta_M cutoff.
struct TauPolicy {
  enum class Kind { Constant, AdaptiveEquality };

  Kind kind = Kind::Constant;
  double tau0 = 1.0;

  static TauPolicy constant(double tau) {
    if (!(tau > 0.0)) throw ArgumentError("TauPolicy::constant: tau must be positive");
    return TauPolicy{Kind::Constant, tau};
  }
  static TauPolicy adaptive_equality() { return TauPolicy{Kind::AdaptiveEquality, 0.0}; }
};

/// Relative cutoff below which Delta_M counts as zero (nondissipative state):
/// Delta_M < kNondissipativeCutoff * Delta_S.
inline constexpr double kNondissipativeCutoff = 1e-13;

/// Relative threshold under which adaptive steppers must shrink steps: the
/// SEA direction becomes nearly singular when Delta_M << Delta_S.
inline constexpr double kNearSingularCutoff = 1e-6;

/// Hamiltonian, optional commuting non-Hamiltonian generators, units and the
/// dissipation-time policy. Generators that fail to commute with H (operator
/// norm of the commutator above 1e-10 relative) are rejected at construction.
class SeaModel {
public:
  SeaModel(HermitianOperator hamiltonian, std::vector<HermitianOperator> generators = {},
           UnitSystem units = {}, TauPolicy tau = TauPolicy::constant(1.0));

  const HermitianOperator& hamiltonian() const { return h_; }
  const std::vector<HermitianOperator>& generators() const { return n_; }
  const UnitSystem& units() const { return units_; }
  const TauPolicy& tau_policy() const { return tau_; }
  Eigen::Index dim() const { return h_.dim(); }

  /// True when rho commutes with H within 1e-12 relative (purely dissipative
  /// trajectories stay in this class).
  bool commutes_with_hamiltonian(const DensityOperator& rho) const;

private:
  HermitianOperator h_;
  std::vector<HermitianOperator> n_;
  UnitSystem units_;
  TauPolicy tau_;
};

/// Solution of the conservation-constraint linear system.
///
/// The system (normal equations on the Gram matrix of sqrt(rho)dH,
/// sqrt(rho)dN_i) yields projection coefficients a such that
///   dM = dS - a_0 dH - sum_i a_i dN_i,
/// equivalently dM = dS - dH'/theta with theta = 1/a_0 and nu_i = -a_i theta.
/// This makes sqrt(rho)dM the component of sqrt(rho)dS orthogonal to every
/// conserved direction, which is what guarantees Cov(H,M) = Cov(N_j,M) = 0 and
/// Cov(S,M) = Cov(M,M) >= 0.
struct MassieuCoefficients {
  double theta = 0.0;              ///< nonequilibrium temperature, +/-inf at states with dS in the kernel
  std::vector<double> nu;          ///< generator multipliers (empty without generators)
  std::vector<double> projection;  ///< a-coefficients; a_0 = 1/theta
  HermitianOperator delta_m;       ///< centered Massieu operator dM(rho)
  double cov_mm = 0.0;             ///< Cov(M,M) = Cov(S,M), the entropy production scale
  double cov_hh = 0.0;             ///< Cov(H,H)
  double cov_ss = 0.0;             ///< Cov(S,S)
  double cov_sh = 0.0;             ///< Cov(S,H)
  double cov_pp = 0.0;             ///< Cov of the projected part, = Cov(H',H')/theta^2
  double mean_h = 0.0;
  double mean_s = 0.0;
};

/// Solve the constraint system for theta, nu and assemble dM(rho).
///
/// Throws DegenerateGeneratorsError when the Gram matrix of the constraint
/// directions is singular or has condition number above 1e12 (e.g. a pure
/// eigenstate of H with zero energy spread while dS != 0, or linearly
/// dependent generators). States with Cov(S,S) = 0 (pure, or uniform on their
/// support) short-circuit to dM with zero dissipative content.
MassieuCoefficients massieu_coefficients(const DensityOperator& rho, const SeaModel& model);

/// Dissipation time tau for the given state under the model's policy.
/// AdaptiveEquality returns 0 at nondissipative states (the dissipator is
/// zero there as well) and requires Delta_H > 0.
double dissipation_time(const DensityOperator& rho, const SeaModel& model,
                        const MassieuCoefficients& coeffs);

/// Dissipative part of the master equation, D = {dM(rho), rho} / (2 kB tau).
/// Traceless; orthogonal to H and every generator; Tr(D S) >= 0.
Matrix sea_dissipator(const DensityOperator& rho, const SeaModel& model);
Matrix sea_dissipator(const DensityOperator& rho, const SeaModel& model,
                      const MassieuCoefficients& coeffs);

}  // namespace seaqt
