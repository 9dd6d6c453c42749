#pragma once

#include <optional>
#include <vector>

#include "seaqt/sea.hpp"

namespace seaqt {

/// Energy levels (repeated per degeneracy) with an optional support mask
/// restricting which levels may carry occupation.
struct SpectrumSpec {
  std::vector<double> levels;
  std::optional<std::vector<int>> support;  ///< indices of occupied levels; all when absent

  std::vector<int> support_indices() const;
  void validate() const;
};

/// Canonical (or partially canonical) occupation set for a prescribed mean energy.
struct CanonicalSolution {
  std::vector<double> probabilities;  ///< per listed level, exact zeros off support
  double temperature = 0.0;           ///< units energy_unit/kB; negative above the spectral mean
  double beta = 0.0;                  ///< 1/(kB T)
};

/// Find p_n ~ exp(-beta e_n) on the support with sum(p e) = mean_energy.
///
/// The mean-energy-of-beta map is strictly monotone, so beta is bracketed by
/// doubling, bisected to 1e-6 and polished by Newton to 1e-12; repeated solves
/// are bitwise identical. The target must lie strictly between the smallest
/// and largest supported level.
CanonicalSolution solve_canonical(const SpectrumSpec& spec, double mean_energy,
                                  const UnitSystem& units = {});

/// True iff Cov(M,M) <= tol for the model's Massieu operator at rho, i.e.
/// sqrt(rho) dM = 0 within tolerance (the state is of (partially) canonical form).
bool is_nondissipative(const DensityOperator& rho, const SeaModel& model, double tol = 1e-12);
bool is_nondissipative(const DensityOperator& rho, const HermitianOperator& hamiltonian,
                       const std::vector<HermitianOperator>& generators, double tol = 1e-12,
                       const UnitSystem& units = {});

}  // namespace seaqt
