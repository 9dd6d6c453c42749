#pragma once

#include "seaqt/errors.hpp"

namespace seaqt {

/// Unit system for the simulation. Energies are expressed in multiples of
/// `energy_unit`, times in hbar/energy_unit, entropies in multiples of kB.
/// All defaults are 1 so formulas stay readable in nondimensional form.
struct UnitSystem {
  double hbar = 1.0;
  double kB = 1.0;
  double energy_unit = 1.0;

  void validate() const {
    if (!(hbar > 0.0) || !(kB > 0.0) || !(energy_unit > 0.0)) {
      throw ArgumentError("UnitSystem: hbar, kB and energy_unit must be strictly positive");
    }
  }
};

}  // namespace seaqt
