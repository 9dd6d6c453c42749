#include "seaqt/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace seaqt {

std::vector<int> SpectrumSpec::support_indices() const {
  if (support) return *support;
  std::vector<int> all(levels.size());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

void SpectrumSpec::validate() const {
  if (levels.empty()) throw ArgumentError("SpectrumSpec: at least one level required");
  for (double e : levels) {
    if (!std::isfinite(e)) throw ArgumentError("SpectrumSpec: levels must be finite");
  }
  const auto idx = support_indices();
  if (idx.size() < 2) throw ArgumentError("SpectrumSpec: at least 2 levels in support");
  for (int i : idx) {
    if (i < 0 || i >= static_cast<int>(levels.size())) {
      throw ArgumentError("SpectrumSpec: support index " + std::to_string(i) + " out of range");
    }
  }
}

namespace {

struct SupportView {
  std::vector<double> e;  // supported level energies
  double e_min, e_max, e_ref;
};

SupportView make_view(const SpectrumSpec& spec) {
  SupportView v;
  for (int i : spec.support_indices()) v.e.push_back(spec.levels[i]);
  v.e_min = *std::min_element(v.e.begin(), v.e.end());
  v.e_max = *std::max_element(v.e.begin(), v.e.end());
  // Shift by the midpoint so exp stays in range for any beta of interest.
  v.e_ref = 0.5 * (v.e_min + v.e_max);
  return v;
}

/// Mean energy of the canonical family at inverse temperature beta.
double mean_of_beta(const SupportView& v, double beta) {
  double z = 0.0, ze = 0.0;
  double xmax = -std::numeric_limits<double>::infinity();
  for (double e : v.e) xmax = std::max(xmax, -beta * (e - v.e_ref));
  for (double e : v.e) {
    const double w = std::exp(-beta * (e - v.e_ref) - xmax);
    z += w;
    ze += w * e;
  }
  return ze / z;
}

/// d mean / d beta = -Var(e), strictly negative on a nondegenerate support.
double dmean_dbeta(const SupportView& v, double beta) {
  double z = 0.0, ze = 0.0, ze2 = 0.0;
  double xmax = -std::numeric_limits<double>::infinity();
  for (double e : v.e) xmax = std::max(xmax, -beta * (e - v.e_ref));
  for (double e : v.e) {
    const double w = std::exp(-beta * (e - v.e_ref) - xmax);
    z += w;
    ze += w * e;
    ze2 += w * e * e;
  }
  const double m = ze / z;
  return -(ze2 / z - m * m);
}

}  // namespace

CanonicalSolution solve_canonical(const SpectrumSpec& spec, double mean_energy,
                                  const UnitSystem& units) {
  spec.validate();
  units.validate();
  if (!std::isfinite(mean_energy)) throw ArgumentError("solve_canonical: non-finite target");

  const SupportView v = make_view(spec);
  if (!(mean_energy > v.e_min) || !(mean_energy < v.e_max)) {
    throw NoSolutionError("solve_canonical: mean energy " + std::to_string(mean_energy) +
                          " is not strictly inside the supported level range [" +
                          std::to_string(v.e_min) + ", " + std::to_string(v.e_max) + "]");
  }

  const double span = v.e_max - v.e_min;

  // Bracket: mean_of_beta is strictly decreasing, from e_max (beta -> -inf)
  // to e_min (beta -> +inf).
  double lo = -1.0, hi = 1.0;
  while (mean_of_beta(v, hi) > mean_energy) hi *= 2.0;
  while (mean_of_beta(v, lo) < mean_energy) lo *= 2.0;

  // Bisection to 1e-6 in beta.
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (mean_of_beta(v, mid) > mean_energy) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  // Newton polish to 1e-12 relative on the energy residual.
  double beta = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    const double f = mean_of_beta(v, beta) - mean_energy;
    if (std::abs(f) <= 1e-14 * span) break;
    const double df = dmean_dbeta(v, beta);
    double next = beta - f / df;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);  // keep inside the bracket
    if (f > 0.0) {
      lo = std::max(lo, beta);
    } else {
      hi = std::min(hi, beta);
    }
    beta = next;
  }

  CanonicalSolution sol;
  sol.beta = beta;
  sol.temperature = 1.0 / (units.kB * beta);
  sol.probabilities.assign(spec.levels.size(), 0.0);

  double z = 0.0;
  double xmax = -std::numeric_limits<double>::infinity();
  for (int i : spec.support_indices()) xmax = std::max(xmax, -beta * (spec.levels[i] - v.e_ref));
  for (int i : spec.support_indices()) {
    const double w = std::exp(-beta * (spec.levels[i] - v.e_ref) - xmax);
    sol.probabilities[i] = w;
    z += w;
  }
  for (int i : spec.support_indices()) sol.probabilities[i] /= z;
  return sol;
}

bool is_nondissipative(const DensityOperator& rho, const SeaModel& model, double tol) {
  return massieu_coefficients(rho, model).cov_mm <= tol;
}

bool is_nondissipative(const DensityOperator& rho, const HermitianOperator& hamiltonian,
                       const std::vector<HermitianOperator>& generators, double tol,
                       const UnitSystem& units) {
  return is_nondissipative(rho, SeaModel(hamiltonian, generators, units), tol);
}

}  // namespace seaqt
