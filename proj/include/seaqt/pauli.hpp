#pragma once

#include <Eigen/Dense>
#include <optional>

#include "seaqt/dynamics.hpp"

namespace seaqt {

/// Nonnegative transition rates; w(r, s) is the probability rate from level s
/// to level r. The diagonal is ignored.
class TransitionMatrix {
public:
  explicit TransitionMatrix(Eigen::MatrixXd w);
  const Eigen::MatrixXd& rates() const { return w_; }
  Eigen::Index dim() const { return w_.rows(); }

private:
  Eigen::MatrixXd w_;
};

/// Pauli master equation: dp_n/dt = sum_r w_nr p_r - p_n sum_r w_rn.
/// Linear in p; conserves probability exactly. Zero levels repopulate at a
/// finite rate whenever an occupied level feeds them.
Eigen::VectorXd pauli_rhs(const Eigen::VectorXd& p, const TransitionMatrix& w);

/// Entropy rate of the diagonal transition model:
///   d<S>/dt = kB sum_{n,r} w_nr (p_r - p_n) ln p_r.
/// The rate diverges when an occupied level feeds an empty one; that outcome
/// is reported as a flag rather than a floating-point infinity.
struct PauliEntropyRate {
  bool divergent = false;
  double value = 0.0;  ///< meaningful only when divergent is false
};
PauliEntropyRate pauli_entropy_rate(const Eigen::VectorXd& p, const TransitionMatrix& w,
                                    const UnitSystem& units = {});

/// Side-by-side run of the Pauli and SEA dynamics from the same initial
/// distribution containing an exact zero, demonstrating finite-rate
/// repopulation on one side and cardinality invariance on the other.
struct ContrastRecord {
  bool applicable = false;  ///< p0 has an exact zero fed by w
  int zero_level = -1;      ///< the tracked level (first applicable zero)
  double pauli_repopulation_time =
      std::numeric_limits<double>::infinity();  ///< first t with pauli p > 1e-3
  double sea_level_max = 0.0;                   ///< max occupation of the zero level under SEA
  bool initial_rate_divergent = false;          ///< Pauli entropy rate flag at t = 0
  Trajectory pauli_trajectory;
  Trajectory sea_trajectory;
};

ContrastRecord contrast_run(const Eigen::VectorXd& p0, const TransitionMatrix& w,
                            const SeaModel& model, double horizon, double dt = 1e-3,
                            int sample_every = 10);

}  // namespace seaqt
