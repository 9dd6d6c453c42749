#include "seaqt/pauli.hpp"

#include <cmath>

namespace seaqt {

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd w) : w_(std::move(w)) {
  if (w_.rows() != w_.cols() || w_.rows() < 1) {
    throw DimensionError("TransitionMatrix: square matrix required");
  }
  for (Eigen::Index r = 0; r < w_.rows(); ++r) {
    for (Eigen::Index s = 0; s < w_.cols(); ++s) {
      if (!std::isfinite(w_(r, s)) || w_(r, s) < 0.0) {
        throw ArgumentError("TransitionMatrix: rates must be finite and nonnegative");
      }
    }
  }
}

Eigen::VectorXd pauli_rhs(const Eigen::VectorXd& p, const TransitionMatrix& w) {
  if (p.size() != w.dim()) throw DimensionError("pauli_rhs: size mismatch");
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0) throw ArgumentError("pauli_rhs: negative occupation");
  }
  const Eigen::MatrixXd& m = w.rates();
  Eigen::VectorXd out(p.size());
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    double in = 0.0, loss = 0.0;
    for (Eigen::Index r = 0; r < p.size(); ++r) {
      if (r == n) continue;
      in += m(n, r) * p[r];
      loss += m(r, n);
    }
    out[n] = in - p[n] * loss;
  }
  return out;
}

PauliEntropyRate pauli_entropy_rate(const Eigen::VectorXd& p, const TransitionMatrix& w,
                                    const UnitSystem& units) {
  if (p.size() != w.dim()) throw DimensionError("pauli_entropy_rate: size mismatch");
  const Eigen::MatrixXd& m = w.rates();
  PauliEntropyRate out;
  double acc = 0.0;
  // d<S>/dt = -kB sum dp_n/dt ln p_n collected per transition:
  // kB sum_{n,r} w_nr p_r (ln p_r - ln p_n). The term is unbounded when an
  // occupied level r feeds an empty level n at a finite rate.
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    for (Eigen::Index r = 0; r < p.size(); ++r) {
      if (r == n || m(n, r) == 0.0 || p[r] == 0.0) continue;
      if (p[n] == 0.0) {
        out.divergent = true;
        continue;
      }
      acc += m(n, r) * p[r] * (std::log(p[r]) - std::log(p[n]));
    }
  }
  out.value = units.kB * acc;
  return out;
}

ContrastRecord contrast_run(const Eigen::VectorXd& p0, const TransitionMatrix& w,
                            const SeaModel& model, double horizon, double dt, int sample_every) {
  if (p0.size() != w.dim() || p0.size() != model.dim()) {
    throw DimensionError("contrast_run: size mismatch");
  }
  if (!(horizon > 0.0) || !(dt > 0.0)) throw ArgumentError("contrast_run: horizon and dt > 0");

  ContrastRecord rec;
  for (Eigen::Index i = 0; i < p0.size(); ++i) {
    if (p0[i] != 0.0) continue;
    double inflow = 0.0;
    for (Eigen::Index r = 0; r < p0.size(); ++r) {
      if (r != i && p0[r] > 0.0) inflow += w.rates()(i, r);
    }
    if (inflow > 0.0) {
      rec.applicable = true;
      rec.zero_level = static_cast<int>(i);
      break;
    }
  }
  rec.initial_rate_divergent = pauli_entropy_rate(p0, w, model.units()).divergent;

  // Pauli leg: plain RK4 on the linear rate equation.
  {
    Trajectory& traj = rec.pauli_trajectory;
    traj.mode = EvolutionMode::DiagonalFastPath;
    Eigen::VectorXd p = p0;
    double t = 0.0;
    traj.times.push_back(t);
    traj.probabilities.push_back(p);
    const long steps = std::lround(horizon / dt);
    for (long i = 0; i < steps; ++i) {
      const Eigen::VectorXd k1 = pauli_rhs(p, w);
      const Eigen::VectorXd k2 = pauli_rhs((p + 0.5 * dt * k1).cwiseMax(0.0), w);
      const Eigen::VectorXd k3 = pauli_rhs((p + 0.5 * dt * k2).cwiseMax(0.0), w);
      const Eigen::VectorXd k4 = pauli_rhs((p + dt * k3).cwiseMax(0.0), w);
      p = (p + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).cwiseMax(0.0);
      p /= p.sum();
      t = (i + 1) * dt;
      ++traj.diagnostics.steps;
      if ((i + 1) % sample_every == 0 || i + 1 == steps) {
        traj.times.push_back(t);
        traj.probabilities.push_back(p);
      }
      if (rec.applicable && std::isinf(rec.pauli_repopulation_time) &&
          p[rec.zero_level] > 1e-3) {
        rec.pauli_repopulation_time = t;
      }
    }
  }

  // SEA leg from the identical initial state.
  {
    EvolutionSpec spec{.initial = DensityOperator::diagonal(p0),
                       .model = model,
                       .t_start = 0.0,
                       .t_end = horizon,
                       .stepper = FixedRk4{dt},
                       .sample_every = sample_every,
                       .mode = EvolutionMode::DiagonalFastPath};
    rec.sea_trajectory = integrate(spec);
    if (rec.applicable) {
      for (const auto& p : rec.sea_trajectory.probabilities) {
        rec.sea_level_max = std::max(rec.sea_level_max, std::abs(p[rec.zero_level]));
      }
    }
  }
  return rec;
}

}  // namespace seaqt
