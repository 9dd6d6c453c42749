#include "seaqt/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seaqt {

namespace {

constexpr double kClipFloor = -1e-10;

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 35.0 / 384 - 5179.0 / 57600, kE3 = 500.0 / 1113 - 7571.0 / 16695,
                 kE4 = 125.0 / 192 - 393.0 / 640, kE5 = -2187.0 / 6784 + 92097.0 / 339200,
                 kE6 = 11.0 / 84 - 187.0 / 2100, kE7 = -1.0 / 40;

// ---------------------------------------------------------------------------
// Diagonal fast path.

struct DiagonalSystem {
  using State = Eigen::VectorXd;

  const SeaModel& model;
  Eigen::VectorXd e;  // level energies

  State rhs(const State& p, bool& near_singular) const {
    // Stage states from trial steps may poke slightly outside the simplex;
    // evaluate on the clipped copy.
    State q = p.cwiseMax(0.0);
    const double sum = q.sum();
    if (!(sum > 0.0)) throw ArgumentError("rhs: probability vector has zero mass");
    q /= sum;

    const DiagonalCoefficients c = diagonal_coefficients(q, e, model.units());
    if (!(c.cov_hh > 0.0)) {
      throw DegenerateSpreadError("rhs_diagonal: all mass on one level (Delta_H = 0)");
    }
    near_singular = c.cov_mm < kNearSingularCutoff * kNearSingularCutoff * c.cov_ss;

    double inv_kbtau = 0.0;
    if (model.tau_policy().kind == TauPolicy::Kind::Constant) {
      inv_kbtau = 1.0 / (model.units().kB * model.tau_policy().tau0);
    } else {
      const double dm = std::sqrt(std::max(c.cov_mm, 0.0));
      const double ds = std::sqrt(std::max(c.cov_ss, 0.0));
      inv_kbtau = (dm < kNondissipativeCutoff * ds)
                      ? 0.0
                      : 2.0 * std::sqrt(c.cov_hh) / (model.units().hbar * dm);
    }

    State out = State::Zero(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (q[i] > 0.0) out[i] = q[i] * c.delta_m_diag[i] * inv_kbtau;
    }
    return out;
  }

  double hygiene(State& p, double t) const {
    // Returns pre-renormalization trace drift; throws on real positivity loss.
    double drift = std::abs(p.sum() - 1.0);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (p[i] < 0.0) {
        if (p[i] < kClipFloor) {
          throw IntegrationError("integrate: occupation " + std::to_string(p[i]) +
                                     " fell below the clip tolerance",
                                 t);
        }
        p[i] = 0.0;
      }
    }
    p /= p.sum();
    return drift;
  }

  double energy(const State& p) const { return p.dot(e); }
  double entropy_of(const State& p) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (p[i] > 0.0) s -= p[i] * std::log(p[i]);
    }
    return model.units().kB * s;
  }
  double cov_mm_of(const State& p) const {
    return diagonal_coefficients(p, e, model.units()).cov_mm;
  }
  double err_norm(const State& err, const State& ynew, const State& yold, double atol,
                  double rtol) const {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const double sc = atol + rtol * std::max(std::abs(ynew[i]), std::abs(yold[i]));
      worst = std::max(worst, std::abs(err[i]) / sc);
    }
    return worst;
  }
};

// ---------------------------------------------------------------------------
// Full matrix path.
//
// The state is integrated in the Hamiltonian frame: sigma(t) =
// U'(t) rho(t) U(t) with U(t) = exp(-iHt/hbar). Because H commutes with U and
// the Massieu construction is frame covariant, the rotating-frame equation is
// purely dissipative with the unchanged functional form,
//   dsigma/dt = {dM(sigma), sigma}/(2 kB tau),
// and the unitary factor is applied exactly at sampling time. This keeps the
// spectrum (hence purity and cardinality) free of the O(dt^2) stage leakage a
// direct integration of the commutator would inject.

struct FullSystem {
  using State = Matrix;

  const SeaModel& model;
  Eigen::VectorXd h_evals;  // spectral data of H for the exact unitary factor
  Matrix h_evecs;

  FullSystem(const SeaModel& m) : model(m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.hamiltonian().matrix());
    h_evals = es.eigenvalues();
    h_evecs = es.eigenvectors();
  }

  /// rho(t) = U(elapsed) sigma U(elapsed)^dag, U = exp(-iH elapsed/hbar).
  Matrix lab_state(const State& sigma, double elapsed) const {
    Eigen::VectorXcd phase(h_evals.size());
    for (Eigen::Index i = 0; i < h_evals.size(); ++i) {
      phase[i] = std::exp(Complex(0.0, -h_evals[i] * elapsed / model.units().hbar));
    }
    const Matrix u = h_evecs * phase.asDiagonal() * h_evecs.adjoint();
    return u * sigma * u.adjoint();
  }

  State rhs(const State& m, bool& near_singular) const {
    const DensityOperator rho = DensityOperator::clipped(m);
    const MassieuCoefficients coeffs = massieu_coefficients(rho, model);
    near_singular =
        coeffs.cov_mm < kNearSingularCutoff * kNearSingularCutoff * coeffs.cov_ss;
    return sea_dissipator(rho, model, coeffs);
  }

  double hygiene(State& m, double t) const {
    const double drift = std::abs(m.trace().real() - 1.0);
    m = 0.5 * (m + m.adjoint().eval());
    try {
      // Strict validation thresholds; rebuilt from the clipped spectrum.
      DensityOperator rho(m / m.trace().real());
      m = rho.matrix();
    } catch (const ValidationError& err) {
      throw IntegrationError(std::string("integrate: ") + err.what(), t);
    }
    return drift;
  }

  double energy(const State& m) const {
    return (m * model.hamiltonian().matrix()).trace().real();
  }
  double entropy_of(const State& m) const {
    return entropy(DensityOperator::clipped(m), model.units());
  }
  double cov_mm_of(const State& m) const {
    return massieu_coefficients(DensityOperator::clipped(m), model).cov_mm;
  }
  double err_norm(const State& err, const State& ynew, const State& yold, double atol,
                  double rtol) const {
    double worst = 0.0;
    for (Eigen::Index c = 0; c < err.cols(); ++c) {
      for (Eigen::Index r = 0; r < err.rows(); ++r) {
        const double sc = atol + rtol * std::max(std::abs(ynew(r, c)), std::abs(yold(r, c)));
        worst = std::max(worst, std::abs(err(r, c)) / sc);
      }
    }
    return worst;
  }
};

// ---------------------------------------------------------------------------

template <typename System>
class LegRunner {
public:
  LegRunner(const System& sys, const EvolutionSpec& spec, Trajectory& out, const SampleSink& sink)
      : sys_(sys), spec_(spec), out_(out), sink_(sink) {}

  void run(typename System::State y) {
    const double span = spec_.t_end - spec_.t_start;
    dir_ = span >= 0.0 ? 1.0 : -1.0;
    t_ = spec_.t_start;
    e0_ = sys_.energy(y);
    s_prev_ = sys_.entropy_of(y);
    record(y);

    if (std::abs(span) < 1e-15) return;

    if (std::holds_alternative<FixedRk4>(spec_.stepper)) {
      run_fixed(std::move(y), std::get<FixedRk4>(spec_.stepper));
    } else {
      run_adaptive(std::move(y), std::get<AdaptiveRk45>(spec_.stepper));
    }
  }

private:
  using State = typename System::State;

  bool at_end() const { return remaining() <= 1e-14 * std::max(1.0, std::abs(spec_.t_end)); }

  void run_fixed(State y, const FixedRk4& st) {
    if (!(st.dt > 0.0)) throw ArgumentError("integrate: dt must be positive");
    while (!at_end()) {
      const double h = std::min(st.dt, remaining());
      bool dummy = false;
      const State k1 = sys_.rhs(y, dummy);
      const State k2 = sys_.rhs(y + (0.5 * dir_ * h) * k1, dummy);
      const State k3 = sys_.rhs(y + (0.5 * dir_ * h) * k2, dummy);
      const State k4 = sys_.rhs(y + (dir_ * h) * k3, dummy);
      State ynext = y + (dir_ * h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      accept(y, std::move(ynext), h);
      if (done_) return;
    }
    flush_final(y);
  }

  void run_adaptive(State y, const AdaptiveRk45& st) {
    if (!(st.rtol > 0.0) || !(st.atol > 0.0)) {
      throw ArgumentError("integrate: rtol and atol must be positive");
    }
    double h = std::clamp(1e-3, st.dt_min, st.dt_max);
    while (!at_end()) {
      h = std::min(h, remaining());
      bool near_singular = false;
      const State k1 = sys_.rhs(y, near_singular);
      if (near_singular) {
        // The SEA direction is nearly singular (Delta_M << Delta_S); force
        // small steps through the neighborhood.
        h = std::min(h, std::max(st.dt_min, st.dt_max * 1e-2));
        h = std::min(h, remaining());
      }
      bool dummy = false;
      const double hd = dir_ * h;
      const State k2 = sys_.rhs(y + hd * (kA21 * k1), dummy);
      const State k3 = sys_.rhs(y + hd * (kA31 * k1 + kA32 * k2), dummy);
      const State k4 = sys_.rhs(y + hd * (kA41 * k1 + kA42 * k2 + kA43 * k3), dummy);
      const State k5 = sys_.rhs(y + hd * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4), dummy);
      const State k6 =
          sys_.rhs(y + hd * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5), dummy);
      State y5 = y + hd * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
      const State k7 = sys_.rhs(y5, dummy);
      const State errv = hd * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

      const double err = sys_.err_norm(errv, y5, y, st.atol, st.rtol);
      if (err <= 1.0) {
        accept(y, std::move(y5), h);
        if (done_) return;
      } else if (h <= st.dt_min * (1.0 + 1e-9)) {
        throw IntegrationError("integrate: step size underflow (error " + std::to_string(err) +
                                   " at dt_min)",
                               t_);
      }
      const double grow = 0.9 * std::pow(std::max(err, 1e-12), -0.2);
      h = std::clamp(h * std::clamp(grow, 0.2, 5.0), st.dt_min, st.dt_max);
    }
    flush_final(y);
  }

  double remaining() const { return dir_ * (spec_.t_end - t_); }

  void accept(State& y, State&& ynext, double h) {
    const double drift = sys_.hygiene(ynext, t_ + dir_ * h);
    diag().max_trace_drift = std::max(diag().max_trace_drift, drift);
    t_ += dir_ * h;
    y = std::move(ynext);

    ++diag().steps;
    diag().min_dt = std::min(diag().min_dt, h);
    diag().max_dt = std::max(diag().max_dt, h);
    diag().max_energy_drift =
        std::max(diag().max_energy_drift, std::abs(sys_.energy(y) - e0_));
    const double s = sys_.entropy_of(y);
    diag().worst_entropy_step = std::min(diag().worst_entropy_step, dir_ * (s - s_prev_));
    s_prev_ = s;

    if (++since_sample_ >= spec_.sample_every || at_end()) {
      since_sample_ = 0;
      record(y);
      if (spec_.stop_when_relaxed) {
        if (sys_.cov_mm_of(y) <
            spec_.relaxed_cov_mm * spec_.model.units().kB * spec_.model.units().kB) {
          if (++relaxed_run_ >= spec_.relaxed_samples) {
            diag().relaxed_stop = true;
            done_ = true;
          }
        } else {
          relaxed_run_ = 0;
        }
      }
    }
  }

  void flush_final(const State& y) {
    if (out_.times.empty() || out_.times.back() != t_) record(y);
  }

  void record(const State& y);

  TrajectoryDiagnostics& diag() { return out_.diagnostics; }

  const System& sys_;
  const EvolutionSpec& spec_;
  Trajectory& out_;
  const SampleSink& sink_;
  double t_ = 0.0, dir_ = 1.0, e0_ = 0.0, s_prev_ = 0.0;
  int since_sample_ = 0;
  int relaxed_run_ = 0;
  bool done_ = false;
};

template <>
void LegRunner<DiagonalSystem>::record(const Eigen::VectorXd& y) {
  out_.times.push_back(t_);
  out_.probabilities.push_back(y);
  if (sink_) {
    TrajectorySample s{t_, &out_.probabilities.back(), nullptr, &out_.diagnostics};
    sink_(s);
  }
}

template <>
void LegRunner<FullSystem>::record(const Matrix& y) {
  out_.times.push_back(t_);
  out_.states.emplace_back(sys_.lab_state(y, t_ - spec_.t_start));
  if (sink_) {
    TrajectorySample s{t_, nullptr, &out_.states.back(), &out_.diagnostics};
    sink_(s);
  }
}

}  // namespace

DensityOperator Trajectory::state_at(std::size_t i) const {
  if (mode == EvolutionMode::DiagonalFastPath) return DensityOperator::diagonal(probabilities.at(i));
  return states.at(i);
}

const Eigen::VectorXd& Trajectory::probabilities_at(std::size_t i) const {
  if (mode != EvolutionMode::DiagonalFastPath) {
    throw ArgumentError("Trajectory::probabilities_at: full-mode trajectory");
  }
  return probabilities.at(i);
}

Matrix rhs_full(const DensityOperator& rho, const SeaModel& model) {
  detail::require_same_dim(rho.dim(), model.dim(), "rhs_full");
  const MassieuCoefficients coeffs = massieu_coefficients(rho, model);
  const Matrix& h = model.hamiltonian().matrix();
  const Complex i_over_hbar(0.0, 1.0 / model.units().hbar);
  Matrix out = -i_over_hbar * (h * rho.matrix() - rho.matrix() * h);
  out += sea_dissipator(rho, model, coeffs);
  return out;
}

Eigen::VectorXd rhs_diagonal(const Eigen::VectorXd& p, const Eigen::VectorXd& e, double tau,
                             const UnitSystem& units) {
  if (p.size() != e.size()) throw DimensionError("rhs_diagonal: size mismatch");
  if (!(tau > 0.0)) throw ArgumentError("rhs_diagonal: tau must be positive");
  int positive = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0) throw ArgumentError("rhs_diagonal: negative occupation");
    if (p[i] > 0.0) ++positive;
  }
  if (positive < 2) {
    throw DegenerateSpreadError("rhs_diagonal: at least two occupied levels required");
  }
  const DiagonalCoefficients c = diagonal_coefficients(p, e, units);
  if (!(c.cov_hh > 0.0)) {
    throw DegenerateSpreadError("rhs_diagonal: all mass on one level (Delta_H = 0)");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) out[i] = p[i] * c.delta_m_diag[i] / (units.kB * tau);
  }
  return out;
}

namespace {

Eigen::VectorXd extract_diagonal_state(const EvolutionSpec& spec) {
  const HermitianOperator& h = spec.model.hamiltonian();
  const Matrix& hm = h.matrix();
  Matrix off = hm;
  off.diagonal().setZero();
  if (off.norm() > 1e-12 * std::max(1.0, hm.norm())) {
    throw ArgumentError("integrate: DiagonalFastPath requires a diagonal Hamiltonian");
  }
  const Matrix comm = hm * spec.initial.matrix() - spec.initial.matrix() * hm;
  if (comm.norm() > 1e-10 * std::max(1.0, hm.norm())) {
    throw ArgumentError("integrate: DiagonalFastPath requires [rho0, H] = 0 within 1e-10");
  }
  Eigen::VectorXd p(spec.initial.dim());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    p[i] = spec.initial.matrix()(i, i).real();
    if (p[i] < 0.0) p[i] = 0.0;
  }
  p /= p.sum();
  return p;
}

}  // namespace

Trajectory integrate(const EvolutionSpec& spec, const SampleSink& sink) {
  detail::require_same_dim(spec.initial.dim(), spec.model.dim(), "integrate");
  if (spec.sample_every < 1) throw ArgumentError("integrate: sample_every must be >= 1");

  Trajectory out;
  out.mode = spec.mode;

  if (spec.mode == EvolutionMode::DiagonalFastPath) {
    Eigen::VectorXd e(spec.model.dim());
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      e[i] = spec.model.hamiltonian().matrix()(i, i).real();
    }
    Eigen::VectorXd p0 = extract_diagonal_state(spec);

    DiagonalSystem sys{spec.model, e};
    LegRunner<DiagonalSystem> runner(sys, spec, out, sink);
    runner.run(p0);

    // Cardinality diagnostic: levels that started exactly zero must stay so.
    for (const auto& p : out.probabilities) {
      for (Eigen::Index i = 0; i < p0.size(); ++i) {
        if (p0[i] == 0.0 && p[i] != 0.0) out.diagnostics.zeros_preserved = false;
      }
    }
  } else {
    FullSystem sys(spec.model);
    LegRunner<FullSystem> runner(sys, spec, out, sink);
    runner.run(spec.initial.matrix());
  }
  return out;
}

}  // namespace seaqt
