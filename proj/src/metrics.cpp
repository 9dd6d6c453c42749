#include "seaqt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace seaqt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Shared per-state precomputation for all metric evaluations.
struct StateKit {
  MassieuCoefficients coeffs;
  HermitianOperator s_op;
  double tau = 0.0;        // dissipation_time value (0 allowed under AdaptiveEquality)
  double inv_kbtau = 0.0;  // 1/(kB tau) with the adaptive 0/0 resolved; 0 when inactive
  bool active = false;     // dissipative mechanism on (Delta_M above cutoff)
  bool commuting = false;  // [rho, H] = 0 within tolerance
  double delta_h = 0.0, delta_s = 0.0, delta_m = 0.0;
  double c_mh = 0.0;
  double cov_sm = 0.0;  // covariance(S, M), computed independently of cov_mm
  double rate_s = 0.0;
  TimeScales times;
};

StateKit make_kit(const DensityOperator& rho, const SeaModel& model) {
  StateKit kit{.coeffs = massieu_coefficients(rho, model),
               .s_op = entropy_operator(rho, model.units()),
               .times = TimeScales{}};
  const UnitSystem& u = model.units();

  kit.delta_h = std::sqrt(std::max(kit.coeffs.cov_hh, 0.0));
  kit.delta_s = std::sqrt(std::max(kit.coeffs.cov_ss, 0.0));
  kit.delta_m = std::sqrt(std::max(kit.coeffs.cov_mm, 0.0));
  // Dissipation counts as active only when Cov(M,M) clears the cancellation
  // noise of the projection dM = dS - a.(dH, dN): that noise scales with the
  // covariances of the subtracted parts, not with Cov(S,S) alone (small |theta|
  // amplifies it).
  const double noise_scale = std::max(kit.coeffs.cov_ss, kit.coeffs.cov_pp);
  kit.active = kit.coeffs.cov_mm > 0.0 && kit.coeffs.cov_mm >= 1e-20 * noise_scale;
  kit.commuting = model.commutes_with_hamiltonian(rho);

  if (model.tau_policy().kind == TauPolicy::Kind::Constant) {
    kit.tau = model.tau_policy().tau0;
    kit.inv_kbtau = kit.active ? 1.0 / (u.kB * kit.tau) : 0.0;
  } else {
    if (kit.active) {
      if (!(kit.coeffs.cov_hh > 0.0)) {
        throw DegenerateSpreadError("metrics: AdaptiveEquality needs Delta_H > 0");
      }
      kit.tau = 0.5 * u.hbar / u.kB * kit.delta_m / kit.delta_h;
      kit.inv_kbtau = 2.0 * kit.delta_h / (u.hbar * kit.delta_m);
    } else {
      kit.tau = 0.0;
      kit.inv_kbtau = 0.0;
    }
  }

  kit.c_mh = (kit.active && kit.delta_h > 0.0)
                 ? comm_correlation(rho, kit.coeffs.delta_m, model.hamiltonian()) /
                       (kit.delta_m * kit.delta_h)
                 : 0.0;
  kit.cov_sm = kit.active ? covariance(rho, kit.s_op, kit.coeffs.delta_m) : 0.0;
  kit.rate_s = kit.cov_sm * kit.inv_kbtau;

  TimeScales& ts = kit.times;
  ts.tau_u = kit.delta_h > 0.0 ? 0.5 * u.hbar / kit.delta_h : kInf;
  ts.tau_d = kit.active ? u.kB * kit.tau / kit.delta_m : kInf;
  ts.tau_k = (kit.active && kit.delta_s > 0.0) ? u.kB * kit.tau / kit.delta_s
             : kit.delta_s > 0.0 && model.tau_policy().kind == TauPolicy::Kind::Constant
                 ? u.kB * model.tau_policy().tau0 / kit.delta_s
                 : kInf;
  ts.tau_s = (kit.active && std::abs(kit.rate_s) > 0.0) ? kit.delta_s / std::abs(kit.rate_s)
                                                        : kInf;
  ts.a_tau = (std::isfinite(ts.tau_u) && std::isfinite(ts.tau_d)) ? ts.tau_u / ts.tau_d
             : std::isinf(ts.tau_d)                               ? 0.0
                                                                  : kInf;
  double inv2 = 0.0;
  if (std::isfinite(ts.tau_u)) inv2 += 1.0 / (ts.tau_u * ts.tau_u);
  if (std::isfinite(ts.tau_d)) inv2 += 1.0 / (ts.tau_d * ts.tau_d);
  if (std::isfinite(ts.tau_u) && std::isfinite(ts.tau_d)) {
    inv2 += 2.0 * kit.c_mh / (ts.tau_u * ts.tau_d);
  }
  ts.tau_ud = inv2 > 0.0 ? 1.0 / std::sqrt(inv2) : kInf;
  return kit;
}

double observable_rate(const DensityOperator& rho, const HermitianOperator& f,
                       const SeaModel& model, const StateKit& kit) {
  const double unitary = comm_correlation(rho, f, model.hamiltonian()) * 2.0 / model.units().hbar;
  const double dissipative =
      kit.active ? covariance(rho, f, kit.coeffs.delta_m) * kit.inv_kbtau : 0.0;
  return unitary + dissipative;
}

bool commutes_with(const HermitianOperator& f, const HermitianOperator& h) {
  const Matrix comm = f.matrix() * h.matrix() - h.matrix() * f.matrix();
  return comm.norm() <= 1e-12 * std::max(1.0, f.frobenius_norm() * h.frobenius_norm());
}

struct SuiteBuilder {
  std::vector<ResidualEntry>& out;

  void bound(const std::string& family, const std::string& subject, double residual,
             bool degenerate = false) {
    out.push_back({family, subject, CheckKind::LowerBound, residual, degenerate});
  }
  void equality(const std::string& family, const std::string& subject, double residual,
                bool degenerate = false) {
    out.push_back({family, subject, CheckKind::Equality, residual, degenerate});
  }
};

}  // namespace

bool residual_ok(const ResidualEntry& e, double tol) {
  if (e.degenerate) return true;
  if (e.kind == CheckKind::Equality) return std::abs(e.residual) <= tol;
  return e.residual >= -tol;
}

std::vector<NamedObservable> energy_projectors(const HermitianOperator& hamiltonian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian.matrix());
  const Eigen::VectorXd evals = es.eigenvalues();
  const Matrix evecs = es.eigenvectors();
  const double scale = std::max(1.0, std::abs(evals[evals.size() - 1]) + std::abs(evals[0]));

  std::vector<NamedObservable> out;
  Eigen::Index i = 0;
  int label = 1;
  while (i < evals.size()) {
    Eigen::Index j = i;
    Matrix proj = Matrix::Zero(hamiltonian.dim(), hamiltonian.dim());
    while (j < evals.size() && std::abs(evals[j] - evals[i]) <= 1e-10 * scale) {
      proj += evecs.col(j) * evecs.col(j).adjoint();
      ++j;
    }
    out.push_back({"P" + std::to_string(label++), HermitianOperator(proj), true});
    i = j;
  }
  return out;
}

std::vector<NamedObservable> default_observables(const SeaModel& model) {
  std::vector<NamedObservable> out;
  out.push_back({"H", model.hamiltonian(), false});
  for (auto& p : energy_projectors(model.hamiltonian())) out.push_back(std::move(p));
  return out;
}

double characteristic_time(const DensityOperator& rho, const HermitianOperator& f,
                           const SeaModel& model) {
  const StateKit kit = make_kit(rho, model);
  const double cov_ff = covariance(rho, f, f);
  const double spread = std::sqrt(std::max(cov_ff, 0.0));
  if (!(spread > 1e-12 * std::max(1.0, f.frobenius_norm()))) {
    throw DegenerateSpreadError("characteristic_time: observable has zero spread");
  }
  const double rate = observable_rate(rho, f, model, kit);
  double inv_floor = 0.0;
  if (std::isfinite(kit.times.tau_u)) inv_floor += 1.0 / kit.times.tau_u;
  if (std::isfinite(kit.times.tau_d)) inv_floor += 1.0 / kit.times.tau_d;
  if (std::abs(rate) <= 1e-14 * spread * inv_floor) return kInf;
  return spread / std::abs(rate);
}

TimeScales time_scales(const DensityOperator& rho, const SeaModel& model) {
  return make_kit(rho, model).times;
}

EvolutionDirection evolution_direction(const DensityOperator& rho, const SeaModel& model) {
  const StateKit kit = make_kit(rho, model);
  const UnitSystem& u = model.units();
  Matrix c = Matrix::Zero(rho.dim(), rho.dim());
  if (!kit.commuting && kit.delta_h > 0.0) {
    const HermitianOperator dh = center(model.hamiltonian(), rho);
    c += Complex(0.0, 2.0 / u.hbar) * (rho.sqrt() * dh.matrix());
  }
  if (kit.active) {
    c += (rho.sqrt() * kit.coeffs.delta_m.matrix()) * kit.inv_kbtau;
  }
  return {c, scalar_product(c, c)};
}

UncertaintyReport inequality_suite(const DensityOperator& rho, const SeaModel& model,
                                   const std::vector<NamedObservable>& observables) {
  const StateKit kit = make_kit(rho, model);
  const UnitSystem& u = model.units();
  const TimeScales& ts = kit.times;

  UncertaintyReport rep;
  rep.state = StateSummary{.mean_h = kit.coeffs.mean_h,
                           .entropy = kit.coeffs.mean_s,
                           .entropy_rate = kit.rate_s,
                           .theta = kit.coeffs.theta,
                           .delta_h = kit.delta_h,
                           .delta_s = kit.delta_s,
                           .delta_m = kit.delta_m,
                           .cov_mm = kit.coeffs.cov_mm,
                           .tau = kit.tau,
                           .times = ts};
  SuiteBuilder b{rep.residuals};

  const double kB = u.kB;
  const double ss = std::max(kit.coeffs.cov_ss, 1e-300);

  // --- state-level identities and bounds -----------------------------------
  b.equality("massieu_trace", "state", mean_value(rho, kit.coeffs.delta_m) / kB);
  {
    // Meaningful only while the dissipative mechanism is on; at (nearly)
    // nondissipative states the Delta_M normalization divides pure roundoff.
    const double denom = kit.delta_h * kit.delta_m;
    const bool meaningful = kit.active && denom > 0.0;
    b.equality("orthogonality_H", "state",
               meaningful ? covariance(rho, model.hamiltonian(), kit.coeffs.delta_m) / denom : 0.0,
               !meaningful);
    for (std::size_t i = 0; i < model.generators().size(); ++i) {
      const auto& n_i = model.generators()[i];
      const double dn = std::sqrt(std::max(covariance(rho, n_i, n_i), 0.0));
      const bool ok_n = kit.active && dn * kit.delta_m > 0.0;
      b.equality("orthogonality_N" + std::to_string(i), "state",
                 ok_n ? covariance(rho, n_i, kit.coeffs.delta_m) / (dn * kit.delta_m) : 0.0,
                 !ok_n);
    }
  }
  b.bound("entropy_production", "state", kit.active ? kit.cov_sm / ss : 0.0, !kit.active);
  b.equality("projection_identity", "state",
             kit.active ? (kit.cov_sm - kit.coeffs.cov_mm) / ss : 0.0, !kit.active);
  b.equality("massieu_decomposition", "state",
             (kit.coeffs.cov_mm - (kit.coeffs.cov_ss - kit.coeffs.cov_pp)) / ss,
             kit.coeffs.cov_ss <= 0.0);
  b.equality("commutator_alignment", "state", kit.c_mh, !kit.active || !(kit.delta_h > 0.0));
  b.bound("theta_spread_bound", "state",
          kit.delta_s > 0.0 ? (kit.delta_s - std::sqrt(std::max(kit.coeffs.cov_pp, 0.0))) / kit.delta_s
                            : 0.0,
          !(kit.delta_s > 0.0));
  b.bound("theta_product_bound", "state",
          1.0 - 2.0 * kit.delta_m * std::sqrt(std::max(kit.coeffs.cov_pp, 0.0)) / ss,
          kit.coeffs.cov_ss <= 0.0);
  b.bound("spread_chain", "state", kit.delta_s > 0.0 ? 1.0 - kit.delta_m / kit.delta_s : 0.0,
          !(kit.delta_s > 0.0));
  // tau_S tau_K = tau_D^2  <=>  Cov(M,M) = Cov(S,M). The relative form is
  // resolvable only while Delta_M is well above roundoff relative to Delta_S;
  // in the near-singular region both sides cancel to machine noise.
  const bool identities_resolvable =
      kit.active && kit.delta_m >= 1e-3 * kit.delta_s && kit.cov_sm != 0.0;
  b.equality("time_identity", "state",
             identities_resolvable ? kit.coeffs.cov_mm / kit.cov_sm - 1.0 : 0.0,
             !identities_resolvable);
  {
    const EvolutionDirection dir = evolution_direction(rho, model);
    double closed = 0.0;
    if (!kit.commuting && kit.delta_h > 0.0) closed += 1.0 / (ts.tau_u * ts.tau_u);
    if (kit.active) closed += 1.0 / (ts.tau_d * ts.tau_d);
    if (!kit.commuting && kit.delta_h > 0.0 && kit.active) {
      closed += 2.0 * kit.c_mh / (ts.tau_u * ts.tau_d);
    }
    const bool norm_resolvable =
        closed > 0.0 && !(kit.commuting && kit.delta_m < 1e-3 * kit.delta_s);
    b.equality("norm_identity", "state",
               norm_resolvable ? (dir.norm_squared - closed) / closed : 0.0,
               !norm_resolvable);
  }
  {
    const bool have_r = kit.active && kit.delta_s > 0.0;
    const double r_sm = have_r ? kit.cov_sm / (kit.delta_s * kit.delta_m) : 0.0;
    b.bound("entropy_rate_ratio", "state", have_r ? 1.0 - std::abs(r_sm) : 0.0, !have_r);
    b.bound("entropy_chain", "state", have_r ? r_sm - r_sm * r_sm : 0.0, !have_r);
    // tau_K/tau_S = r_SM^2 (same resolvability gate as the time identity)
    b.equality("entropy_chain_identity", "state",
               have_r && identities_resolvable
                   ? kit.cov_sm / kit.coeffs.cov_ss - r_sm * r_sm
                   : 0.0,
               !(have_r && identities_resolvable));
    b.bound("entropy_rate_upper_spread", "state",
            have_r ? (kit.delta_s * kit.delta_m - kit.cov_sm) / ss : 0.0, !have_r);
    b.bound("entropy_rate_upper_var", "state",
            have_r ? (kit.coeffs.cov_ss - kit.cov_sm) / ss : 0.0, !have_r);
    b.bound("entropy_rate_lower", "state",
            have_r ? (kit.cov_sm + kit.delta_s * kit.delta_m) / ss : 0.0, !have_r);
    // TES: a_tau |r_SM| = (hbar/2)|dS/dt| / (Delta_S Delta_H)
    const bool tes_ok = have_r && kit.delta_h > 0.0;
    b.equality("entropy_time_exact", "state",
               tes_ok ? (ts.a_tau * std::abs(r_sm) -
                         0.5 * u.hbar * std::abs(kit.rate_s) / (kit.delta_s * kit.delta_h)) /
                            std::max(1.0, ts.a_tau)
                      : 0.0,
               !tes_ok);
  }

  // --- per-observable rows ---------------------------------------------------
  auto add_observable = [&](const std::string& name, const HermitianOperator& f,
                            bool is_projector) {
    ObservableRow row;
    row.name = name;
    const double cov_ff = covariance(rho, f, f);
    row.spread = std::sqrt(std::max(cov_ff, 0.0));
    if (!(row.spread > 1e-12 * std::max(1.0, f.frobenius_norm()))) {
      row.degenerate = true;
      rep.rows.push_back(row);
      return;
    }
    row.rate = observable_rate(rho, f, model, kit);
    row.r_fm = kit.active ? covariance(rho, f, kit.coeffs.delta_m) / (row.spread * kit.delta_m)
                          : 0.0;
    row.c_fh = kit.delta_h > 0.0
                   ? comm_correlation(rho, f, model.hamiltonian()) / (row.spread * kit.delta_h)
                   : 0.0;
    double inv_floor = 0.0;
    if (std::isfinite(ts.tau_u)) inv_floor += 1.0 / ts.tau_u;
    if (std::isfinite(ts.tau_d)) inv_floor += 1.0 / ts.tau_d;
    row.conserved = std::abs(row.rate) <= 1e-14 * row.spread * inv_floor;
    row.tau_f = row.conserved ? kInf : row.spread / std::abs(row.rate);
    rep.rows.push_back(row);

    const double a = ts.a_tau;
    const double rate_mag = std::abs(row.rate);
    const double bound_mag = 2.0 * row.spread * kit.delta_h / u.hbar *
                             std::abs(row.c_fh + a * row.r_fm);
    // Normalized by the sizes of the unitary and dissipative parts: when the
    // two mechanisms cancel, the residual must not divide roundoff by the
    // cancelled total.
    const double unitary_part =
        std::abs(comm_correlation(rho, f, model.hamiltonian())) * 2.0 / u.hbar;
    const double dissipative_part =
        kit.active ? std::abs(covariance(rho, f, kit.coeffs.delta_m)) * kit.inv_kbtau : 0.0;
    const double part_scale = unitary_part + dissipative_part;
    b.equality("exact_time_energy", name,
               part_scale > 0.0 ? (rate_mag - bound_mag) / part_scale : 0.0,
               part_scale == 0.0);

    // tau_F >= tau_UD: 1 - tau_UD |rate|/Delta_F.
    b.bound("combined_lower", name,
            std::isfinite(ts.tau_ud) ? 1.0 - ts.tau_ud * rate_mag / row.spread
                                     : (rate_mag == 0.0 ? 1.0 : -kInf),
            !std::isfinite(ts.tau_ud) && rate_mag != 0.0);

    const double lhs2 = std::pow(row.c_fh + a * row.r_fm, 2.0);
    if (kit.delta_h > 0.0) {
      const double cap1 = 1.0 + a * a + 2.0 * a * kit.c_mh;
      b.bound("sharpest_bound", name, (cap1 - lhs2) / std::max(cap1, 1.0));
      b.bound("sum_bound", name, ((1.0 + a) * (1.0 + a) - lhs2) / ((1.0 + a) * (1.0 + a)));
      b.bound("sea_sum_bound", name, (1.0 + a * a - lhs2) / (1.0 + a * a));
      if (!kit.active) {
        const double r_fh = covariance(rho, f, model.hamiltonian()) / (row.spread * kit.delta_h);
        b.bound("schrodinger_pair", name, 1.0 - r_fh * r_fh - row.c_fh * row.c_fh);
      }
    }

    // genunc6M / genunc6 in rate form: rate^2 <= Delta_F^2 (1/tau_u^2 + 1/tau_x^2).
    auto lower_pair = [&](const std::string& family, double tau_x) {
      double denom = 0.0;
      if (std::isfinite(ts.tau_u)) denom += 1.0 / (ts.tau_u * ts.tau_u);
      if (std::isfinite(tau_x) && tau_x > 0.0) denom += 1.0 / (tau_x * tau_x);
      if (denom <= 0.0) {
        b.bound(family, name, rate_mag == 0.0 ? 1.0 : -kInf, rate_mag != 0.0);
        return;
      }
      b.bound(family, name,
              1.0 - rate_mag * rate_mag / (row.spread * row.spread * denom));
    };
    lower_pair("energy_massieu_lower", ts.tau_d);
    lower_pair("energy_entropy_lower", ts.tau_k);

    // tauHD harmonic lower bound: tau_F >= a/(1+a) |r_SM| tau_S = a/(1+a) tau_D.
    if (kit.active && std::isfinite(ts.tau_d)) {
      const double lb = a / (1.0 + a) * ts.tau_d;
      b.bound("harmonic_lower", name, 1.0 - lb * rate_mag / row.spread);
    }

    if (commutes_with(f, model.hamiltonian())) {
      if (kit.active) {
        const double eq = rate_mag / (row.spread * kit.delta_m * kit.inv_kbtau) -
                          std::abs(row.r_fm);
        b.equality(is_projector ? "occupation_rate" : "commuting_ratio", name, eq);
        b.bound(is_projector ? "occupation_time_bound" : "commuting_ratio_bound", name,
                1.0 - std::abs(row.r_fm));
      }
      if (kit.commuting && kit.active && std::isfinite(ts.tau_k)) {
        // Purely dissipative trajectory: tau_K/tau_F <= 1.
        b.bound("dissipative_lower", name, 1.0 - ts.tau_k * rate_mag / row.spread);
      }
    }
    if (is_projector) {
      if (std::isfinite(ts.tau_ud)) {
        b.bound("speed_bound", name, 1.0 - 2.0 * ts.tau_ud * rate_mag);
      }
      b.bound("speed_bound_dissipative", name,
              std::isfinite(ts.tau_d) ? 1.0 - 2.0 * ts.tau_d * rate_mag
                                      : (rate_mag == 0.0 ? 1.0 : -kInf),
              !std::isfinite(ts.tau_d) && rate_mag != 0.0);
    }
  };

  for (const auto& obs : observables) {
    detail::require_same_dim(rho.dim(), obs.op.dim(), "inequality_suite");
    add_observable(obs.name, obs.op, obs.is_projector);
  }
  // Entropy snapshot row is always evaluated.
  add_observable("S", kit.s_op, false);

  return rep;
}

double UncertaintyReport::worst_bound_residual() const {
  double worst = kInf;
  for (const auto& r : residuals) {
    if (!r.degenerate && r.kind != CheckKind::Equality) worst = std::min(worst, r.residual);
  }
  return worst;
}

double UncertaintyReport::worst_equality_defect() const {
  double worst = 0.0;
  for (const auto& r : residuals) {
    if (!r.degenerate && r.kind == CheckKind::Equality) {
      worst = std::max(worst, std::abs(r.residual));
    }
  }
  return worst;
}

double TrajectoryReport::worst_bound_residual() const {
  double worst = kInf;
  for (const auto& rep : samples) worst = std::min(worst, rep.worst_bound_residual());
  for (const auto& r : interval_checks) {
    if (!r.degenerate && r.kind != CheckKind::Equality) worst = std::min(worst, r.residual);
  }
  return worst;
}

double TrajectoryReport::worst_equality_defect() const {
  double worst = 0.0;
  for (const auto& rep : samples) worst = std::max(worst, rep.worst_equality_defect());
  return worst;
}

TrajectoryReport trajectory_report(const Trajectory& traj, const SeaModel& model,
                                   const std::vector<NamedObservable>& observables) {
  if (traj.size() < 2) throw ArgumentError("trajectory_report: need at least 2 samples");

  TrajectoryReport out;
  out.times = traj.times;
  out.samples.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out.samples.push_back(inequality_suite(traj.state_at(i), model, observables));
  }

  // Finite-interval arccos bound per energy projector, all sampled pairs via
  // prefix sums of the trapezoidal integral of 1/(2 tau_UD).
  const auto projectors = energy_projectors(model.hamiltonian());
  const std::size_t n = traj.size();

  std::vector<double> inv_two_tau(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double tud = out.samples[i].state.times.tau_ud;
    inv_two_tau[i] = std::isfinite(tud) ? 0.5 / tud : 0.0;
  }
  std::vector<double> prefix(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    prefix[i] = prefix[i - 1] + 0.5 * (inv_two_tau[i] + inv_two_tau[i - 1]) *
                                    std::abs(traj.times[i] - traj.times[i - 1]);
  }

  for (const auto& proj : projectors) {
    std::vector<double> angle(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double p = std::clamp(mean_value(traj.state_at(i), proj.op), 0.0, 1.0);
      angle[i] = std::acos(std::sqrt(p));
    }
    // residual(i,j) = integral(i,j) - |angle_j - angle_i| >= 0 for i < j.
    // With u = prefix - angle and v = prefix + angle the two sign cases are
    // u_j - u_i and v_j - v_i, so the worst pair needs only running maxima.
    double worst = kInf;
    double max_u = -kInf, max_v = -kInf;
    for (std::size_t j = 0; j < n; ++j) {
      const double u = prefix[j] - angle[j];
      const double v = prefix[j] + angle[j];
      if (j > 0) {
        worst = std::min(worst, u - max_u);
        worst = std::min(worst, v - max_v);
      }
      max_u = std::max(max_u, u);
      max_v = std::max(max_v, v);
    }
    out.interval_checks.push_back(
        {"arccos_interval", proj.name, CheckKind::LowerBound, worst, n < 2});
  }
  return out;
}

}  // namespace seaqt
