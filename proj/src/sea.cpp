#include "seaqt/sea.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace seaqt {

namespace {

constexpr double kGramConditionLimit = 1e12;

/// Gaussian elimination with partial pivoting on a small dense system.
/// Determinism matters more than asymptotics at this size.
std::vector<double> solve_small(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (a[piv][col] == 0.0) {
      throw DegenerateGeneratorsError("constraint system is exactly singular");
    }
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  return x;
}

}  // namespace

SeaModel::SeaModel(HermitianOperator hamiltonian, std::vector<HermitianOperator> generators,
                   UnitSystem units, TauPolicy tau)
    : h_(std::move(hamiltonian)), n_(std::move(generators)), units_(units), tau_(tau) {
  units_.validate();
  const double hscale = std::max(1.0, h_.frobenius_norm());
  for (std::size_t i = 0; i < n_.size(); ++i) {
    detail::require_same_dim(h_.dim(), n_[i].dim(), "SeaModel");
    const Matrix comm = h_.matrix() * n_[i].matrix() - n_[i].matrix() * h_.matrix();
    const double scale = hscale * std::max(1.0, n_[i].frobenius_norm());
    if (comm.norm() > 1e-10 * scale) {
      throw ArgumentError("SeaModel: generator " + std::to_string(i) +
                          " does not commute with H (non-Hamiltonian generators must)");
    }
  }
}

bool SeaModel::commutes_with_hamiltonian(const DensityOperator& rho) const {
  const Matrix comm = h_.matrix() * rho.matrix() - rho.matrix() * h_.matrix();
  return comm.norm() <= 1e-12 * std::max(1.0, h_.frobenius_norm());
}

MassieuCoefficients massieu_coefficients(const DensityOperator& rho, const SeaModel& model) {
  detail::require_same_dim(rho.dim(), model.dim(), "massieu_coefficients");
  const UnitSystem& u = model.units();
  const std::size_t r = model.generators().size();
  const std::size_t n = 1 + r;

  const HermitianOperator s_op = entropy_operator(rho, u);
  const HermitianOperator& h = model.hamiltonian();

  MassieuCoefficients out{.theta = 0.0,
                          .nu = std::vector<double>(r, 0.0),
                          .projection = std::vector<double>(n, 0.0),
                          .delta_m = HermitianOperator::zero(rho.dim())};
  out.mean_h = mean_value(rho, h);
  out.mean_s = mean_value(rho, s_op);
  out.cov_hh = covariance(rho, h, h);
  out.cov_ss = covariance(rho, s_op, s_op);
  out.cov_sh = covariance(rho, s_op, h);

  const HermitianOperator ds = center(s_op, rho);

  // States whose sqrt(rho)dS vanishes (pure states, uniform occupation of the
  // support) have no entropy gradient to project: dM carries no dissipative
  // content and the Gram solve is skipped entirely. The threshold is scaled
  // by kB^2 and the entropy magnitude.
  const double ss_floor = 1e-24 * u.kB * u.kB * std::max(1.0, out.mean_s * out.mean_s / (u.kB * u.kB));
  if (out.cov_ss <= ss_floor) {
    out.delta_m = ds;
    out.cov_mm = 0.0;
    out.cov_pp = 0.0;
    out.theta = std::numeric_limits<double>::infinity();
    return out;
  }

  // Gram matrix of the constraint directions and right-hand side Cov(.,S).
  std::vector<std::vector<double>> gram(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n, 0.0);
  gram[0][0] = out.cov_hh;
  rhs[0] = out.cov_sh;
  for (std::size_t i = 0; i < r; ++i) {
    const HermitianOperator& ni = model.generators()[i];
    gram[0][i + 1] = gram[i + 1][0] = covariance(rho, h, ni);
    rhs[i + 1] = covariance(rho, s_op, ni);
    for (std::size_t j = i; j < r; ++j) {
      gram[i + 1][j + 1] = gram[j + 1][i + 1] = covariance(rho, ni, model.generators()[j]);
    }
  }

  // Condition check on the (symmetric PSD) Gram matrix.
  Eigen::MatrixXd g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = gram[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ges(g);
  const double gmax = ges.eigenvalues().maxCoeff();
  const double gmin = ges.eigenvalues().minCoeff();
  if (!(gmin > 0.0) || gmax / gmin > kGramConditionLimit) {
    throw DegenerateGeneratorsError(
        "massieu_coefficients: Gram matrix of (sqrt(rho)dH, sqrt(rho)dN_i) is singular or "
        "ill-conditioned (condition " +
        std::to_string(gmin > 0.0 ? gmax / gmin : std::numeric_limits<double>::infinity()) +
        "); constraint directions are linearly dependent");
  }

  out.projection = solve_small(gram, rhs);
  const double a0 = out.projection[0];

  if (a0 == 0.0 && r == 0) {
    out.theta = std::numeric_limits<double>::infinity();
  } else if (a0 == 0.0) {
    out.theta = std::numeric_limits<double>::infinity();
    // nu undefined at theta = inf; dM is still well defined through projection.
  } else {
    out.theta = 1.0 / a0;
  }
  if (out.theta == 0.0 || std::isnan(out.theta)) {
    throw SingularTemperatureError("massieu_coefficients: theta = 0 solution");
  }
  for (std::size_t i = 0; i < r; ++i) {
    out.nu[i] = std::isfinite(out.theta) ? -out.projection[i + 1] * out.theta : 0.0;
  }

  // dM = dS - a0 dH - sum a_i dN_i ; the projected part P = dS - dM.
  HermitianOperator proj = center(h, rho) * a0;
  for (std::size_t i = 0; i < r; ++i) {
    proj = proj + center(model.generators()[i], rho) * out.projection[i + 1];
  }
  out.delta_m = ds - proj;
  out.cov_mm = covariance(rho, out.delta_m, out.delta_m);
  out.cov_pp = covariance(rho, proj, proj);
  return out;
}

double dissipation_time([[maybe_unused]] const DensityOperator& rho, const SeaModel& model,
                        const MassieuCoefficients& coeffs) {
  const UnitSystem& u = model.units();
  switch (model.tau_policy().kind) {
    case TauPolicy::Kind::Constant:
      return model.tau_policy().tau0;
    case TauPolicy::Kind::AdaptiveEquality: {
      if (!(coeffs.cov_hh > 0.0)) {
        throw DegenerateSpreadError(
            "dissipation_time: AdaptiveEquality needs Delta_H > 0 (state commutes trivially)");
      }
      const double dm = std::sqrt(std::max(coeffs.cov_mm, 0.0));
      const double ds = std::sqrt(std::max(coeffs.cov_ss, 0.0));
      if (dm < kNondissipativeCutoff * ds) return 0.0;
      return 0.5 * u.hbar / u.kB * dm / std::sqrt(coeffs.cov_hh);
    }
  }
  throw ArgumentError("dissipation_time: unknown tau policy");
}

Matrix sea_dissipator(const DensityOperator& rho, const SeaModel& model,
                      const MassieuCoefficients& coeffs) {
  const UnitSystem& u = model.units();
  const double dm = std::sqrt(std::max(coeffs.cov_mm, 0.0));
  const double ds = std::sqrt(std::max(coeffs.cov_ss, 0.0));
  if (dm < kNondissipativeCutoff * std::max(ds, 1e-300)) {
    return Matrix::Zero(rho.dim(), rho.dim());
  }

  const Matrix anticomm = coeffs.delta_m.matrix() * rho.matrix() +
                          rho.matrix() * coeffs.delta_m.matrix();
  if (model.tau_policy().kind == TauPolicy::Kind::AdaptiveEquality) {
    // 1/(2 kB tau) = Delta_H / (hbar Delta_M); the 0/0 at nondissipative
    // states is resolved by the cutoff above.
    if (!(coeffs.cov_hh > 0.0)) {
      throw DegenerateSpreadError("sea_dissipator: AdaptiveEquality needs Delta_H > 0");
    }
    return anticomm * (std::sqrt(coeffs.cov_hh) / (u.hbar * dm));
  }
  const double tau = model.tau_policy().tau0;
  return anticomm / (2.0 * u.kB * tau);
}

Matrix sea_dissipator(const DensityOperator& rho, const SeaModel& model) {
  return sea_dissipator(rho, model, massieu_coefficients(rho, model));
}

}  // namespace seaqt
