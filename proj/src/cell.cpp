#include "homog/cell.hpp"

#include <cmath>

namespace homog {

Eigen::VectorXd solve_cell_problem(const GeneratorMatrix& A_torus,
                                   const Eigen::VectorXd& rhs,
                                   CellSolveDiagnostics* diag) {
  if (A_torus.kind != GeneratorMatrix::Kind::Torus)
    throw std::invalid_argument("solve_cell_problem: need a torus generator");
  const int n = A_torus.size();
  if (rhs.size() != n)
    throw std::invalid_argument("solve_cell_problem: dimension mismatch");

  // Kernels are O(1) by the ellipticity normalization, so an rhs below 1e-9
  // is quadrature noise around an identically-zero field: the unique
  // mean-zero solution is zero.
  const double rhs_norm = rhs.lpNorm<Eigen::Infinity>();
  if (rhs_norm < 1e-9) {
    if (diag) *diag = {};
    return Eigen::VectorXd::Zero(n);
  }
  const double mean = rhs.mean();
  bool warn = false;
  if (std::fabs(mean) > 1e-9 * rhs_norm) {
    if (std::fabs(mean) > 1e-6 * rhs_norm)
      throw std::invalid_argument(
          "solve_cell_problem: rhs grid mean exceeds solvability tolerance");
    warn = true; // quadrature noise; mean-subtract and continue
  }
  Eigen::VectorXd f = rhs.array() - mean;

  // Bordered system: [A 1; 1^T 0][psi; mu] = [-f; 0].
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n + 1, n + 1);
  B.topLeftCorner(n, n) = A_torus.entries;
  B.topRightCorner(n, 1).setOnes();
  B.bottomLeftCorner(1, n).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  b.head(n) = -f;
  Eigen::VectorXd sol = Eigen::PartialPivLU<Eigen::MatrixXd>(B).solve(b);
  Eigen::VectorXd psi = sol.head(n);
  psi.array() -= psi.mean();

  if (diag) {
    diag->residual = (A_torus.entries * psi + f).lpNorm<Eigen::Infinity>();
    diag->stability_constant = psi.lpNorm<Eigen::Infinity>() / rhs_norm;
    diag->mean_defect_warning = warn;
  }
  return psi;
}

CellCorrectors compute_correctors(const KernelSpec& kernel, double alpha,
                                  const std::vector<double>& eps_list,
                                  const TorusGrid& grid,
                                  const QuadratureSettings& quad,
                                  int image_cutoff) {
  const AlphaRegime regime = classify_alpha(alpha);
  const int n = grid.n_points;
  const GeneratorMatrix A =
      assemble_torus_generator(kernel, grid, alpha, image_cutoff, quad);

  CellCorrectors out;
  out.k_bar = k_bar(kernel, quad);

  Eigen::VectorXd rhs_psi(n);
  for (int i = 0; i < n; ++i)
    rhs_psi[i] = k_bar_of_x(kernel, grid.node(i), quad) - out.k_bar;
  CellSolveDiagnostics diag;
  out.psi = solve_cell_problem(A, rhs_psi, &diag);
  out.residual_psi = diag.residual;
  out.stability_constant = diag.stability_constant;

  {
    double sup_grad = 0.0;
    const double h = grid.spacing();
    for (int i = 0; i < n; ++i) {
      const double d =
          std::fabs(out.psi[(i + 1) % n] - out.psi[i]) / h;
      sup_grad = std::max(sup_grad, d);
    }
    out.psi_grad_norm = sup_grad;
  }

  if (regime == AlphaRegime::Supercritical) {
    Eigen::VectorXd rhs_phi(n);
    for (int i = 0; i < n; ++i)
      rhs_phi[i] = drift_F(kernel, alpha, grid.node(i), quad);
    out.phi = solve_cell_problem(A, rhs_phi, &diag);
    out.residual_phi = diag.residual;
    out.stability_constant = std::max(out.stability_constant, diag.stability_constant);
  } else {
    if (eps_list.empty())
      throw std::invalid_argument(
          "compute_correctors: alpha <= 1 needs at least one eps for phi_eps");
    for (double eps : eps_list) {
      Eigen::VectorXd rhs_eps(n);
      for (int i = 0; i < n; ++i)
        rhs_eps[i] = drift_F_eps(kernel, alpha, eps, grid.node(i), quad);
      Eigen::VectorXd phi_eps = solve_cell_problem(A, rhs_eps, &diag);
      out.residual_phi = std::max(out.residual_phi, diag.residual);
      out.stability_constant =
          std::max(out.stability_constant, diag.stability_constant);
      out.phi_eps.emplace_back(eps, std::move(phi_eps));
    }
  }
  return out;
}

Eigen::VectorXd semigroup_oracle(const GeneratorMatrix& A_torus,
                                 const Eigen::VectorXd& rhs, double horizon,
                                 double dt, double* decay_out) {
  if (A_torus.kind != GeneratorMatrix::Kind::Torus)
    throw std::invalid_argument("semigroup_oracle: need a torus generator");
  const int n = A_torus.size();
  if (rhs.size() != n)
    throw std::invalid_argument("semigroup_oracle: dimension mismatch");
  if (!(horizon > 0.0 && dt > 0.0 && dt < horizon))
    throw std::invalid_argument("semigroup_oracle: need 0 < dt < horizon");

  Eigen::MatrixXd stepper =
      Eigen::MatrixXd::Identity(n, n) - dt * A_torus.entries;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(stepper);

  const int n_steps = static_cast<int>(std::llround(horizon / dt));
  const double floor = 1e-13 * rhs.lpNorm<Eigen::Infinity>();
  Eigen::VectorXd v = rhs;
  Eigen::VectorXd integral = Eigen::VectorXd::Zero(n);
  double prev_norm = v.lpNorm<Eigen::Infinity>();
  int growth_streak = 0;
  for (int k = 0; k < n_steps; ++k) {
    v = lu.solve(v);
    integral += dt * v;
    const double norm = v.lpNorm<Eigen::Infinity>();
    // ulp wiggles at the roundoff floor are not growth
    growth_streak = (norm > prev_norm && norm > floor) ? growth_streak + 1 : 0;
    if (growth_streak >= 10)
      throw std::runtime_error(
          "semigroup_oracle: iterate norm grew 10 consecutive steps; the "
          "generator does not contract mean-zero data");
    prev_norm = norm;
  }
  if (decay_out) *decay_out = prev_norm;
  integral.array() -= integral.mean();
  return integral;
}

} // namespace homog
