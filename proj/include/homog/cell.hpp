#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "homog/discretize.hpp"

namespace homog {

// Correctors on the torus grid. psi exists for every alpha; phi only for
// alpha in (1,2); phi_eps (one vector per requested eps) only for
// alpha in (0,1].
struct CellCorrectors {
  Eigen::VectorXd psi;
  std::optional<Eigen::VectorXd> phi;
  std::vector<std::pair<double, Eigen::VectorXd>> phi_eps;
  double k_bar = 0.0;
  double residual_psi = 0.0;
  double residual_phi = 0.0; // max over phi / phi_eps solves
  double stability_constant = 0.0; // max ||corrector||_inf / ||rhs||_inf
  double psi_grad_norm = 0.0; // finite-difference sup of |psi'|, logged only
};

struct CellSolveDiagnostics {
  double residual = 0.0;           // ||A psi + rhs||_inf
  double stability_constant = 0.0; // ||psi||_inf / ||rhs||_inf
  bool mean_defect_warning = false;
};

// Unique mean-zero solution of A psi = -rhs on the torus, via the bordered
// system that replaces the rank deficiency with the mean constraint. The rhs
// must have (near-)zero grid mean: defects above 1e-9*||rhs||_inf but below
// 1e-6 are subtracted with a warning flag, larger ones are rejected.
Eigen::VectorXd solve_cell_problem(const GeneratorMatrix& A_torus,
                                   const Eigen::VectorXd& rhs,
                                   CellSolveDiagnostics* diag = nullptr);

// Builds the right-hand sides (K-bar(x) - K-bar, F, F_eps) on the torus grid
// and solves all cell problems applicable to the alpha regime.
CellCorrectors compute_correctors(const KernelSpec& kernel, double alpha,
                                  const std::vector<double>& eps_list,
                                  const TorusGrid& grid,
                                  const QuadratureSettings& quad = {},
                                  int image_cutoff = 64);

// Independent oracle for solve_cell_problem: approximates
// int_0^T e^{tA} rhs dt by implicit Euler and subtracts the grid mean. The
// spectral gap makes the horizon truncation exponentially small. Aborts if
// the iterate norm grows for 10 consecutive steps (broken generator).
// decay_out, when given, receives ||e^{TA} rhs||_inf.
Eigen::VectorXd semigroup_oracle(const GeneratorMatrix& A_torus,
                                 const Eigen::VectorXd& rhs, double horizon,
                                 double dt, double* decay_out = nullptr);

} // namespace homog
