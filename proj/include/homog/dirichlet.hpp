#pragma once

#include <Eigen/Dense>
#include <optional>

#include "homog/cell.hpp"
#include "homog/discretize.hpp"

namespace homog {

// Dirichlet problem A u = h on the interior grid with zero exterior data.
// eps = none selects the homogenized problem (constant kernel k_bar).
struct DirichletProblem {
  ProblemConfig config;
  std::optional<double> eps;
  DomainGrid grid;
  Eigen::VectorXd rhs;
};

struct DirichletSolution {
  Eigen::VectorXd u;
  double residual = 0.0;           // ||A u - h||_inf
  double condition_estimate = 0.0; // 1 / rcond of the factorization
  double factorization_seconds = 0.0;
};

// Direct dense solve of A u = h for an already-assembled killed generator.
// Performs one iterative-refinement pass; aborts when the condition estimate
// exceeds 1e12.
DirichletSolution solve_with_generator(const GeneratorMatrix& A,
                                       const Eigen::VectorXd& h);

// Assembles the generator for `problem` (resolution guard enforced by the
// assembly) and solves.
DirichletSolution solve_dirichlet(const DirichletProblem& problem);

// Closed-form oracle on D = (-1,1): u*(x) = (1-x^2)^{alpha/2} solves
// L-bar u* = -g_alpha with g_alpha = k_bar * Gamma(1+alpha/2) * |Gamma(-alpha/2)|.
// The constant is confirmed once per alpha against a direct quadrature of
// the generator applied to u* at x = 0 (6 significant digits) before use.
struct GetoorSolution {
  Eigen::VectorXd u_star;
  double g_alpha = 0.0;
};
GetoorSolution getoor_exact_solution(double alpha, double k_bar,
                                     const DomainGrid& grid);

// Discrete Green operator (-A)^{-1} scaled to a density: row i approximates
// G(x_i, .), so grid_spacing * (G h)_i reproduces the solve.
Eigen::MatrixXd green_matrix(const GeneratorMatrix& A);

// Solves (-A) t = 1; the expected exit time of the killed chain.
Eigen::VectorXd expected_exit_time(const GeneratorMatrix& A);

} // namespace homog
