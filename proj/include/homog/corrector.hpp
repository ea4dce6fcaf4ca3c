#pragma once

#include <Eigen/Dense>

#include "homog/cell.hpp"
#include "homog/dirichlet.hpp"

namespace homog {

// Degree-9 smoothstep (C^4): 0 on t<=0, 1 on t>=1, point-symmetric about
// t = 1/2.
double smoothstep9(double t);

// Boundary cutoff: 1 where dist(x, dD) >= 2 eps, 0 where dist <= eps,
// smoothstep transition in between. Requires eps < |D|/8 so the transition
// stays clear of the midpoint kink of the 1-d distance.
double eval_cutoff(double x, double eps, Interval domain);

// Periodic cubic (Catmull-Rom) interpolation of a torus-grid vector at an
// arbitrary real point (read modulo 1).
double periodic_cubic_interp(const Eigen::VectorXd& values, double point);

// Two-scale corrector expansion: truncated solution u-bar * eta, a gradient
// corrector term, and a zero-order corrector term; v is their exact sum.
struct TwoScaleExpansion {
  Eigen::VectorXd v;
  Eigen::VectorXd truncated;
  Eigen::VectorXd gradient_term;
  Eigen::VectorXd zero_order_term;
};

// Assembles v_eps from the discrete homogenized solution u_bar:
//   v = u_bar_eps + eps * phi(x/eps) * grad(u_bar_eps)
//               + eps^p * psi(x/eps) eta(x) (L-bar u_bar_eps) / k_bar,
// with u_bar_eps = u_bar * eta, p = alpha away from alpha = 1 and p = 1 at
// alpha = 1, and phi replaced by phi_eps for alpha <= 1. Gradients use
// centered differences with zero extension; L-bar uses the homogenized
// matrix; torus correctors are sampled at x/eps by periodic cubic
// interpolation.
TwoScaleExpansion assemble_v_eps(const Eigen::VectorXd& u_bar,
                                 const CellCorrectors& correctors,
                                 double alpha, double eps,
                                 const DomainGrid& grid,
                                 const GeneratorMatrix& homogenized_A);

} // namespace homog
