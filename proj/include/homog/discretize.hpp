#pragma once

#include <Eigen/Dense>
#include <optional>

#include "homog/grid.hpp"
#include "homog/kernel.hpp"

namespace homog {

// Dense discretization of a nonlocal generator. Torus kind is conservative
// (zero row sums); killed-domain kind carries per-node killing rates from
// the exterior integral, so row i sums to -killing_rates[i].
struct GeneratorMatrix {
  enum class Kind { Torus, KilledDomain };
  Eigen::MatrixXd entries;
  Kind kind = Kind::Torus;
  double alpha = 0.0;
  std::optional<double> eps; // absent for torus and homogenized kinds
  Eigen::VectorXd killing_rates;
  bool symmetrized = false;
  double grid_spacing = 0.0;
  Eigen::VectorXd nodes;

  int size() const { return static_cast<int>(entries.rows()); }
};

// Integral of the jump density K(x/eps, y/eps) / |y-x|^{1+alpha} over a cell
// not containing the source node. eps = none means the constant homogenized
// kernel value k_bar(kernel).
double cell_jump_intensity(double source_node, Interval target_cell,
                           const KernelSpec& kernel,
                           std::optional<double> eps, double alpha,
                           const QuadratureSettings& quad = {});

// Exterior integral int_{y not in D} K(x/eps, y/eps)/|y-x|^{1+alpha} dy for x
// strictly inside the domain; quadrature out to quad.tail_radius from x, then
// an analytic power-law tail with the torus-averaged kernel.
double killing_rate(double x, const KernelSpec& kernel,
                    std::optional<double> eps, double alpha, Interval domain,
                    const QuadratureSettings& quad = {});

// Conservative generator of the unscaled kernel K on the torus grid. Every
// off-diagonal entry sums explicit periodic images |m| <= image_cutoff of the
// target cell; the remaining images use the torus-averaged kernel and a
// lattice (Hurwitz zeta) closed form. The matrix is symmetrized and the
// diagonal rebuilt afterwards, so zero row sums and exact symmetry hold
// simultaneously.
GeneratorMatrix assemble_torus_generator(const KernelSpec& kernel,
                                         const TorusGrid& grid, double alpha,
                                         int image_cutoff = 64,
                                         const QuadratureSettings& quad = {});

// Killed-domain generator on the interior nodes of `grid` with zero exterior
// condition. Off-diagonals are cell integrals, the diagonal carries the
// negative row sum plus the killing rate. With eps given, requires the
// resolution guard h <= eps/4.
GeneratorMatrix assemble_domain_generator(const KernelSpec& kernel,
                                          std::optional<double> eps,
                                          const DomainGrid& grid, double alpha,
                                          const QuadratureSettings& quad = {});

// Discrete Dirichlet form -h <f, A f> (nonnegative for both kinds).
double quadratic_form(const GeneratorMatrix& A, const Eigen::VectorXd& f);

// Dense matrix-vector product A f.
Eigen::VectorXd apply_generator(const GeneratorMatrix& A,
                                const Eigen::VectorXd& f);

} // namespace homog
