#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace homog {

// Thrown when panel-doubling refinement fails to reach the requested
// relative tolerance.
struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureSettings {
  int points_per_cell = 8;   // Gauss-Legendre order used on each panel/cell
  double tail_radius = 64.0; // |z| beyond which kernel tails switch to the torus average
  double rel_tol = 1e-10;    // target relative accuracy of refined integrals
};

// Gauss-Legendre nodes/weights on [-1,1], cached per order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_rule(int order);

// Single-panel Gauss-Legendre on [a,b].
double gauss_panel(const std::function<double(double)>& f, double a, double b,
                   int order);

// Composite rule with `panels` equal panels on [a,b].
double gauss_composite(const std::function<double(double)>& f, double a,
                       double b, int order, int panels);

// Panel-doubling refinement: starts from one panel and doubles until two
// successive estimates agree to rel_tol (with a small absolute floor).
// Throws QuadratureError when max_doublings is exhausted.
double integrate_refined(const std::function<double(double)>& f, double a,
                         double b, int order, double rel_tol,
                         int max_doublings = 22);

// Composite Gauss on geometrically graded panels accumulating toward `a`
// (panel edges a + (b-a)*2^{-k}). Suited to integrands with an integrable
// singularity or steep growth at the left endpoint.
double integrate_graded_left(const std::function<double(double)>& f, double a,
                             double b, int order, int levels = 42);

// Same, graded toward the right endpoint b.
double integrate_graded_right(const std::function<double(double)>& f, double a,
                              double b, int order, int levels = 42);

// Tensor-product Gauss-Legendre of f over [0,1]^2 with panel doubling.
double integrate_unit_square(const std::function<double(double, double)>& f,
                             int order, double rel_tol);

} // namespace homog
