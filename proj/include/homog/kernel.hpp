#pragma once

#include <functional>
#include <string>
#include <vector>

#include "homog/quadrature.hpp"
#include "homog/types.hpp"

namespace homog {

// Periodic symmetric jump kernel on the torus product. `evaluate` is read on
// the 1-periodic extension; callers may pass any real arguments.
struct KernelSpec {
  std::function<double(double, double)> evaluate;
  double lambda_bound = 1.0; // ellipticity constant: 1/lambda <= K <= lambda
  std::string name;
  int smoothness_order = 4;
};

struct ProblemConfig {
  double alpha = 1.5;
  int dimension = 1;
  KernelSpec kernel;
  Interval domain;
  QuadratureSettings quadrature;
};

// One Fourier term of a user kernel: amp/2 * (cos(2pi j x) cos(2pi k y)
//                                           + cos(2pi k x) cos(2pi j y)).
// The symmetrization makes every term a valid symmetric kernel component.
struct FourierTerm {
  int j = 0;
  int k = 0;
  double amp = 0.0;
};

KernelSpec constant_kernel();
KernelSpec additive_cosine_kernel(); // 1 + 0.3(cos 2pi x + cos 2pi y)
KernelSpec product_cosine_kernel();  // 1 + 0.25 cos 2pi x cos 2pi y
KernelSpec fourier_kernel(const std::vector<FourierTerm>& terms,
                          const std::string& name = "fourier");

struct ValidationReport {
  double max_symmetry_defect = 0.0;
  double max_periodicity_defect = 0.0;
  double k_min = 0.0;
  double k_max = 0.0;
  int n_samples = 0;
  bool pass = false;
};

// Checks symmetry, double 1-periodicity and the ellipticity window over a
// deterministic low-discrepancy sample of the unit square. Always returns a
// report; the verdict is in `pass`.
ValidationReport validate_kernel(const KernelSpec& spec, int n_samples,
                                 double tol);

// Double torus average of the kernel (the homogenized constant).
double k_bar(const KernelSpec& spec, const QuadratureSettings& quad = {});

// One-variable torus average y -> K(x,y).
double k_bar_of_x(const KernelSpec& spec, double x,
                  const QuadratureSettings& quad = {});

// Drift corrector data for alpha in (1,2):
//   F(x) = int_0^inf (K(x,x+z) - K(x,x-z)) z^{-alpha} dz,
// the symmetrized principal value. Beyond quad.tail_radius the kernel is
// replaced by its torus average, which kills the integrand; the committed
// remainder is O(tail_radius^{-alpha}) times the oscillation amplitude.
double drift_F(const KernelSpec& spec, double alpha, double x,
               const QuadratureSettings& quad = {});

// Truncated drift for alpha in (0,1]:
//   F_eps(x) = int_0^{1/eps} (K(x,x+z) - K(x,x-z)) z^{-alpha} dz.
// The truncation at 1/eps is exact (no tail approximation).
double drift_F_eps(const KernelSpec& spec, double alpha, double eps, double x,
                   const QuadratureSettings& quad = {});

} // namespace homog
