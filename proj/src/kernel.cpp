#include "homog/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace homog {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

KernelSpec constant_kernel() {
  KernelSpec spec;
  spec.evaluate = [](double, double) { return 1.0; };
  spec.lambda_bound = 1.0;
  spec.name = "constant";
  spec.smoothness_order = 4;
  return spec;
}

KernelSpec additive_cosine_kernel() {
  KernelSpec spec;
  spec.evaluate = [](double x, double y) {
    return 1.0 + 0.3 * (std::cos(kTwoPi * x) + std::cos(kTwoPi * y));
  };
  // range [0.4, 1.6], so the binding bound is 1/0.4
  spec.lambda_bound = 2.5;
  spec.name = "additive-cosine";
  spec.smoothness_order = 4;
  return spec;
}

KernelSpec product_cosine_kernel() {
  KernelSpec spec;
  spec.evaluate = [](double x, double y) {
    return 1.0 + 0.25 * std::cos(kTwoPi * x) * std::cos(kTwoPi * y);
  };
  spec.lambda_bound = 4.0 / 3.0;
  spec.name = "product-cosine";
  spec.smoothness_order = 4;
  return spec;
}

KernelSpec fourier_kernel(const std::vector<FourierTerm>& terms,
                          const std::string& name) {
  double constant = 0.0;
  double osc_sum = 0.0;
  for (const auto& t : terms) {
    if (t.j == 0 && t.k == 0)
      constant += t.amp;
    else
      osc_sum += std::fabs(t.amp);
  }
  const double lo = constant - osc_sum;
  const double hi = constant + osc_sum;
  if (lo <= 0.0)
    throw std::invalid_argument(
        "fourier_kernel: coefficient budget allows K <= 0 (need sum of "
        "oscillating |amp| < constant term)");
  KernelSpec spec;
  auto terms_copy = terms;
  spec.evaluate = [terms_copy](double x, double y) {
    double v = 0.0;
    for (const auto& t : terms_copy) {
      v += 0.5 * t.amp *
           (std::cos(kTwoPi * t.j * x) * std::cos(kTwoPi * t.k * y) +
            std::cos(kTwoPi * t.k * x) * std::cos(kTwoPi * t.j * y));
    }
    return v;
  };
  spec.lambda_bound = std::max(hi, 1.0 / lo);
  spec.name = name;
  spec.smoothness_order = 4;
  return spec;
}

ValidationReport validate_kernel(const KernelSpec& spec, int n_samples,
                                 double tol) {
  if (n_samples < 16)
    throw std::invalid_argument("validate_kernel: n_samples must be >= 16");
  ValidationReport rep;
  rep.n_samples = n_samples;
  rep.k_min = std::numeric_limits<double>::infinity();
  rep.k_max = -std::numeric_limits<double>::infinity();
  // R2 Kronecker sequence: deterministic, well spread over the unit square.
  const double a1 = 0.7548776662466927;
  const double a2 = 0.5698402909980532;
  double sx = 0.5, sy = 0.5;
  for (int i = 0; i < n_samples; ++i) {
    sx += a1;
    sy += a2;
    const double x = sx - std::floor(sx);
    const double y = sy - std::floor(sy);
    const double v = spec.evaluate(x, y);
    rep.k_min = std::min(rep.k_min, v);
    rep.k_max = std::max(rep.k_max, v);
    rep.max_symmetry_defect =
        std::max(rep.max_symmetry_defect, std::fabs(v - spec.evaluate(y, x)));
    rep.max_periodicity_defect =
        std::max({rep.max_periodicity_defect,
                  std::fabs(spec.evaluate(x + 1.0, y) - v),
                  std::fabs(spec.evaluate(x, y + 1.0) - v)});
  }
  const double lam = spec.lambda_bound;
  rep.pass = rep.max_symmetry_defect <= tol &&
             rep.max_periodicity_defect <= tol &&
             rep.k_min >= 1.0 / lam - tol && rep.k_max <= lam + tol;
  return rep;
}

double k_bar(const KernelSpec& spec, const QuadratureSettings& quad) {
  return integrate_unit_square(spec.evaluate, quad.points_per_cell,
                               quad.rel_tol);
}

double k_bar_of_x(const KernelSpec& spec, double x,
                  const QuadratureSettings& quad) {
  return integrate_refined([&](double y) { return spec.evaluate(x, y); }, 0.0,
                           1.0, quad.points_per_cell, quad.rel_tol);
}

namespace {

// int_0^upper (K(x,x+z)-K(x,x-z)) z^{-alpha} dz. The difference is odd in z
// and vanishes linearly, so the integrand is ~ z^{1-alpha}. Sampling the
// difference at tiny z hits cancellation noise that the z^{-alpha} factor
// amplifies; below z_cut the head is integrated analytically from a fitted
// odd Taylor model c1 z + c3 z^3 instead. On [z_cut, 1] the substitution
// z = w^p, p = 2/(2-alpha), flattens the fractional power; the remaining
// piece over [1, upper] oscillates with period 1 and is resolved by panel
// doubling.
double symmetrized_drift_integral(const KernelSpec& spec, double alpha,
                                  double x, double upper,
                                  const QuadratureSettings& quad) {
  auto diff = [&](double z) {
    return spec.evaluate(x, x + z) - spec.evaluate(x, x - z);
  };
  const double z_cut = 1e-3;
  const double z2 = 2e-3;
  const double r1 = diff(z_cut) / z_cut;
  const double r2 = diff(z2) / z2;
  const double c3 = (r2 - r1) / (z2 * z2 - z_cut * z_cut);
  const double c1 = r1 - c3 * z_cut * z_cut;
  double value = c1 * std::pow(z_cut, 2.0 - alpha) / (2.0 - alpha) +
                 c3 * std::pow(z_cut, 4.0 - alpha) / (4.0 - alpha);

  const double p = 2.0 / (2.0 - alpha);
  const double z_split = std::min(1.0, upper);
  const double w_split = std::pow(z_split, 1.0 / p);
  const double w_cut = std::pow(z_cut, 1.0 / p);
  auto near_part = [&](double w) {
    const double z = std::pow(w, p);
    return diff(z) * std::pow(z, -alpha) * p * std::pow(w, p - 1.0);
  };
  value += integrate_refined(near_part, w_cut, w_split, quad.points_per_cell,
                             quad.rel_tol);
  if (upper > 1.0) {
    auto far_part = [&](double z) { return diff(z) * std::pow(z, -alpha); };
    // one panel per unit period as the starting resolution
    const int base = std::max(1, static_cast<int>(std::ceil(upper - 1.0)));
    double prev = gauss_composite(far_part, 1.0, upper, quad.points_per_cell, base);
    double cur = prev;
    for (int panels = 2 * base; panels <= (1 << 22); panels *= 2) {
      cur = gauss_composite(far_part, 1.0, upper, quad.points_per_cell, panels);
      double scale = std::max(std::fabs(cur), std::fabs(prev));
      if (std::fabs(cur - prev) <= quad.rel_tol * scale + 1e-14) break;
      prev = cur;
    }
    value += cur;
  }
  return value;
}

} // namespace

double drift_F(const KernelSpec& spec, double alpha, double x,
               const QuadratureSettings& quad) {
  if (!(alpha > 1.0 && alpha < 2.0))
    throw std::invalid_argument("drift_F requires alpha in (1,2)");
  if (spec.smoothness_order < 1)
    throw std::invalid_argument("drift_F requires smoothness_order >= 1");
  return symmetrized_drift_integral(spec, alpha, x, quad.tail_radius, quad);
}

double drift_F_eps(const KernelSpec& spec, double alpha, double eps, double x,
                   const QuadratureSettings& quad) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("drift_F_eps requires alpha in (0,1]");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("drift_F_eps requires eps in (0,1)");
  return symmetrized_drift_integral(spec, alpha, x, 1.0 / eps, quad);
}

} // namespace homog
