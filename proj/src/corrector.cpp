#include "homog/corrector.hpp"

#include <cmath>

namespace homog {

double smoothstep9(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return ((((70.0 * t - 315.0) * t + 540.0) * t - 420.0) * t + 126.0) * t * t *
         t * t * t;
}

double eval_cutoff(double x, double eps, Interval domain) {
  if (!(eps > 0.0 && eps < domain.length() / 8.0))
    throw std::invalid_argument(
        "eval_cutoff: need 0 < eps < |D|/8 for a well-separated transition");
  const double dist = std::min(x - domain.a, domain.b - x);
  if (dist <= eps) return 0.0;
  if (dist >= 2.0 * eps) return 1.0;
  return smoothstep9((dist - eps) / eps);
}

double periodic_cubic_interp(const Eigen::VectorXd& values, double point) {
  const int n = static_cast<int>(values.size());
  if (n < 4)
    throw std::invalid_argument("periodic_cubic_interp: need >= 4 nodes");
  double u = point - std::floor(point);
  double s = u * n;
  int i = static_cast<int>(std::floor(s));
  if (i >= n) i -= n;
  const double t = s - i;
  auto at = [&](int k) { return values[((i + k) % n + n) % n]; };
  const double f0 = at(-1), f1 = at(0), f2 = at(1), f3 = at(2);
  return 0.5 * (2.0 * f1 + t * (f2 - f0) +
                t * t * (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) +
                t * t * t * (3.0 * f1 - f0 - 3.0 * f2 + f3));
}

TwoScaleExpansion assemble_v_eps(const Eigen::VectorXd& u_bar,
                                 const CellCorrectors& correctors,
                                 double alpha, double eps,
                                 const DomainGrid& grid,
                                 const GeneratorMatrix& homogenized_A) {
  const AlphaRegime regime = classify_alpha(alpha);
  const int n = grid.n_interior;
  if (u_bar.size() != n || homogenized_A.size() != n)
    throw std::invalid_argument("assemble_v_eps: grid mismatch");
  if (homogenized_A.kind != GeneratorMatrix::Kind::KilledDomain)
    throw std::invalid_argument(
        "assemble_v_eps: homogenized matrix must be killed-domain kind");

  const Eigen::VectorXd* grad_corrector = nullptr;
  if (regime == AlphaRegime::Supercritical) {
    if (!correctors.phi)
      throw std::invalid_argument(
          "assemble_v_eps: alpha > 1 needs the phi corrector");
    grad_corrector = &*correctors.phi;
  } else {
    for (const auto& [e, vec] : correctors.phi_eps)
      if (std::fabs(e - eps) <= 1e-12 * eps) {
        grad_corrector = &vec;
        break;
      }
    if (!grad_corrector)
      throw std::invalid_argument(
          "assemble_v_eps: no phi_eps stored for the requested eps");
  }

  const double h = grid.spacing();
  TwoScaleExpansion out;
  out.truncated.resize(n);
  Eigen::VectorXd eta(n);
  for (int i = 0; i < n; ++i) {
    eta[i] = eval_cutoff(grid.node(i), eps, grid.interval);
    out.truncated[i] = u_bar[i] * eta[i];
  }

  // centered differences of the truncated solution, zero exterior extension
  Eigen::VectorXd grad(n);
  for (int i = 0; i < n; ++i) {
    const double up = i + 1 < n ? out.truncated[i + 1] : 0.0;
    const double dn = i - 1 >= 0 ? out.truncated[i - 1] : 0.0;
    grad[i] = (up - dn) / (2.0 * h);
  }
  const Eigen::VectorXd lbar = apply_generator(homogenized_A, out.truncated);

  const double zero_order_power =
      regime == AlphaRegime::Critical ? 1.0 : alpha;
  const double eps_p = std::pow(eps, zero_order_power);
  out.gradient_term.resize(n);
  out.zero_order_term.resize(n);
  for (int i = 0; i < n; ++i) {
    const double y = grid.node(i) / eps;
    out.gradient_term[i] =
        eps * periodic_cubic_interp(*grad_corrector, y) * grad[i];
    out.zero_order_term[i] = eps_p / correctors.k_bar *
                             periodic_cubic_interp(correctors.psi, y) *
                             eta[i] * lbar[i];
  }
  out.v = out.truncated + out.gradient_term + out.zero_order_term;
  return out;
}

} // namespace homog
