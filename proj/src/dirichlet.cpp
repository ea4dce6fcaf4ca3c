#include "homog/dirichlet.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <mutex>

namespace homog {

namespace {

void require_killed(const GeneratorMatrix& A, const char* who) {
  if (A.kind != GeneratorMatrix::Kind::KilledDomain)
    throw std::invalid_argument(std::string(who) +
                                ": need a killed-domain generator");
}

} // namespace

DirichletSolution solve_with_generator(const GeneratorMatrix& A,
                                       const Eigen::VectorXd& h) {
  require_killed(A, "solve_with_generator");
  if (h.size() != A.size())
    throw std::invalid_argument("solve_with_generator: dimension mismatch");

  const auto t0 = std::chrono::steady_clock::now();
  Eigen::MatrixXd neg = -A.entries;
  Eigen::LLT<Eigen::MatrixXd> llt(neg);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "solve_with_generator: Cholesky factorization failed (-A not SPD)");
  const double rc = llt.rcond();
  DirichletSolution sol;
  sol.condition_estimate = rc > 0.0 ? 1.0 / rc : 1e300;
  if (sol.condition_estimate > 1e12)
    throw std::runtime_error(
        "solve_with_generator: condition estimate " +
        std::to_string(sol.condition_estimate) + " exceeds 1e12");
  Eigen::VectorXd u = llt.solve(-h);
  // one refinement pass keeps the residual at the roundoff floor
  u += llt.solve(-h - neg * u);
  sol.u = std::move(u);
  sol.residual = (A.entries * sol.u - h).lpNorm<Eigen::Infinity>();
  sol.factorization_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return sol;
}

DirichletSolution solve_dirichlet(const DirichletProblem& problem) {
  const GeneratorMatrix A =
      assemble_domain_generator(problem.config.kernel, problem.eps,
                                problem.grid, problem.config.alpha,
                                problem.config.quadrature);
  return solve_with_generator(A, problem.rhs);
}

namespace {

// One-sided pieces of  p.v. int (u*(z) - u*(0)) |z|^{-1-alpha} dz  at x = 0,
// split at z = 1. Near z = 0 the substitution z = w^{2/(2-alpha)} flattens
// the ~z^{1-alpha} integrand; near z = 1 graded panels resolve the
// (1-z)^{alpha/2} edge.
double getoor_quadrature_check(double alpha) {
  // expm1/log1p keep (1-z^2)^{alpha/2} - 1 fully accurate near z = 0, where
  // the z^{-1-alpha} factor would amplify naive cancellation noise
  auto diff = [&](double z) {
    return std::expm1(0.5 * alpha * std::log1p(-z * z));
  };
  const double p = 2.0 / (2.0 - alpha);
  auto near0 = [&](double w) {
    const double z = std::pow(w, p);
    return diff(z) * std::pow(z, -1.0 - alpha) * p * std::pow(w, p - 1.0);
  };
  const double w_half = std::pow(0.5, 1.0 / p);
  double inner = integrate_refined(near0, 0.0, w_half, 16, 1e-12);
  inner += integrate_graded_right(
      [&](double z) { return diff(z) * std::pow(z, -1.0 - alpha); }, 0.5, 1.0,
      16);
  const double outer = -1.0 / alpha; // int_1^inf (0 - 1) z^{-1-alpha} dz
  return 2.0 * (inner + outer);
}

double getoor_constant_unit(double alpha) {
  // |Gamma(-alpha/2)| = Gamma(1 - alpha/2) / (alpha/2) for alpha in (0,2)
  const double g = std::tgamma(1.0 + 0.5 * alpha) *
                   std::tgamma(1.0 - 0.5 * alpha) / (0.5 * alpha);
  const double check = getoor_quadrature_check(alpha);
  if (std::fabs(check + g) > 1e-6 * g)
    throw std::runtime_error(
        "getoor_exact_solution: quadrature check failed, closed form " +
        std::to_string(g) + " vs quadrature " + std::to_string(-check));
  return g;
}

std::mutex g_getoor_mutex;
std::map<long long, double> g_getoor_cache; // keyed by alpha*1e12

} // namespace

GetoorSolution getoor_exact_solution(double alpha, double k_bar,
                                     const DomainGrid& grid) {
  classify_alpha(alpha);
  if (std::fabs(grid.interval.a + 1.0) > 1e-12 ||
      std::fabs(grid.interval.b - 1.0) > 1e-12)
    throw std::invalid_argument(
        "getoor_exact_solution: domain must be exactly (-1,1)");
  double unit;
  {
    std::lock_guard<std::mutex> lock(g_getoor_mutex);
    const long long key = llround(alpha * 1e12);
    auto it = g_getoor_cache.find(key);
    if (it == g_getoor_cache.end())
      it = g_getoor_cache.emplace(key, getoor_constant_unit(alpha)).first;
    unit = it->second;
  }
  GetoorSolution sol;
  sol.g_alpha = k_bar * unit;
  sol.u_star.resize(grid.n_interior);
  for (int i = 0; i < grid.n_interior; ++i) {
    const double x = grid.node(i);
    sol.u_star[i] = std::pow(1.0 - x * x, 0.5 * alpha);
  }
  return sol;
}

Eigen::MatrixXd green_matrix(const GeneratorMatrix& A) {
  require_killed(A, "green_matrix");
  Eigen::MatrixXd neg = -A.entries;
  Eigen::LLT<Eigen::MatrixXd> llt(neg);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("green_matrix: factorization failed");
  Eigen::MatrixXd G =
      llt.solve(Eigen::MatrixXd::Identity(A.size(), A.size()));
  G /= A.grid_spacing;
  return G;
}

Eigen::VectorXd expected_exit_time(const GeneratorMatrix& A) {
  require_killed(A, "expected_exit_time");
  Eigen::MatrixXd neg = -A.entries;
  Eigen::LLT<Eigen::MatrixXd> llt(neg);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("expected_exit_time: factorization failed");
  return llt.solve(Eigen::VectorXd::Ones(A.size()));
}

} // namespace homog
