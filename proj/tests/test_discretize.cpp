#include <Eigen/Eigenvalues>
#include <cmath>

#include "doctest.h"
#include "homog/discretize.hpp"

using namespace homog;

namespace {

// brute-force Riemann oracle for one cell integral
double cell_brute_force(const KernelSpec& spec, double eps, double alpha,
                        double source, double lo, double hi, long points) {
  const double h = (hi - lo) / points;
  double sum = 0.0;
  for (long k = 0; k < points; ++k) {
    const double y = lo + (k + 0.5) * h;
    sum += spec.evaluate(source / eps, y / eps) /
           std::pow(std::fabs(y - source), 1.0 + alpha);
  }
  return sum * h;
}

} // namespace

TEST_CASE("cell_jump_intensity closed forms and oracle") {
  const KernelSpec one = constant_kernel();
  SUBCASE("K=1, alpha=1, cell (1,2): int z^-2 = 1/2") {
    CHECK(cell_jump_intensity(0.0, {1.0, 2.0}, one, 1.0, 1.0) ==
          doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("K=1, alpha=0.5, cell (1,4): int z^-1.5 = 1") {
    CHECK(cell_jump_intensity(0.0, {1.0, 4.0}, one, 1.0, 0.5) ==
          doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("oscillating kernel vs 1e6-point Riemann sum") {
    const KernelSpec add = additive_cosine_kernel();
    const double val = cell_jump_intensity(0.0, {0.5, 0.75}, add, 0.25, 1.5);
    const double oracle = cell_brute_force(add, 0.25, 1.5, 0.0, 0.5, 0.75,
                                           1'000'000);
    CHECK(val == doctest::Approx(oracle).epsilon(1e-6));
  }
  SUBCASE("eps=none uses the constant homogenized kernel") {
    CHECK(cell_jump_intensity(0.0, {1.0, 2.0}, additive_cosine_kernel(),
                              std::nullopt, 1.0) ==
          doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("cell containing the source is rejected") {
    CHECK_THROWS_AS(cell_jump_intensity(1.5, {1.0, 2.0}, one, 1.0, 1.0),
                    std::invalid_argument);
  }
  SUBCASE("monotone decreasing with distance for the constant kernel") {
    double prev = cell_jump_intensity(0.0, {1.0, 1.25}, one, 1.0, 1.5);
    for (double lo : {2.0, 4.0, 8.0}) {
      const double cur =
          cell_jump_intensity(0.0, {lo, lo + 0.25}, one, 1.0, 1.5);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("killing_rate closed forms") {
  const KernelSpec one = constant_kernel();
  const Interval D{-1.0, 1.0};
  SUBCASE("K=1, alpha=1, x=0: 2 * int_1^inf z^-2 = 2") {
    CHECK(killing_rate(0.0, one, std::nullopt, 1.0, D) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(killing_rate(0.0, one, 1.0, 1.0, D) ==
          doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("K=1, alpha=0.5, x=0: 4") {
    CHECK(killing_rate(0.0, one, std::nullopt, 0.5, D) ==
          doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("K=1, alpha=1, x=0.9: 1/0.1 + 1/1.9") {
    const double expected = 10.0 + 1.0 / 1.9;
    CHECK(killing_rate(0.9, one, std::nullopt, 1.0, D) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(killing_rate(0.9, one, 1.0, 1.0, D) ==
          doctest::Approx(expected).epsilon(1e-9));
  }
  SUBCASE("blows up like dist^-alpha toward the boundary") {
    const double near = killing_rate(0.999, one, std::nullopt, 1.5, D);
    const double nearer = killing_rate(0.9999, one, std::nullopt, 1.5, D);
    CHECK(nearer / near == doctest::Approx(std::pow(10.0, 1.5)).epsilon(0.05));
  }
  SUBCASE("x outside D rejected") {
    CHECK_THROWS_AS(killing_rate(1.0, one, std::nullopt, 1.0, D),
                    std::invalid_argument);
  }
}

TEST_CASE("torus generator structure") {
  TorusGrid grid(32);
  SUBCASE("constant kernel gives a circulant matrix") {
    const GeneratorMatrix A =
        assemble_torus_generator(constant_kernel(), grid, 1.5, 16);
    for (int i = 1; i < 32; ++i)
      for (int j = 0; j < 32; ++j)
        CHECK(A.entries(i, j) ==
              doctest::Approx(A.entries(0, (j - i + 32) % 32)).epsilon(1e-10));
  }
  SUBCASE("row sums vanish and the matrix is symmetric") {
    const GeneratorMatrix A =
        assemble_torus_generator(additive_cosine_kernel(), grid, 0.8, 16);
    const double amax = A.entries.cwiseAbs().maxCoeff();
    CHECK((A.entries * Eigen::VectorXd::Ones(32)).lpNorm<Eigen::Infinity>() <
          1e-9 * amax);
    CHECK((A.entries - A.entries.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(A.symmetrized);
    for (int i = 0; i < 32; ++i)
      for (int j = 0; j < 32; ++j)
        if (i != j) CHECK(A.entries(i, j) >= 0.0);
  }
  SUBCASE("spectral gap of the oscillating-kernel generator is positive") {
    TorusGrid g64(64);
    const GeneratorMatrix A =
        assemble_torus_generator(additive_cosine_kernel(), g64, 1.5, 32);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-A.entries);
    // eigenvalues ascending; the first is ~0 (constants), the second is the
    // spectral gap
    CHECK(std::fabs(es.eigenvalues()[0]) < 1e-8 * es.eigenvalues()[63]);
    CHECK(es.eigenvalues()[1] > 1.0);
  }
}

TEST_CASE("domain generator structure") {
  const Interval D{-1.0, 1.0};
  SUBCASE("constant kernel: symmetric with negative spectrum") {
    DomainGrid grid(D, 64);
    const GeneratorMatrix A =
        assemble_domain_generator(constant_kernel(), std::nullopt, grid, 1.5);
    CHECK((A.entries - A.entries.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.entries);
    CHECK(es.eigenvalues().maxCoeff() < 0.0);
    // row sums equal minus the killing rates
    const Eigen::VectorXd rowsum = A.entries * Eigen::VectorXd::Ones(64);
    const double amax = A.entries.cwiseAbs().maxCoeff();
    for (int i = 0; i < 64; ++i)
      CHECK(std::fabs(rowsum[i] + A.killing_rates[i]) < 1e-9 * amax);
    for (int i = 0; i < 64; ++i) CHECK(A.killing_rates[i] > 0.0);
  }
  SUBCASE("eps=none equals eps=1 for the constant kernel") {
    DomainGrid grid(D, 32);
    const GeneratorMatrix A =
        assemble_domain_generator(constant_kernel(), std::nullopt, grid, 1.0);
    const GeneratorMatrix B =
        assemble_domain_generator(constant_kernel(), 1.0, grid, 1.0);
    CHECK((A.entries - B.entries).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("oscillation is resolved: eps=1/8 and eps=1/16 differ") {
    DomainGrid grid(D, 127); // h = 1/64 <= eps/4 for both
    const GeneratorMatrix A = assemble_domain_generator(
        additive_cosine_kernel(), 1.0 / 8.0, grid, 1.5);
    const GeneratorMatrix B = assemble_domain_generator(
        additive_cosine_kernel(), 1.0 / 16.0, grid, 1.5);
    CHECK((A.entries - B.entries).cwiseAbs().maxCoeff() > 1e-3);
  }
  SUBCASE("resolution guard") {
    DomainGrid grid(D, 16);
    CHECK_THROWS_WITH_AS(
        assemble_domain_generator(additive_cosine_kernel(), 0.25, grid, 1.5),
        doctest::Contains("resolution guard"), std::invalid_argument);
  }
  SUBCASE("M-matrix: inverse of -A is entrywise nonnegative (direct)") {
    DomainGrid grid(D, 48);
    const GeneratorMatrix A = assemble_domain_generator(
        additive_cosine_kernel(), 0.25, grid, 0.5);
    const Eigen::MatrixXd inv = (-A.entries).inverse();
    CHECK(inv.minCoeff() >= -1e-10);
  }
}

TEST_CASE("quadratic form and generator application") {
  TorusGrid tg(32);
  const GeneratorMatrix T =
      assemble_torus_generator(product_cosine_kernel(), tg, 1.2, 16);
  SUBCASE("zero and constant vectors") {
    CHECK(quadratic_form(T, Eigen::VectorXd::Zero(32)) == 0.0);
    CHECK(std::fabs(quadratic_form(T, Eigen::VectorXd::Ones(32))) < 1e-12);
    CHECK(apply_generator(T, Eigen::VectorXd::Zero(32)).norm() == 0.0);
    const double amax = T.entries.cwiseAbs().maxCoeff();
    CHECK(apply_generator(T, Eigen::VectorXd::Ones(32))
              .lpNorm<Eigen::Infinity>() < 1e-9 * amax);
  }
  SUBCASE("killed form dominates lambda_min * h * ||f||^2") {
    DomainGrid grid({-1.0, 1.0}, 40);
    const GeneratorMatrix A =
        assemble_domain_generator(constant_kernel(), std::nullopt, grid, 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-A.entries);
    const double lmin = es.eigenvalues().minCoeff();
    CHECK(lmin > 0.0);
    Eigen::VectorXd f(40);
    for (int i = 0; i < 40; ++i) f[i] = std::sin(2.1 * i) + 0.3;
    CHECK(quadratic_form(A, f) >=
          doctest::Approx(lmin * A.grid_spacing * f.squaredNorm())
              .epsilon(1e-10));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(quadratic_form(T, Eigen::VectorXd::Zero(7)),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_generator(T, Eigen::VectorXd::Zero(7)),
                    std::invalid_argument);
  }
}

TEST_CASE("consistency: apply_generator converges to L f for K=1") {
  // reference: L f(x) = int_0^inf (f(x+z) - 2 f(x) + f(x-z)) z^{-1-alpha} dz
  // for the C^infty bump f supported on |x| < 1/2
  auto bump = [](double x) {
    return std::fabs(x) < 0.5 ? std::exp(-1.0 / (1.0 - 4.0 * x * x)) : 0.0;
  };
  const double alpha = 1.5;
  auto reference = [&](double x) {
    auto paired = [&](double z) {
      return (bump(x + z) - 2.0 * bump(x) + bump(x - z)) *
             std::pow(z, -1.0 - alpha);
    };
    // head via the numerically fitted even Taylor term of the pairing
    const double z0 = 1e-4;
    const double c2 = (bump(x + z0) - 2.0 * bump(x) + bump(x - z0)) / (z0 * z0);
    double head = c2 * std::pow(z0, 2.0 - alpha) / (2.0 - alpha);
    double mid = integrate_refined(paired, z0, 2.0, 12, 1e-11);
    double tail = -2.0 * bump(x) * std::pow(2.0, -alpha) / alpha;
    return head + mid + tail;
  };
  const Interval D{-1.0, 1.0};
  std::vector<double> errors;
  std::vector<double> hs;
  for (int n : {63, 127, 255}) {
    DomainGrid grid(D, n);
    const GeneratorMatrix A =
        assemble_domain_generator(constant_kernel(), std::nullopt, grid, alpha);
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f[i] = bump(grid.node(i));
    const Eigen::VectorXd Lf = apply_generator(A, f);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = grid.node(i);
      if (std::fabs(x) < 0.75) err = std::max(err, std::fabs(Lf[i] - reference(x)));
    }
    errors.push_back(err);
    hs.push_back(grid.spacing());
  }
  const double order01 = std::log(errors[0] / errors[1]) / std::log(hs[0] / hs[1]);
  const double order12 = std::log(errors[1] / errors[2]) / std::log(hs[1] / hs[2]);
  CHECK(order01 >= std::min(2.0 - alpha, 1.0) - 0.2);
  CHECK(order12 >= std::min(2.0 - alpha, 1.0) - 0.2);
}
