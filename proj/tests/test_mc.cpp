#include <cmath>

#include "doctest.h"
#include "homog/dirichlet.hpp"
#include "homog/mc.hpp"

using namespace homog;

namespace {

// 1x1 killed generator: pure killing at rate r
GeneratorMatrix pure_killing(double r) {
  GeneratorMatrix A;
  A.entries = Eigen::MatrixXd::Constant(1, 1, -r);
  A.kind = GeneratorMatrix::Kind::KilledDomain;
  A.alpha = 1.0;
  A.killing_rates = Eigen::VectorXd::Constant(1, r);
  A.grid_spacing = 1.0;
  A.nodes = Eigen::VectorXd::Zero(1);
  A.symmetrized = true;
  return A;
}

} // namespace

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(42, 7), b(42, 7), c(42, 8);
  bool all_equal = true, any_equal_c = false;
  for (int i = 0; i < 100; ++i) {
    const uint64_t va = a.next_u64();
    all_equal = all_equal && va == b.next_u64();
    any_equal_c = any_equal_c || va == c.next_u64();
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_c);
  Rng d(1, 0);
  for (int i = 0; i < 1000; ++i) {
    const double u = d.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("single-node toy matrix: exponential exit law") {
  const double r = 2.5;
  const GeneratorMatrix A = pure_killing(r);
  const McEstimate est =
      feynman_kac_estimate(A, Eigen::VectorXd::Ones(1), 0, 100000, 99);
  // h = 1 makes the estimate the mean exit time, which is 1/r
  CHECK(std::fabs(est.mean - 1.0 / r) <= 3.0 * est.std_error);
  CHECK(est.std_error ==
        doctest::Approx(1.0 / r / std::sqrt(100000.0)).epsilon(0.05));
}

TEST_CASE("occupation times sum to the exit time per path") {
  DomainGrid grid({-1.0, 1.0}, 32);
  const GeneratorMatrix A =
      assemble_domain_generator(additive_cosine_kernel(), 0.25, grid, 1.0);
  for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const ExitPath path = simulate_exit(A, 16, seed);
    CHECK(path.holding_times.sum() == doctest::Approx(path.exit_time).epsilon(1e-14));
    CHECK(path.exit_time > 0.0);
  }
}

TEST_CASE("mean exit time matches the linear solve") {
  DomainGrid grid({-1.0, 1.0}, 63);
  const GeneratorMatrix A =
      assemble_domain_generator(constant_kernel(), std::nullopt, grid, 1.5);
  const Eigen::VectorXd t = expected_exit_time(A);
  const int mid = 31; // node nearest 0
  const McEstimate est =
      feynman_kac_estimate(A, Eigen::VectorXd::Ones(63), mid, 30000, 4242);
  CHECK(std::fabs(est.mean - t[mid]) <= 3.0 * est.std_error);
}

TEST_CASE("feynman-kac estimates") {
  DomainGrid grid({-1.0, 1.0}, 63);
  const GeneratorMatrix A =
      assemble_domain_generator(additive_cosine_kernel(), 0.125, grid, 1.5);
  SUBCASE("h = 0 gives exactly zero") {
    const McEstimate est =
        feynman_kac_estimate(A, Eigen::VectorXd::Zero(63), 10, 2000, 5);
    CHECK(est.mean == 0.0);
    CHECK(est.std_error == 0.0);
  }
  SUBCASE("agrees with the direct solve at the start node") {
    Eigen::VectorXd h(63);
    for (int i = 0; i < 63; ++i)
      h[i] = std::pow(1.0 - grid.node(i) * grid.node(i), 3.0);
    const Eigen::VectorXd direct =
        Eigen::LLT<Eigen::MatrixXd>(Eigen::MatrixXd(-A.entries)).solve(h);
    const McEstimate est = feynman_kac_estimate(A, h, 31, 30000, 777);
    CHECK(std::fabs(est.mean - direct[31]) <= 3.0 * est.std_error);
  }
  SUBCASE("bit-for-bit reproducible") {
    Eigen::VectorXd h = Eigen::VectorXd::Ones(63);
    const McEstimate a = feynman_kac_estimate(A, h, 20, 5000, 31337);
    const McEstimate b = feynman_kac_estimate(A, h, 20, 5000, 31337);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
  }
  SUBCASE("path count precondition") {
    CHECK_THROWS_AS(
        feynman_kac_estimate(A, Eigen::VectorXd::Ones(63), 0, 100, 1),
        std::invalid_argument);
  }
}

TEST_CASE("exit time sweep") {
  SUBCASE("constant kernel: ratio exactly 1") {
    const ExitTimeSweepReport rep = exit_time_sweep(
        constant_kernel(), 1.5, {-1.0, 1.0}, {0.25, 0.125}, 8, 7, 2000);
    CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.pass);
  }
  SUBCASE("additive cosine: uniform over the sweep") {
    const ExitTimeSweepReport rep =
        exit_time_sweep(additive_cosine_kernel(), 1.5, {-1.0, 1.0},
                        {0.25, 0.125, 0.0625}, 8, 7, 2000);
    CHECK(rep.pass);
    CHECK(rep.ratio < 1.5);
    for (const auto& row : rep.rows) CHECK(std::fabs(row.z_score) <= 4.0);
  }
  SUBCASE("scaling the kernel by 2 halves all exit times") {
    const KernelSpec twice = fourier_kernel({{0, 0, 2.0}}, "twice-constant");
    DomainGrid grid({-1.0, 1.0}, 48);
    const GeneratorMatrix A =
        assemble_domain_generator(constant_kernel(), std::nullopt, grid, 1.0);
    const GeneratorMatrix B =
        assemble_domain_generator(twice, std::nullopt, grid, 1.0);
    const Eigen::VectorXd ta = expected_exit_time(A);
    const Eigen::VectorXd tb = expected_exit_time(B);
    CHECK((2.0 * tb - ta).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}
