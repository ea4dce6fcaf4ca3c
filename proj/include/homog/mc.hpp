#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "homog/discretize.hpp"

namespace homog {

// Counter-based splittable RNG: each stream is an xoshiro256++ instance whose
// state is expanded with splitmix64 from (master_seed, stream_index). Streams
// with distinct indices are independent for our purposes and reproducible
// regardless of thread scheduling.
struct Rng {
  uint64_t s[4];
  Rng(uint64_t master_seed, uint64_t stream_index);
  uint64_t next_u64();
  double next_unit();           // uniform in [0,1)
  double next_exponential(double rate);
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n_paths = 0;
  uint64_t seed = 0;
  double elapsed_seconds = 0.0;
};

struct ExitPath {
  double exit_time = 0.0;
  Eigen::VectorXd holding_times; // per-node occupation, sums to exit_time
  long n_events = 0;
};

// CTMC simulation of the killed chain: exponential holding at rate |A_ii|,
// jump with probability nu_ij/|A_ii|, kill with probability
// killing_rate_i/|A_ii|. Termination is a.s.; a fuse of 1e7 events aborts.
ExitPath simulate_exit(const GeneratorMatrix& A, int start,
                       uint64_t rng_seed);

// Feynman-Kac estimate of int_0^tau h(X_s) ds from `start`; targets the
// solution of (-A) u = h at that node. Deterministic for fixed seed: path p
// always uses stream p and partial sums are combined in block order.
McEstimate feynman_kac_estimate(const GeneratorMatrix& A,
                                const Eigen::VectorXd& h, int start,
                                long n_paths, uint64_t seed);

struct ExitTimeSweepRow {
  double eps = 0.0;
  double sup_exit_time = 0.0; // max node of the linear solve
  double mc_mean = 0.0;       // MC spot check at the argmax node
  double mc_std_error = 0.0;
  double z_score = 0.0;
  int n_dof = 0;
};

struct ExitTimeSweepReport {
  std::vector<ExitTimeSweepRow> rows;
  double ratio = 0.0; // max/min of sup exit times across the sweep
  bool pass = false;  // ratio <= 1.5
};

// Tabulates sup-node expected exit times across eps (linear solves with an
// MC spot check per eps at the argmax node).
ExitTimeSweepReport exit_time_sweep(const KernelSpec& kernel, double alpha,
                                    Interval domain,
                                    const std::vector<double>& eps_list,
                                    int grid_ratio, uint64_t seed,
                                    long mc_paths = 20000,
                                    const QuadratureSettings& quad = {});

} // namespace homog
