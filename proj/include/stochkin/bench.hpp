#ifndef STOCHKIN_BENCH_HPP
#define STOCHKIN_BENCH_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stochkin/endpoint.hpp"
#include "stochkin/network.hpp"

namespace stochkin {

/// Amdahl's bound 1/(1 - P + P/C) for parallel fraction P on C cores.
double amdahl_speedup(double parallel_fraction, unsigned cores);

/// Rejection-difficulty sweep: vary one rate parameter over a grid and
/// measure attempts and wall time for a fixed interval problem.
struct SweepSpec {
  RateParams theta_base;
  std::size_t swept_index = 0;
  std::vector<double> grid;
  IntervalProblem problem;
  std::uint64_t replicates = 100;
  SamplerConfig sampler;  // worker_count is overridden per measurement
  std::uint64_t master_seed = 1;
  unsigned timing_repeats = 5;  // median-of-k timing per point
};

struct SweepPoint {
  double grid_value = 0.0;
  unsigned workers = 0;
  bool feasible = true;
  std::string error;
  double mean_attempts = 0.0;
  double serial_seconds = 0.0;    // per sample_interval call, workers = 1
  double parallel_seconds = 0.0;  // per call at `workers`
  double efficiency = 0.0;        // serial_seconds / parallel_seconds
};

/// Runs the sweep at worker count 1 (the serial reference: one worker,
/// batch size 1, i.e. sequential attempts until the first success) plus each
/// requested worker count with the spec's batch settings. Epochs are fixed
/// per (grid point, replicate), so attempt counts in deterministic mode are
/// identical across worker counts and timing repeats. Infeasible grid points
/// are reported per row and the sweep continues.
std::vector<SweepPoint> run_sweep(const ReactionNetwork& network,
                                  const SweepSpec& spec,
                                  std::span<const unsigned> worker_counts);

}  // namespace stochkin

#endif
