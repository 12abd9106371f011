#include "stochkin/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "stochkin/errors.hpp"

namespace stochkin {

double amdahl_speedup(double parallel_fraction, unsigned cores) {
  if (!(parallel_fraction >= 0.0 && parallel_fraction <= 1.0))
    throw ContractError("amdahl_speedup: P must lie in [0,1]");
  if (cores < 1) throw ContractError("amdahl_speedup: C must be >= 1");
  return 1.0 / (1.0 - parallel_fraction +
                parallel_fraction / static_cast<double>(cores));
}

namespace {

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values[values.size() / 2];
}

// One timed pass over the replicates; also reports the attempt mean.
double timed_pass(EndpointSampler& sampler, const SweepSpec& spec,
                  const RateParams& theta, std::size_t grid_index,
                  double& mean_attempts) {
  std::uint64_t total_attempts = 0;
  const auto started = std::chrono::steady_clock::now();
  for (std::uint64_t rep = 0; rep < spec.replicates; ++rep) {
    const std::uint64_t epoch = grid_index * spec.replicates + rep;
    total_attempts +=
        sampler.sample_interval(theta, spec.problem, spec.master_seed, epoch)
            .attempts;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  mean_attempts = static_cast<double>(total_attempts) /
                  static_cast<double>(spec.replicates);
  return elapsed / static_cast<double>(spec.replicates);
}

}  // namespace

std::vector<SweepPoint> run_sweep(const ReactionNetwork& network,
                                  const SweepSpec& spec,
                                  std::span<const unsigned> worker_counts) {
  if (spec.grid.empty()) throw ContractError("run_sweep: empty grid");
  for (double v : spec.grid)
    if (!(v > 0.0)) throw ContractError("run_sweep: grid values must be positive");
  if (spec.swept_index >= spec.theta_base.theta.size())
    throw ContractError("run_sweep: swept index out of range");
  if (spec.replicates < 1)
    throw ContractError("run_sweep: need at least one replicate");

  // Serial reference: one worker taking attempts one at a time until the
  // first acceptance, the sequential baseline the parallel pool is compared
  // against.
  SamplerConfig serial_config = spec.sampler;
  serial_config.worker_count = 1;
  serial_config.batch_size = 1;

  const unsigned repeats = std::max(1u, spec.timing_repeats);
  std::vector<SweepPoint> table;
  for (std::size_t g = 0; g < spec.grid.size(); ++g) {
    RateParams theta = spec.theta_base;
    theta.theta[spec.swept_index] = spec.grid[g];

    EndpointSampler serial_sampler(network, serial_config);
    for (unsigned workers : worker_counts) {
      SweepPoint point;
      point.grid_value = spec.grid[g];
      point.workers = workers;

      SamplerConfig parallel_config = spec.sampler;
      parallel_config.worker_count = workers;
      if (workers == 1) parallel_config.batch_size = 1;

      try {
        EndpointSampler parallel_sampler(network, parallel_config);
        // Serial and parallel passes are interleaved within each trial so
        // that the ratio is robust to machine-load drift across trials.
        std::vector<double> serial_times, parallel_times, ratios;
        for (unsigned trial = 0; trial < repeats; ++trial) {
          double attempts = 0.0;
          serial_times.push_back(
              timed_pass(serial_sampler, spec, theta, g, attempts));
          point.mean_attempts = attempts;
          parallel_times.push_back(
              timed_pass(parallel_sampler, spec, theta, g, attempts));
          ratios.push_back(serial_times.back() / parallel_times.back());
        }
        point.serial_seconds = median_of(serial_times);
        point.parallel_seconds = median_of(parallel_times);
        point.efficiency = median_of(ratios);
      } catch (const InfeasibleIntervalError& e) {
        point.feasible = false;
        point.error = e.what();
      }
      table.push_back(std::move(point));
    }
  }
  return table;
}

}  // namespace stochkin
