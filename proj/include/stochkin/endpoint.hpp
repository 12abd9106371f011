#ifndef STOCHKIN_ENDPOINT_HPP
#define STOCHKIN_ENDPOINT_HPP

#include <cstdint>
#include <memory>
#include <optional>

#include "stochkin/network.hpp"
#include "stochkin/rng.hpp"
#include "stochkin/ssa.hpp"
#include "stochkin/worker_pool.hpp"

namespace stochkin {

/// One observation interval with fixed endpoints.
struct IntervalProblem {
  SpeciesState start_state;
  SpeciesState end_state;
  double t_start = 0.0;
  double t_end = 0.0;
};

/// An accepted endpoint-conditioned trajectory, stored by seed replay: the
/// pre-attempt stream state plus the sufficient statistics it produced.
/// attempts is the 1-based position, in stream order, of the first accepted
/// attempt; it is Geometric(p) with mean 1/p regardless of batching.
struct AcceptedSegment {
  StreamState initial_stream_state;
  SufficientStats stats;
  std::uint64_t attempts = 0;
};

enum class SamplerMode { deterministic, fast };

struct SamplerConfig {
  std::uint64_t batch_size = 0;  // 0 means 4 * worker_count
  std::uint64_t max_attempts = 10'000'000;
  SamplerMode mode = SamplerMode::deterministic;
  unsigned worker_count = 1;
  std::uint64_t max_events = 10'000'000;

  std::uint64_t effective_batch() const {
    return batch_size > 0 ? batch_size : 4ull * (worker_count > 0 ? worker_count : 1);
  }
};

/// Stream-id layout under one master seed. Each (epoch) owns a block of
/// max_attempts + 1 ids: offset 0 is the uniform-selection stream, offsets
/// 1..max_attempts are attempt streams in positional order. Parameter-draw
/// streams live in the top-bit half so they can never collide with blocks.
namespace stream_layout {

inline std::uint64_t selection_stream(std::uint64_t epoch,
                                      std::uint64_t max_attempts) {
  return epoch * (max_attempts + 1);
}

inline std::uint64_t attempt_stream(std::uint64_t epoch,
                                    std::uint64_t max_attempts,
                                    std::uint64_t attempt_index) {
  return epoch * (max_attempts + 1) + 1 + attempt_index;
}

inline std::uint64_t theta_stream(std::uint64_t iteration) {
  return (std::uint64_t{1} << 63) | iteration;
}

}  // namespace stream_layout

/// One rejection-sampling attempt: forward-simulate the interval and accept
/// iff the final state equals the target exactly in every coordinate.
/// Returns the sufficient statistics on acceptance.
std::optional<SufficientStats> attempt(const ReactionNetwork& network,
                                       const RateParams& theta,
                                       const IntervalProblem& problem,
                                       Stream& stream,
                                       std::uint64_t max_events = 10'000'000);

/// Re-simulates an accepted attempt from its stored stream state, returning
/// the full trajectory. Throws ReplayCorruptionError when the final state no
/// longer matches the interval endpoint (seed/theta desynchronization).
Trajectory replay(const ReactionNetwork& network, const RateParams& theta,
                  const IntervalProblem& problem, const StreamState& state,
                  std::uint64_t max_events = 10'000'000);

/// Parallel rejection sampler over a worker pool.
///
/// Attempts run in batches with positionally assigned stream ids. In
/// deterministic mode every attempt of a batch runs to completion and the
/// result is a pure function of (master_seed, epoch, config, inputs),
/// independent of worker count and scheduling. In fast mode attempts that
/// have not started when a success is already known are skipped; in-progress
/// attempts always run to completion in both modes. One success is selected
/// uniformly via the epoch's dedicated selection stream.
class EndpointSampler {
 public:
  EndpointSampler(const ReactionNetwork& network, const SamplerConfig& config);
  ~EndpointSampler();

  const SamplerConfig& config() const { return config_; }

  /// Throws InfeasibleIntervalError after max_attempts rejections.
  AcceptedSegment sample_interval(const RateParams& theta,
                                  const IntervalProblem& problem,
                                  std::uint64_t master_seed,
                                  std::uint64_t epoch);

 private:
  const ReactionNetwork& network_;
  SamplerConfig config_;
  std::unique_ptr<WorkerPool> pool_;  // only when worker_count > 1
};

}  // namespace stochkin

#endif
