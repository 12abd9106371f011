#include "stochkin/endpoint.hpp"

#include <algorithm>
#include <atomic>
#include <vector>

#include "stochkin/errors.hpp"

namespace stochkin {

namespace {

void check_problem(const ReactionNetwork& network,
                   const IntervalProblem& problem) {
  if (!valid_state(network, problem.start_state) ||
      !valid_state(network, problem.end_state))
    throw ContractError("interval problem has invalid endpoint states");
  if (!(problem.t_end > problem.t_start))
    throw ContractError("interval problem needs t_end > t_start");
}

enum class Outcome : std::uint8_t { skipped, rejected, accepted };

}  // namespace

std::optional<SufficientStats> attempt(const ReactionNetwork& network,
                                       const RateParams& theta,
                                       const IntervalProblem& problem,
                                       Stream& stream,
                                       std::uint64_t max_events) {
  check_problem(network, problem);
  SimulateOptions options;
  options.mode = RecorderMode::stats;
  options.max_events = max_events;
  SimulateResult result = simulate(network, theta, problem.start_state,
                                   problem.t_start, problem.t_end, stream,
                                   options);
  if (result.final_state != problem.end_state) return std::nullopt;
  return std::move(result.stats);
}

Trajectory replay(const ReactionNetwork& network, const RateParams& theta,
                  const IntervalProblem& problem, const StreamState& state,
                  std::uint64_t max_events) {
  check_problem(network, problem);
  Stream stream = restore(state);
  SimulateOptions options;
  options.mode = RecorderMode::trajectory;
  options.max_events = max_events;
  SimulateResult result = simulate(network, theta, problem.start_state,
                                   problem.t_start, problem.t_end, stream,
                                   options);
  if (result.final_state != problem.end_state)
    throw ReplayCorruptionError(
        "replayed trajectory ends at " +
        format_state(network, result.final_state) + " instead of " +
        format_state(network, problem.end_state) +
        "; stream state and parameters are out of sync");
  return std::move(*result.trajectory);
}

EndpointSampler::EndpointSampler(const ReactionNetwork& network,
                                 const SamplerConfig& config)
    : network_(network), config_(config) {
  if (config_.worker_count < 1)
    throw ContractError("EndpointSampler: worker_count must be >= 1");
  if (config_.max_attempts < config_.effective_batch())
    throw ContractError("EndpointSampler: max_attempts must be >= batch size");
  if (config_.worker_count > 1)
    pool_ = std::make_unique<WorkerPool>(config_.worker_count);
}

EndpointSampler::~EndpointSampler() = default;

AcceptedSegment EndpointSampler::sample_interval(const RateParams& theta,
                                                 const IntervalProblem& problem,
                                                 std::uint64_t master_seed,
                                                 std::uint64_t epoch) {
  check_problem(network_, problem);
  const std::uint64_t batch = config_.effective_batch();
  const bool fast = config_.mode == SamplerMode::fast;

  std::vector<Outcome> outcomes(batch);
  std::vector<SufficientStats> stats(batch);

  std::uint64_t attempts_before = 0;  // attempts in fully rejected batches
  while (attempts_before < config_.max_attempts) {
    const std::uint64_t this_batch =
        std::min<std::uint64_t>(batch, config_.max_attempts - attempts_before);
    std::atomic<bool> success_seen{false};

    auto run_slot = [&](std::uint64_t slot) {
      // Waiting attempts may be bypassed once any success is known; an
      // attempt that has started always completes.
      if (fast && success_seen.load(std::memory_order_acquire)) {
        outcomes[slot] = Outcome::skipped;
        return;
      }
      Stream stream(master_seed,
                    stream_layout::attempt_stream(epoch, config_.max_attempts,
                                                  attempts_before + slot));
      auto accepted =
          attempt(network_, theta, problem, stream, config_.max_events);
      if (accepted) {
        stats[slot] = std::move(*accepted);
        outcomes[slot] = Outcome::accepted;
        success_seen.store(true, std::memory_order_release);
      } else {
        outcomes[slot] = Outcome::rejected;
      }
    };

    if (pool_)
      pool_->run(this_batch, run_slot);
    else
      for (std::uint64_t slot = 0; slot < this_batch; ++slot) run_slot(slot);

    std::vector<std::uint64_t> successes;
    for (std::uint64_t slot = 0; slot < this_batch; ++slot)
      if (outcomes[slot] == Outcome::accepted) successes.push_back(slot);

    if (!successes.empty()) {
      Stream selection(
          master_seed,
          stream_layout::selection_stream(epoch, config_.max_attempts));
      const auto pick = static_cast<std::size_t>(
          selection.next_uniform() * static_cast<double>(successes.size()));
      const std::uint64_t slot = successes[pick];

      AcceptedSegment segment;
      segment.initial_stream_state = StreamState{
          master_seed,
          stream_layout::attempt_stream(epoch, config_.max_attempts,
                                        attempts_before + slot),
          0};
      segment.stats = std::move(stats[slot]);
      segment.attempts = attempts_before + successes.front() + 1;
      return segment;
    }
    attempts_before += this_batch;
  }

  throw InfeasibleIntervalError(
      attempts_before, "interval [" + std::to_string(problem.t_start) + ", " +
                           std::to_string(problem.t_end) + "] from " +
                           format_state(network_, problem.start_state) +
                           " to " + format_state(network_, problem.end_state));
}

}  // namespace stochkin
