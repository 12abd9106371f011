#ifndef STOCHKIN_SSA_HPP
#define STOCHKIN_SSA_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stochkin/network.hpp"
#include "stochkin/rng.hpp"

namespace stochkin {

struct TrajectoryEvent {
  double time;
  std::uint32_t reaction;
};

/// A realized path: the initial state plus the ordered reaction events.
/// Event times lie strictly inside (start_time, end_time].
struct Trajectory {
  SpeciesState initial_state;
  std::vector<TrajectoryEvent> events;
  double start_time = 0.0;
  double end_time = 0.0;
};

/// Per-reaction sufficient statistics over one window: firing counts r_j and
/// hazard integrals b_j = integral of h_j(X_t) dt, terminal segment included.
struct SufficientStats {
  std::vector<std::uint64_t> r;
  std::vector<double> b;
};

enum class RecorderMode { none, stats, trajectory };

struct SimulateOptions {
  RecorderMode mode = RecorderMode::stats;
  std::uint64_t max_events = 10'000'000;  // runaway guard
};

struct NextReaction {
  std::size_t reaction;
  double tau;
};

/// One SSA step: reaction index first (one uniform, cumulative scan), waiting
/// time second (one uniform). Returns nullopt without consuming draws when
/// a0(x) = 0 (absorbing state).
std::optional<NextReaction> next_reaction(const SpeciesState& x,
                                          const ReactionNetwork& network,
                                          const RateParams& theta,
                                          Stream& stream);

struct SimulateResult {
  SpeciesState final_state;
  std::optional<SufficientStats> stats;      // RecorderMode::stats
  std::optional<Trajectory> trajectory;      // RecorderMode::trajectory
};

/// Forward-simulates over [t0, t1]. The first event drawn past t1 is
/// discarded and the state freezes at t1 (exact by memorylessness). The b_j
/// accumulation is compensated (Kahan) and includes the terminal segment
/// h_j(X_last) * (t1 - t_last). Throws RunawaySimulationError past the event
/// cap, ContractError on invalid inputs.
SimulateResult simulate(const ReactionNetwork& network, const RateParams& theta,
                        const SpeciesState& x0, double t0, double t1,
                        Stream& stream, const SimulateOptions& options = {});

/// Elementwise sums; all parts must have the same reaction count.
SufficientStats merge_stats(std::span<const SufficientStats> parts);

SufficientStats zero_stats(std::size_t reaction_count);

/// Recomputes sufficient statistics by walking a recorded trajectory, using
/// the same compensated accumulation order as the streaming recorder.
SufficientStats stats_from_trajectory(const ReactionNetwork& network,
                                      const Trajectory& trajectory);

/// State of the right-continuous piecewise-constant path at time t, which
/// must lie within [start_time, end_time].
SpeciesState state_at(const ReactionNetwork& network,
                      const Trajectory& trajectory, double t);

}  // namespace stochkin

#endif
