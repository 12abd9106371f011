#include "stochkin/ssa.hpp"

#include <cmath>

#include "stochkin/errors.hpp"

namespace stochkin {

namespace {

// Kahan-compensated accumulators, one per reaction.
struct CompensatedSums {
  std::vector<double> sum;
  std::vector<double> carry;

  explicit CompensatedSums(std::size_t m) : sum(m, 0.0), carry(m, 0.0) {}

  void add(std::size_t j, double value) {
    const double y = value - carry[j];
    const double t = sum[j] + y;
    carry[j] = (t - sum[j]) - y;
    sum[j] = t;
  }
};

void check_simulate_inputs(const ReactionNetwork& network,
                           const RateParams& theta, const SpeciesState& x0,
                           double t0, double t1) {
  if (!valid_state(network, x0))
    throw ContractError("simulate: initial state is invalid for this network");
  if (theta.theta.size() != network.reaction_count())
    throw ContractError("simulate: theta length mismatch");
  for (double v : theta.theta)
    if (!(v > 0.0) || !std::isfinite(v))
      throw ContractError("simulate: rate parameters must be positive finite");
  if (!(t1 > t0)) throw ContractError("simulate: need t1 > t0");
}

}  // namespace

std::optional<NextReaction> next_reaction(const SpeciesState& x,
                                          const ReactionNetwork& network,
                                          const RateParams& theta,
                                          Stream& stream) {
  const std::size_t m = network.reaction_count();
  std::vector<double> a(m);
  double a0 = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    a[j] = theta.theta[j] * hazard(network.reactions[j], x);
    a0 += a[j];
  }
  if (a0 <= 0.0) return std::nullopt;
  const std::size_t j = stream.next_categorical(a, a0);
  const double tau = stream.next_exponential(a0);
  return NextReaction{j, tau};
}

namespace {

// Per-thread scratch keeps the rejection-sampling hot path free of heap
// traffic; every buffer is fully overwritten on each call.
struct SimulateScratch {
  std::vector<double> h;
  std::vector<double> a;
  std::vector<std::uint64_t> fired;
  std::vector<double> sum;
  std::vector<double> carry;
};

}  // namespace

SimulateResult simulate(const ReactionNetwork& network, const RateParams& theta,
                        const SpeciesState& x0, double t0, double t1,
                        Stream& stream, const SimulateOptions& options) {
  check_simulate_inputs(network, theta, x0, t0, t1);

  const std::size_t m = network.reaction_count();
  const bool want_stats = options.mode == RecorderMode::stats;
  const bool want_trajectory = options.mode == RecorderMode::trajectory;

  SimulateResult result;
  result.final_state = x0;
  SpeciesState& x = result.final_state;

  thread_local SimulateScratch scratch;
  scratch.h.assign(m, 0.0);
  scratch.a.assign(m, 0.0);
  scratch.fired.assign(want_stats ? m : 0, 0);
  scratch.sum.assign(want_stats ? m : 0, 0.0);
  scratch.carry.assign(want_stats ? m : 0, 0.0);
  double* const h = scratch.h.data();
  double* const a = scratch.a.data();

  auto accumulate = [&](std::size_t j, double value) {
    const double y = value - scratch.carry[j];
    const double t = scratch.sum[j] + y;
    scratch.carry[j] = (t - scratch.sum[j]) - y;
    scratch.sum[j] = t;
  };

  if (want_trajectory) {
    result.trajectory.emplace();
    result.trajectory->initial_state = x0;
    result.trajectory->start_time = t0;
    result.trajectory->end_time = t1;
  }

  double t = t0;
  std::uint64_t events = 0;

  while (true) {
    double a0 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      h[j] = hazard(network.reactions[j], x);
      a[j] = theta.theta[j] * h[j];
      a0 += a[j];
    }
    if (a0 <= 0.0) {
      // Absorbed: state freezes, no draws consumed.
      if (want_stats)
        for (std::size_t j = 0; j < m; ++j) accumulate(j, h[j] * (t1 - t));
      break;
    }
    const std::size_t j = stream.next_categorical({a, m}, a0);
    const double tau = stream.next_exponential(a0);
    if (t + tau > t1) {
      // Overshoot: discard the event, freeze at t1.
      if (want_stats)
        for (std::size_t k = 0; k < m; ++k) accumulate(k, h[k] * (t1 - t));
      break;
    }
    if (want_stats) {
      for (std::size_t k = 0; k < m; ++k) accumulate(k, h[k] * tau);
      ++scratch.fired[j];
    }
    t += tau;
    for (const auto& [i, delta] : network.reactions[j].change_terms)
      x[i] += delta;
    if (want_trajectory)
      result.trajectory->events.push_back({t, static_cast<std::uint32_t>(j)});
    if (++events >= options.max_events)
      throw RunawaySimulationError(options.max_events);
  }

  if (want_stats)
    result.stats = SufficientStats{
        std::vector<std::uint64_t>(scratch.fired.begin(), scratch.fired.end()),
        std::vector<double>(scratch.sum.begin(), scratch.sum.end())};
  return result;
}

SufficientStats merge_stats(std::span<const SufficientStats> parts) {
  if (parts.empty()) throw ContractError("merge_stats: no parts");
  const std::size_t m = parts.front().r.size();
  SufficientStats total = zero_stats(m);
  CompensatedSums sums(m);
  for (const auto& part : parts) {
    if (part.r.size() != m || part.b.size() != m)
      throw ContractError("merge_stats: reaction count mismatch");
    for (std::size_t j = 0; j < m; ++j) {
      total.r[j] += part.r[j];
      sums.add(j, part.b[j]);
    }
  }
  total.b = std::move(sums.sum);
  return total;
}

SufficientStats zero_stats(std::size_t reaction_count) {
  return SufficientStats{std::vector<std::uint64_t>(reaction_count, 0),
                         std::vector<double>(reaction_count, 0.0)};
}

SufficientStats stats_from_trajectory(const ReactionNetwork& network,
                                      const Trajectory& trajectory) {
  const std::size_t m = network.reaction_count();
  SufficientStats stats = zero_stats(m);
  CompensatedSums integrals(m);

  SpeciesState x = trajectory.initial_state;
  double t = trajectory.start_time;
  std::vector<double> h(m);
  for (const auto& event : trajectory.events) {
    hazards_into(network, x, h);
    for (std::size_t j = 0; j < m; ++j) integrals.add(j, h[j] * (event.time - t));
    ++stats.r[event.reaction];
    for (const auto& [i, delta] : network.reactions[event.reaction].change_terms)
      x[i] += delta;
    t = event.time;
  }
  hazards_into(network, x, h);
  for (std::size_t j = 0; j < m; ++j)
    integrals.add(j, h[j] * (trajectory.end_time - t));
  stats.b = std::move(integrals.sum);
  return stats;
}

SpeciesState state_at(const ReactionNetwork& network,
                      const Trajectory& trajectory, double t) {
  if (t < trajectory.start_time || t > trajectory.end_time)
    throw ContractError("state_at: time outside the trajectory window");
  SpeciesState x = trajectory.initial_state;
  for (const auto& event : trajectory.events) {
    if (event.time > t) break;
    for (const auto& [i, delta] : network.reactions[event.reaction].change_terms)
      x[i] += delta;
  }
  return x;
}

}  // namespace stochkin
