#include "stochkin/damcmc.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "stochkin/errors.hpp"

namespace stochkin {

void Observations::validate(const ReactionNetwork& network) const {
  if (times.size() != states.size())
    throw ValidationError("observations: times/states length mismatch");
  if (times.size() < 2)
    throw ValidationError("need at least 2 observations");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i] < times[i + 1]))
      throw ValidationError("observation times must be strictly increasing");
  for (const auto& state : states)
    if (!valid_state(network, state))
      throw ValidationError("observed state is invalid for this network");
  // Fixed endpoints are only reachable within one conservation class.
  for (const auto& law : network.conservation_laws) {
    Count first = 0;
    for (std::size_t i = 0; i < states.front().size(); ++i)
      first += law.coefficients[i] * states.front()[i];
    for (const auto& state : states) {
      Count value = 0;
      for (std::size_t i = 0; i < state.size(); ++i)
        value += law.coefficients[i] * state[i];
      if (value != first)
        throw ValidationError(
            "observations violate a declared conservation law");
    }
  }
}

RateParams draw_theta(const SufficientStats& total,
                      std::span<const GammaPrior> priors, Stream& stream,
                      const ReactionNetwork& network) {
  const std::size_t m = network.reaction_count();
  if (total.r.size() != m || priors.size() != m)
    throw ContractError("draw_theta: length mismatch");
  RateParams theta;
  theta.theta.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double shape = priors[j].alpha + static_cast<double>(total.r[j]);
    const double rate = priors[j].beta + total.b[j];
    if (!(shape > 0.0) || !(rate > 0.0))
      throw ImproprietyError(network.reactions[j].label);
    theta.theta[j] = stream.next_gamma(shape, rate);
  }
  return theta;
}

std::pair<double, double> derived_quantities(const RateParams& theta) {
  const auto& t = theta.theta;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (t.empty() || !(t[0] > 0.0))
    throw ContractError("derived_quantities: theta_1 must be positive");
  const double k_d = t.size() >= 2 ? t[1] / t[0] : nan;
  const double k_m = t.size() >= 3 ? (t[1] + t[2]) / t[0] : nan;
  return {k_d, k_m};
}

DaMcmc::DaMcmc(const ReactionNetwork& network, Observations observations,
               std::vector<GammaPrior> priors,
               const SamplerConfig& sampler_config, std::uint64_t master_seed)
    : network_(network),
      observations_(std::move(observations)),
      priors_(std::move(priors)),
      sampler_(network, sampler_config),
      master_seed_(master_seed) {
  observations_.validate(network_);
  if (priors_.size() != network_.reaction_count())
    throw ContractError("DaMcmc: need one prior per reaction");
  for (const auto& prior : priors_)
    if (prior.alpha < 0.0 || prior.beta < 0.0)
      throw ContractError("DaMcmc: prior parameters must be non-negative");
  telemetry_.assign(observations_.interval_count(), {});
}

std::vector<AcceptedSegment> DaMcmc::draw_segments(const RateParams& theta,
                                                   std::uint64_t iteration) {
  const std::size_t n = observations_.interval_count();
  // Reactions with a zero prior shape have an improper full conditional
  // whenever their firing count is zero, so the trajectory draw conditions
  // on propriety: segment sets in which such a reaction never fires are
  // redrawn. This is an exact rejection step for the posterior restricted to
  // "every zero-shape reaction fires at least once" -- the event the gamma
  // posterior needs to stay proper -- and leaves the theta step untouched.
  std::size_t offending = 0;
  for (std::uint64_t redraw = 0; redraw < kProprietyRedraws; ++redraw) {
    std::vector<AcceptedSegment> segments;
    segments.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto started = std::chrono::steady_clock::now();
      const std::uint64_t epoch = (iteration * kProprietyRedraws + redraw) * n + i;
      segments.push_back(sampler_.sample_interval(
          theta, observations_.interval(i), master_seed_, epoch));
      telemetry_[i].calls += 1;
      telemetry_[i].total_attempts += segments.back().attempts;
      telemetry_[i].total_wall_seconds +=
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        started)
              .count();
    }
    bool proper = true;
    for (std::size_t j = 0; j < network_.reaction_count() && proper; ++j) {
      if (priors_[j].alpha > 0.0) continue;
      std::uint64_t fired = 0;
      for (const auto& segment : segments) fired += segment.stats.r[j];
      if (fired == 0) {
        proper = false;
        offending = j;
      }
    }
    if (proper) return segments;
  }
  // No proper segment set within the redraw budget: the zero count is
  // structural, or the chain is pinned at the propriety boundary.
  throw ImproprietyError(network_.reactions[offending].label);
}

ChainState DaMcmc::init_chain(const RateParams& theta_init) {
  if (theta_init.theta.size() != network_.reaction_count())
    throw ContractError("init_chain: theta_init length mismatch");
  for (double v : theta_init.theta)
    if (!(v > 0.0))
      throw ContractError("init_chain: theta_init must be strictly positive");
  ChainState chain;
  chain.theta = theta_init;
  chain.segments = draw_segments(theta_init, 0);
  chain.iteration = 0;
  return chain;
}

ChainState DaMcmc::gibbs_step(const ChainState& chain) {
  const std::uint64_t iteration = chain.iteration + 1;

  std::vector<SufficientStats> parts;
  parts.reserve(chain.segments.size());
  for (const auto& segment : chain.segments) parts.push_back(segment.stats);
  const SufficientStats total = merge_stats(parts);

  Stream theta_stream(master_seed_, stream_layout::theta_stream(iteration));
  ChainState next;
  next.theta = draw_theta(total, priors_, theta_stream, network_);
  next.segments = draw_segments(next.theta, iteration);
  next.iteration = iteration;
  return next;
}

std::vector<PosteriorSample> DaMcmc::run_chain(const RunOptions& options) {
  if (options.thin == 0) throw ContractError("run_chain: thin must be >= 1");
  RateParams theta_init = options.theta_init;
  if (theta_init.theta.empty())
    theta_init.theta.assign(network_.reaction_count(), 1.0);

  ChainState chain = init_chain(theta_init);

  std::vector<PosteriorSample> samples;
  samples.reserve(options.iterations / options.thin + 1);
  const std::uint64_t total_steps = options.burn_in + options.iterations;
  for (std::uint64_t step = 1; step <= total_steps; ++step) {
    try {
      chain = gibbs_step(chain);
    } catch (const ImproprietyError& e) {
      throw ImproprietyError(e.reaction, "iteration " + std::to_string(step));
    } catch (const InfeasibleIntervalError& e) {
      throw InfeasibleIntervalError(
          e.attempts, "iteration " + std::to_string(step) + ": " + e.what());
    }
    const bool retained = step > options.burn_in &&
                          (step - options.burn_in) % options.thin == 0;
    if (retained) {
      PosteriorSample sample;
      sample.iteration = chain.iteration;
      sample.theta = chain.theta;
      std::tie(sample.k_d, sample.k_m) = derived_quantities(chain.theta);
      sample.segments = chain.segments;
      samples.push_back(std::move(sample));
    }
  }
  return samples;
}

}  // namespace stochkin
