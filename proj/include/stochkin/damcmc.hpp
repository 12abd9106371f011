#ifndef STOCHKIN_DAMCMC_HPP
#define STOCHKIN_DAMCMC_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "stochkin/endpoint.hpp"
#include "stochkin/network.hpp"
#include "stochkin/rng.hpp"
#include "stochkin/ssa.hpp"

namespace stochkin {

/// Gamma(alpha, beta) prior on one rate parameter, rate parameterization.
/// (0, 0) encodes the improper prior p(theta) proportional to 1/theta.
struct GammaPrior {
  double alpha = 0.0;
  double beta = 0.0;
  bool improper() const { return alpha == 0.0 && beta == 0.0; }
};

/// Complete states observed at strictly increasing times t_0 < ... < t_n.
struct Observations {
  std::vector<double> times;
  std::vector<SpeciesState> states;

  std::size_t interval_count() const {
    return times.empty() ? 0 : times.size() - 1;
  }
  void validate(const ReactionNetwork& network) const;
  IntervalProblem interval(std::size_t i) const {
    return {states[i], states[i + 1], times[i], times[i + 1]};
  }
};

struct ChainState {
  RateParams theta;
  std::vector<AcceptedSegment> segments;  // one per observation interval
  std::uint64_t iteration = 0;
};

/// One retained draw: parameters, derived constants, and the accepted
/// segments (stream states for seed replay plus their statistics).
struct PosteriorSample {
  std::uint64_t iteration = 0;
  RateParams theta;
  double k_d = 0.0;  // theta_2 / theta_1
  double k_m = 0.0;  // (theta_2 + theta_3) / theta_1
  std::vector<AcceptedSegment> segments;
};

struct RunOptions {
  std::uint64_t burn_in = 0;
  std::uint64_t iterations = 0;  // retained Gibbs steps (before thinning)
  std::uint64_t thin = 1;
  RateParams theta_init;  // defaults to 1.0 per reaction when empty
};

/// Per-interval rejection-sampling telemetry, aggregated over a run.
struct IntervalTelemetry {
  std::uint64_t calls = 0;
  std::uint64_t total_attempts = 0;
  double total_wall_seconds = 0.0;

  double mean_attempts() const {
    return calls ? static_cast<double>(total_attempts) / static_cast<double>(calls) : 0.0;
  }
};

/// theta_j ~ Gamma(alpha_j + r_j, beta_j + b_j), independently per reaction.
/// Throws ImproprietyError (naming the reaction) when a posterior shape or
/// rate is zero.
RateParams draw_theta(const SufficientStats& total,
                      std::span<const GammaPrior> priors, Stream& stream,
                      const ReactionNetwork& network);

/// (K_D, K_M) = (theta_2/theta_1, (theta_2+theta_3)/theta_1). Entries beyond
/// the reaction count are treated as absent: networks with fewer than 2 (3)
/// reactions get NaN for K_D (K_M).
std::pair<double, double> derived_quantities(const RateParams& theta);

/// The data-augmentation Gibbs sampler: alternates conjugate gamma parameter
/// draws with endpoint-conditioned segment redraws. Fully deterministic given
/// (inputs, master_seed) in deterministic sampler mode.
class DaMcmc {
 public:
  DaMcmc(const ReactionNetwork& network, Observations observations,
         std::vector<GammaPrior> priors, const SamplerConfig& sampler_config,
         std::uint64_t master_seed);

  /// Draws every segment under theta_init (iteration 0 epochs).
  ChainState init_chain(const RateParams& theta_init);

  /// One Gibbs step: theta from the merged statistics of the current
  /// segments, then every segment redrawn under the new theta.
  ChainState gibbs_step(const ChainState& chain);

  /// burn_in discarded steps, then `iterations` steps of which every thin-th
  /// is retained. Errors carry iteration context.
  std::vector<PosteriorSample> run_chain(const RunOptions& options);

  const std::vector<IntervalTelemetry>& telemetry() const { return telemetry_; }
  const Observations& observations() const { return observations_; }

  /// Redraw budget for propriety conditioning: with an improper prior on
  /// reaction j, segment sets with r_j = 0 (no firing anywhere) are redrawn
  /// so the gamma full conditional stays proper; past this budget the zero
  /// is treated as structural and the run aborts with ImproprietyError.
  static constexpr std::uint64_t kProprietyRedraws = 64;

 private:
  std::vector<AcceptedSegment> draw_segments(const RateParams& theta,
                                             std::uint64_t iteration);

  const ReactionNetwork& network_;
  Observations observations_;
  std::vector<GammaPrior> priors_;
  EndpointSampler sampler_;
  std::uint64_t master_seed_;
  std::vector<IntervalTelemetry> telemetry_;
};

}  // namespace stochkin

#endif
