#include "stochkin/diagnostics.hpp"

#include <cmath>

#include "doctest.h"
#include "stochkin/errors.hpp"
#include "stochkin/rng.hpp"
#include "support/test_models.hpp"

using namespace stochkin;

TEST_CASE("identical chains collapse the between-chain variance") {
  std::vector<double> v(100);
  Stream s(1, 0);
  for (double& x : v) x = s.next_normal();
  const ChainSet set{{v, v}};
  const double n = 100.0;
  CHECK(gelman_rubin(set) == doctest::Approx(std::sqrt((n - 1) / n)).epsilon(1e-12));
}

TEST_CASE("chains from the same distribution have R near 1") {
  const int n = 10'000;
  std::vector<std::vector<double>> chains(2, std::vector<double>(n));
  for (int c = 0; c < 2; ++c) {
    Stream s(2, static_cast<std::uint64_t>(c));
    for (int i = 0; i < n; ++i) chains[c][i] = s.next_normal();
  }
  CHECK(gelman_rubin(ChainSet{chains}) < 1.05);
}

TEST_CASE("separated chains have R far above 1.1") {
  const int n = 10'000;
  std::vector<std::vector<double>> chains(2, std::vector<double>(n));
  Stream s(3, 0);
  for (int i = 0; i < n; ++i) {
    chains[0][i] = s.next_normal();
    chains[1][i] = 100.0 + s.next_normal();
  }
  CHECK(gelman_rubin(ChainSet{chains}) > 10.0);
}

TEST_CASE("gelman_rubin is affine invariant") {
  const int n = 500;
  std::vector<std::vector<double>> chains(3, std::vector<double>(n));
  for (int c = 0; c < 3; ++c) {
    Stream s(4, static_cast<std::uint64_t>(c));
    for (int i = 0; i < n; ++i) chains[c][i] = s.next_exponential(0.5);
  }
  const double base = gelman_rubin(ChainSet{chains});
  for (auto& chain : chains)
    for (double& x : chain) x = -2.5 * x + 7.0;
  CHECK(gelman_rubin(ChainSet{chains}) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("degenerate and malformed chain sets are rejected") {
  const std::vector<double> constant(50, 3.0);
  CHECK_THROWS_AS(gelman_rubin(ChainSet{{constant, constant}}),
                  DegenerateVarianceError);
  CHECK_THROWS_AS(gelman_rubin(ChainSet{{constant}}), ValidationError);
  CHECK_THROWS_AS(gelman_rubin(ChainSet{{{1.0, 2.0}, {1.0, 2.0}}}),
                  ValidationError);  // shorter than 10
  CHECK_THROWS_AS(gelman_rubin(ChainSet{{constant, std::vector<double>(49, 1.0)}}),
                  ValidationError);
}

TEST_CASE("quantiles interpolate linearly between order statistics") {
  std::vector<double> ramp(100);
  for (int i = 0; i < 100; ++i) ramp[i] = i + 1.0;
  CHECK(quantile(ramp, 0.5) == doctest::Approx(50.5));
  CHECK(quantile(ramp, 0.0) == 1.0);
  CHECK(quantile(ramp, 1.0) == 100.0);

  const std::vector<double> constant(7, 3.25);
  for (double q : {0.0, 0.31, 0.5, 0.97, 1.0})
    CHECK(quantile(constant, q) == 3.25);

  CHECK_THROWS_AS(quantile(std::vector<double>{}, 0.5), ValidationError);
  CHECK_THROWS_AS(quantile(ramp, 1.5), ContractError);
}

TEST_CASE("quantiles are monotone in the level") {
  Stream s(5, 0);
  std::vector<double> samples(333);
  for (double& x : samples) x = s.next_normal();
  double last = -1e300;
  for (double q = 0.0; q <= 1.0; q += 0.05) {
    const double value = quantile(samples, q);
    CHECK(value >= last);
    last = value;
  }
}

TEST_CASE("summarize returns the mean and requested quantiles") {
  std::vector<double> ramp(100);
  for (int i = 0; i < 100; ++i) ramp[i] = i + 1.0;
  const std::vector<double> levels = {0.025, 0.5, 0.975};
  const Summary s = summarize(ramp, levels);
  CHECK(s.mean == doctest::Approx(50.5));
  CHECK(s.quantiles[1] == doctest::Approx(50.5));
  CHECK(s.quantiles[0] < s.quantiles[2]);
}

TEST_CASE("histograms bin every sample") {
  const std::vector<double> xs = {0.0, 0.1, 0.5, 0.9, 1.0};
  const auto bins = histogram(xs, 2);
  REQUIRE(bins.size() == 2);
  CHECK(bins[0].count + bins[1].count == xs.size());
  CHECK(bins[0].left == 0.0);
  CHECK(bins[1].right == 1.0);

  const auto degenerate = histogram(std::vector<double>{2.0, 2.0}, 3);
  std::uint64_t total = 0;
  for (const auto& b : degenerate) total += b.count;
  CHECK(total == 2);
}

namespace {

std::vector<PosteriorSample> small_run(const ReactionNetwork& net,
                                       const Observations& obs,
                                       std::uint64_t seed, int retained) {
  const std::vector<GammaPrior> priors(net.reaction_count(), GammaPrior{1.0, 1.0});
  DaMcmc mcmc(net, obs, priors, SamplerConfig{}, seed);
  RunOptions options;
  options.burn_in = 20;
  options.iterations = static_cast<std::uint64_t>(retained);
  options.theta_init.theta.assign(net.reaction_count(), 1.0);
  return mcmc.run_chain(options);
}

}  // namespace

TEST_CASE("trajectory bands collapse to the data at observation times") {
  const ReactionNetwork net = parse_network(test_models::kExchange3);
  Observations obs;
  obs.times = {0.0, 1.0, 2.0};
  obs.states = {{3, 0}, {1, 2}, {2, 1}};
  const auto samples = small_run(net, obs, 11, 60);

  const std::vector<double> grid = {0.0, 0.5, 1.0, 1.7, 2.0};
  const TrajectoryBand band = trajectory_bands(samples, net, obs, grid, 0.025, 0.975);

  // Grid points 0, 2, 4 are observation times.
  for (const auto& [g, obs_idx] : std::vector<std::pair<std::size_t, std::size_t>>{
           {0, 0}, {2, 1}, {4, 2}}) {
    for (std::size_t s = 0; s < net.species_count(); ++s) {
      CHECK(band.lower[s][g] == double(obs.states[obs_idx][s]));
      CHECK(band.upper[s][g] == double(obs.states[obs_idx][s]));
      CHECK(band.median[s][g] == double(obs.states[obs_idx][s]));
    }
  }
  // Path-level conservation A + B = 3 shows up as mirrored quantiles.
  for (std::size_t g = 0; g < grid.size(); ++g) {
    CHECK(band.lower[0][g] + band.upper[1][g] == 3.0);
    CHECK(band.upper[0][g] + band.lower[1][g] == 3.0);
    CHECK(band.lower[0][g] <= band.median[0][g]);
    CHECK(band.median[0][g] <= band.upper[0][g]);
  }
}

TEST_CASE("a single sample gives a zero-width band") {
  const ReactionNetwork net = parse_network(test_models::kExchange3);
  Observations obs;
  obs.times = {0.0, 1.0};
  obs.states = {{3, 0}, {2, 1}};
  const auto samples = small_run(net, obs, 12, 1);
  REQUIRE(samples.size() == 1);
  const std::vector<double> grid = {0.25, 0.75};
  const TrajectoryBand band = trajectory_bands(samples, net, obs, grid, 0.025, 0.975);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t g = 0; g < grid.size(); ++g) {
      CHECK(band.lower[s][g] == band.median[s][g]);
      CHECK(band.median[s][g] == band.upper[s][g]);
    }
}

TEST_CASE("band grid must stay within the observation window") {
  const ReactionNetwork net = parse_network(test_models::kExchange3);
  Observations obs;
  obs.times = {0.0, 1.0};
  obs.states = {{3, 0}, {2, 1}};
  const auto samples = small_run(net, obs, 13, 1);
  const std::vector<double> bad = {0.5, 1.5};
  CHECK_THROWS_AS(trajectory_bands(samples, net, obs, bad, 0.025, 0.975),
                  ContractError);
}
