#include "stochkin/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "stochkin/errors.hpp"

namespace stochkin {

namespace {

double mean_of(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double variance_of(std::span<const double> xs, double mean) {
  double sum = 0.0;
  for (double x : xs) sum += (x - mean) * (x - mean);
  return sum / static_cast<double>(xs.size() - 1);
}

}  // namespace

double gelman_rubin(const ChainSet& set) {
  const std::size_t m = set.chains.size();
  if (m < 2) throw ValidationError("gelman_rubin: need at least 2 chains");
  const std::size_t n = set.chains.front().size();
  if (n < 10)
    throw ValidationError("gelman_rubin: need at least 10 samples per chain");
  for (const auto& chain : set.chains)
    if (chain.size() != n)
      throw ValidationError("gelman_rubin: chains must have equal lengths");

  std::vector<double> chain_means(m);
  double within = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    chain_means[j] = mean_of(set.chains[j]);
    within += variance_of(set.chains[j], chain_means[j]);
  }
  within /= static_cast<double>(m);
  if (within == 0.0)
    throw DegenerateVarianceError(
        "gelman_rubin: every chain is constant; R is undefined");

  const double grand_mean = mean_of(chain_means);
  double between = 0.0;
  for (double cm : chain_means)
    between += (cm - grand_mean) * (cm - grand_mean);
  between *= static_cast<double>(n) / static_cast<double>(m - 1);

  const double nd = static_cast<double>(n);
  return std::sqrt(((nd - 1.0) / nd * within + between / nd) / within);
}

double quantile(std::span<const double> samples, double q) {
  if (samples.empty()) throw ValidationError("quantile: empty sample vector");
  if (!(q >= 0.0 && q <= 1.0))
    throw ContractError("quantile: level must lie in [0,1]");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double position = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(position);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = position - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

Summary summarize(std::span<const double> samples,
                  std::span<const double> quantile_levels) {
  if (samples.empty()) throw ValidationError("summarize: empty sample vector");
  Summary summary;
  summary.mean = mean_of(samples);
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  summary.quantiles.reserve(quantile_levels.size());
  for (double q : quantile_levels) {
    if (!(q >= 0.0 && q <= 1.0))
      throw ContractError("summarize: quantile level must lie in [0,1]");
    const double position = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(position);
    if (lo + 1 >= sorted.size()) {
      summary.quantiles.push_back(sorted.back());
    } else {
      const double frac = position - static_cast<double>(lo);
      summary.quantiles.push_back(sorted[lo] +
                                  frac * (sorted[lo + 1] - sorted[lo]));
    }
  }
  return summary;
}

TrajectoryBand trajectory_bands(std::span<const PosteriorSample> samples,
                                const ReactionNetwork& network,
                                const Observations& observations,
                                std::span<const double> grid, double lower_q,
                                double upper_q) {
  if (samples.empty())
    throw ValidationError("trajectory_bands: no posterior samples");
  if (grid.empty()) throw ValidationError("trajectory_bands: empty grid");
  const std::size_t intervals = observations.interval_count();
  for (double t : grid)
    if (t < observations.times.front() || t > observations.times.back())
      throw ContractError("trajectory_bands: grid time outside observations");
  for (std::size_t g = 0; g + 1 < grid.size(); ++g)
    if (!(grid[g] < grid[g + 1]))
      throw ContractError("trajectory_bands: grid must be increasing");

  const std::size_t n_species = network.species_count();
  // values[s][g][sample]
  std::vector<std::vector<std::vector<double>>> values(
      n_species, std::vector<std::vector<double>>(
                     grid.size(), std::vector<double>(samples.size())));

  for (std::size_t k = 0; k < samples.size(); ++k) {
    const PosteriorSample& sample = samples[k];
    if (sample.segments.size() != intervals)
      throw ValidationError("trajectory_bands: segment count mismatch");
    std::size_t g = 0;
    for (std::size_t i = 0; i < intervals && g < grid.size(); ++i) {
      const IntervalProblem problem = observations.interval(i);
      const bool last = i + 1 == intervals;
      // Grid times belonging to this interval: [t_i, t_{i+1}), plus t_n.
      std::size_t g_end = g;
      while (g_end < grid.size() &&
             (grid[g_end] < problem.t_end || (last && grid[g_end] <= problem.t_end)))
        ++g_end;
      if (g_end == g) continue;
      const Trajectory trajectory =
          replay(network, sample.theta, problem,
                 sample.segments[i].initial_stream_state);
      for (; g < g_end; ++g) {
        const SpeciesState state = state_at(network, trajectory, grid[g]);
        for (std::size_t s = 0; s < n_species; ++s)
          values[s][g][k] = static_cast<double>(state[s]);
      }
    }
  }

  TrajectoryBand band;
  band.grid.assign(grid.begin(), grid.end());
  band.lower.resize(n_species);
  band.median.resize(n_species);
  band.upper.resize(n_species);
  for (std::size_t s = 0; s < n_species; ++s) {
    band.lower[s].resize(grid.size());
    band.median[s].resize(grid.size());
    band.upper[s].resize(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      band.lower[s][g] = quantile(values[s][g], lower_q);
      band.median[s][g] = quantile(values[s][g], 0.5);
      band.upper[s][g] = quantile(values[s][g], upper_q);
    }
  }
  return band;
}

std::vector<HistogramBin> histogram(std::span<const double> samples,
                                    std::size_t bin_count) {
  if (samples.empty()) throw ValidationError("histogram: empty sample vector");
  if (bin_count == 0) throw ContractError("histogram: need at least one bin");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it;
  double hi = *hi_it;
  if (hi == lo) hi = lo + 1.0;  // degenerate: single bin around the point
  const double width = (hi - lo) / static_cast<double>(bin_count);

  std::vector<HistogramBin> bins(bin_count);
  for (std::size_t b = 0; b < bin_count; ++b) {
    bins[b].left = lo + width * static_cast<double>(b);
    bins[b].right = lo + width * static_cast<double>(b + 1);
  }
  for (double x : samples) {
    auto b = static_cast<std::size_t>((x - lo) / width);
    if (b >= bin_count) b = bin_count - 1;
    ++bins[b].count;
  }
  return bins;
}

}  // namespace stochkin
