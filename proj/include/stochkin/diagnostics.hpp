#ifndef STOCHKIN_DIAGNOSTICS_HPP
#define STOCHKIN_DIAGNOSTICS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "stochkin/damcmc.hpp"
#include "stochkin/network.hpp"

namespace stochkin {

/// Parallel chains of one scalar quantity, equal lengths >= 10, >= 2 chains.
struct ChainSet {
  std::vector<std::vector<double>> chains;
};

/// Potential scale reduction factor in the classic two-component form
/// R = sqrt(((n-1)/n * W + B/n) / W), W the mean within-chain variance and
/// B the between-chain variance of chain means scaled by n. Throws
/// DegenerateVarianceError when W = 0.
double gelman_rubin(const ChainSet& set);

/// Empirical quantile with linear interpolation between order statistics:
/// position q*(n-1) in the sorted sample. q must lie in [0,1].
double quantile(std::span<const double> samples, double q);

struct Summary {
  double mean = 0.0;
  std::vector<double> quantiles;
};

Summary summarize(std::span<const double> samples,
                  std::span<const double> quantile_levels);

/// Point-wise trajectory quantiles over a time grid, per species.
struct TrajectoryBand {
  std::vector<double> grid;
  std::vector<std::vector<double>> lower;   // [species][grid point]
  std::vector<std::vector<double>> median;
  std::vector<std::vector<double>> upper;
};

/// Replays every sample's segments, evaluates the right-continuous
/// piecewise-constant state at each grid time, and returns point-wise
/// (lower_q, 0.5, upper_q) quantiles per species. Grid times must lie within
/// [t_0, t_n].
TrajectoryBand trajectory_bands(std::span<const PosteriorSample> samples,
                                const ReactionNetwork& network,
                                const Observations& observations,
                                std::span<const double> grid, double lower_q,
                                double upper_q);

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::uint64_t count = 0;
};

/// Equal-width bins over [min, max]; the right edge of the last bin is
/// inclusive.
std::vector<HistogramBin> histogram(std::span<const double> samples,
                                    std::size_t bin_count);

}  // namespace stochkin

#endif
