#ifndef STOCHKIN_IO_HPP
#define STOCHKIN_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stochkin/bench.hpp"
#include "stochkin/damcmc.hpp"
#include "stochkin/diagnostics.hpp"
#include "stochkin/network.hpp"

namespace stochkin {

std::string read_file(const std::string& path);

ReactionNetwork load_network(const std::string& path);

/// Fills unobserved species from the declared conservation laws. `observed`
/// marks which species columns were present; states carry the observed
/// values (unobserved entries ignored). Throws IngestionError when the laws
/// do not determine the missing species uniquely as non-negative integers,
/// naming an unresolved species.
Observations close_observations(const ReactionNetwork& network,
                                const std::vector<bool>& observed,
                                const std::vector<double>& times,
                                const std::vector<SpeciesState>& partial_states);

/// Comma-separated observations: header `time,<species>...` (a subset of
/// species is allowed when conservation laws close the rest), `#` comments.
Observations load_observations(const ReactionNetwork& network,
                               const std::string& path);
Observations parse_observations(const ReactionNetwork& network,
                                std::istream& in, const std::string& origin);

/// Prior specification text: "improper", one "alpha,beta" pair applied to
/// every reaction, or per-reaction pairs separated by ';'.
std::vector<GammaPrior> parse_priors(const std::string& text,
                                     std::size_t reaction_count);

/// Comma-separated positive reals, one per reaction.
RateParams parse_theta(const std::string& text, std::size_t reaction_count);

/// Space- or comma-separated `name=count` pairs; unspecified species are 0.
SpeciesState parse_state(const ReactionNetwork& network,
                         const std::string& text);

/// Run configuration: plain-text key=value file plus flag overrides
/// (overrides win). Unknown keys are errors.
struct RunConfig {
  std::string model_path;
  std::string data_path;
  std::string prior_spec = "improper";
  std::string theta_init;  // empty means 1.0 per reaction
  std::uint64_t burn_in = 0;
  std::uint64_t iterations = 0;
  std::uint64_t thin = 1;
  std::uint64_t master_seed = 1;
  unsigned worker_count = 1;
  std::string mode = "deterministic";
  std::uint64_t max_attempts = 10'000'000;
  std::uint64_t batch_size = 0;  // 0: 4 * worker_count
  std::uint64_t max_events = 10'000'000;
  std::string output_dir = ".";

  SamplerMode sampler_mode() const;
  void validate() const;

  /// Hash over the inference-relevant fields (everything except
  /// worker_count and output_dir, which cannot change results in
  /// deterministic mode). Stamped into output metadata.
  std::uint64_t config_hash() const;
};

RunConfig parse_config_file(const std::string& path);
void apply_config_override(RunConfig& config, const std::string& key,
                           const std::string& value);

/// All emitted files start with `# <tool> <version>`, `# seed = ...`,
/// `# config = <hex hash>` comment lines; no timestamps, so outputs are
/// byte-identical across reruns.
std::string metadata_header(std::uint64_t seed, std::uint64_t config_hash);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double value);

void write_posterior_csv(std::ostream& out, const std::string& header,
                         std::span<const PosteriorSample> samples,
                         std::size_t reaction_count);
void write_segments_csv(std::ostream& out, const std::string& header,
                        std::span<const PosteriorSample> samples);
void write_summary_csv(std::ostream& out, const std::string& header,
                       std::span<const PosteriorSample> samples,
                       const ReactionNetwork& network);
void write_telemetry_csv(std::ostream& out, const std::string& header,
                         std::span<const IntervalTelemetry> telemetry);
void write_sweep_csv(std::ostream& out, const std::string& header,
                     std::span<const SweepPoint> table);
void write_band_csv(std::ostream& out, const std::string& header,
                    const TrajectoryBand& band, const ReactionNetwork& network);
void write_histogram_csv(std::ostream& out, const std::string& header,
                         std::span<const HistogramBin> bins);
void write_trajectory_csv(std::ostream& out, const std::string& header,
                          const ReactionNetwork& network,
                          const Trajectory& trajectory);

/// Loads named columns from a posterior CSV produced by `infer`
/// (for the diagnose subcommand). Returns column name -> samples.
std::map<std::string, std::vector<double>> load_chain_columns(
    const std::string& path);

/// Loads the segments sidecar: rows keyed by (iteration, interval).
std::map<std::pair<std::uint64_t, std::uint64_t>, StreamState> load_segments_csv(
    const std::string& path);

}  // namespace stochkin

#endif
