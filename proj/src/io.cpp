#include "stochkin/io.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "stochkin/errors.hpp"
#include "stochkin/version.hpp"

namespace stochkin {

namespace {

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 1469598103934665603ull) {
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(trim(field));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IngestionError("cannot parse " + what + " from '" + s + "'");
  }
}

std::uint64_t to_u64(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " from '" + s + "'");
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ReactionNetwork load_network(const std::string& path) {
  return parse_network(read_file(path));
}

Observations close_observations(
    const ReactionNetwork& network, const std::vector<bool>& observed,
    const std::vector<double>& times,
    const std::vector<SpeciesState>& partial_states) {
  const std::size_t n_species = network.species_count();
  if (observed.size() != n_species)
    throw ContractError("close_observations: mask length mismatch");

  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < n_species; ++i)
    if (!observed[i]) missing.push_back(i);

  Observations obs;
  obs.times = times;
  obs.states.reserve(partial_states.size());

  const auto& laws = network.conservation_laws;
  for (std::size_t row = 0; row < partial_states.size(); ++row) {
    SpeciesState state = partial_states[row];
    if (!missing.empty()) {
      // Solve laws restricted to the unobserved species: A z = rhs.
      const std::size_t k = laws.size();
      const std::size_t u = missing.size();
      std::vector<std::vector<double>> a(k, std::vector<double>(u, 0.0));
      std::vector<double> rhs(k, 0.0);
      for (std::size_t l = 0; l < k; ++l) {
        rhs[l] = static_cast<double>(laws[l].value);
        for (std::size_t i = 0; i < n_species; ++i) {
          if (observed[i])
            rhs[l] -= static_cast<double>(laws[l].coefficients[i] * state[i]);
        }
        for (std::size_t c = 0; c < u; ++c)
          a[l][c] = static_cast<double>(laws[l].coefficients[missing[c]]);
      }

      // Gaussian elimination with partial pivoting; a unique solution needs
      // a pivot in every unobserved column.
      std::vector<std::size_t> pivot_rows;
      std::size_t rank_row = 0;
      std::vector<bool> has_pivot(u, false);
      for (std::size_t col = 0; col < u && rank_row < k; ++col) {
        std::size_t best = rank_row;
        for (std::size_t r = rank_row + 1; r < k; ++r)
          if (std::abs(a[r][col]) > std::abs(a[best][col])) best = r;
        if (std::abs(a[best][col]) < 1e-9) continue;
        std::swap(a[best], a[rank_row]);
        std::swap(rhs[best], rhs[rank_row]);
        for (std::size_t r = 0; r < k; ++r) {
          if (r == rank_row || a[r][col] == 0.0) continue;
          const double f = a[r][col] / a[rank_row][col];
          for (std::size_t c2 = col; c2 < u; ++c2) a[r][c2] -= f * a[rank_row][c2];
          rhs[r] -= f * rhs[rank_row];
        }
        has_pivot[col] = true;
        pivot_rows.push_back(col);
        ++rank_row;
      }
      for (std::size_t c = 0; c < u; ++c)
        if (!has_pivot[c])
          throw IngestionError(
              "conservation laws do not determine species '" +
              network.species_names[missing[c]] + "'; add the column or a law");
      for (std::size_t r = rank_row; r < k; ++r)
        if (std::abs(rhs[r]) > 1e-6)
          throw IngestionError("observation row " + std::to_string(row + 1) +
                               " is inconsistent with the conservation laws");

      // Back out values: after full elimination each pivot row has a single
      // nonzero in its pivot column.
      for (std::size_t r = 0; r < rank_row; ++r) {
        const std::size_t col = pivot_rows[r];
        const double z = rhs[r] / a[r][col];
        const double rounded = std::nearbyint(z);
        if (std::abs(z - rounded) > 1e-6 || rounded < 0.0)
          throw IngestionError(
              "closure for species '" + network.species_names[missing[col]] +
              "' at observation row " + std::to_string(row + 1) +
              "' is not a non-negative integer (" + std::to_string(z) + ")");
        state[missing[col]] = static_cast<Count>(rounded);
      }
    }
    obs.states.push_back(std::move(state));
  }
  obs.validate(network);
  return obs;
}

Observations parse_observations(const ReactionNetwork& network,
                                std::istream& in, const std::string& origin) {
  std::string line;
  std::vector<std::size_t> columns;  // species index per data column
  std::vector<bool> observed(network.species_count(), false);
  std::vector<double> times;
  std::vector<SpeciesState> states;
  bool header_seen = false;
  int line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (!header_seen) {
      if (fields.empty() || fields[0] != "time")
        throw IngestionError(origin + ": header must start with 'time'");
      for (std::size_t f = 1; f < fields.size(); ++f) {
        const auto idx = network.species_index(fields[f]);
        if (!idx)
          throw IngestionError(origin + ": unknown species column '" +
                               fields[f] + "'");
        if (observed[*idx])
          throw IngestionError(origin + ": duplicate column '" + fields[f] + "'");
        observed[*idx] = true;
        columns.push_back(*idx);
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != columns.size() + 1)
      throw IngestionError(origin + ": line " + std::to_string(line_no) +
                           ": expected " + std::to_string(columns.size() + 1) +
                           " fields");
    times.push_back(to_double(fields[0], "time"));
    SpeciesState state(network.species_count(), 0);
    for (std::size_t f = 0; f < columns.size(); ++f) {
      const double v = to_double(fields[f + 1], "count");
      if (v < 0.0 || v != std::nearbyint(v))
        throw IngestionError(origin + ": line " + std::to_string(line_no) +
                             ": counts must be non-negative integers");
      state[columns[f]] = static_cast<Count>(v);
    }
    states.push_back(std::move(state));
  }
  if (!header_seen) throw IngestionError(origin + ": missing header row");
  if (times.size() < 2)
    throw IngestionError(origin + ": need at least 2 observations");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i] < times[i + 1]))
      throw IngestionError(origin + ": observation times must be strictly increasing");

  try {
    return close_observations(network, observed, times, states);
  } catch (const ValidationError& e) {
    throw IngestionError(origin + ": " + e.what());
  }
}

Observations load_observations(const ReactionNetwork& network,
                               const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open '" + path + "'");
  return parse_observations(network, in, path);
}

std::vector<GammaPrior> parse_priors(const std::string& text,
                                     std::size_t reaction_count) {
  const std::string spec = trim(text);
  if (spec.empty() || spec == "improper")
    return std::vector<GammaPrior>(reaction_count, GammaPrior{0.0, 0.0});
  const auto groups = split(spec, ';');
  auto parse_pair = [](const std::string& pair) {
    const auto parts = split(pair, ',');
    if (parts.size() != 2)
      throw ConfigError("prior must be 'improper' or 'alpha,beta': '" + pair + "'");
    GammaPrior prior;
    prior.alpha = to_double(parts[0], "prior alpha");
    prior.beta = to_double(parts[1], "prior beta");
    if (prior.alpha < 0.0 || prior.beta < 0.0)
      throw ConfigError("prior parameters must be non-negative");
    return prior;
  };
  std::vector<GammaPrior> priors;
  if (groups.size() == 1) {
    priors.assign(reaction_count, parse_pair(groups[0]));
  } else {
    if (groups.size() != reaction_count)
      throw ConfigError("expected " + std::to_string(reaction_count) +
                        " prior groups, got " + std::to_string(groups.size()));
    for (const auto& g : groups) priors.push_back(parse_pair(g));
  }
  return priors;
}

RateParams parse_theta(const std::string& text, std::size_t reaction_count) {
  const auto parts = split(trim(text), ',');
  if (parts.size() != reaction_count)
    throw ConfigError("expected " + std::to_string(reaction_count) +
                      " rate parameters, got " + std::to_string(parts.size()));
  RateParams theta;
  for (const auto& p : parts) {
    const double v = to_double(p, "rate parameter");
    if (!(v > 0.0)) throw ConfigError("rate parameters must be positive");
    theta.theta.push_back(v);
  }
  return theta;
}

SpeciesState parse_state(const ReactionNetwork& network,
                         const std::string& text) {
  SpeciesState state(network.species_count(), 0);
  std::string normalized = text;
  for (char& c : normalized)
    if (c == ',') c = ' ';
  std::istringstream in(normalized);
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos)
      throw ConfigError("state entries must be name=count: '" + token + "'");
    const auto idx = network.species_index(token.substr(0, eq));
    if (!idx) throw ConfigError("unknown species '" + token.substr(0, eq) + "'");
    const double v = to_double(token.substr(eq + 1), "count");
    if (v < 0.0 || v != std::nearbyint(v))
      throw ConfigError("counts must be non-negative integers: '" + token + "'");
    state[*idx] = static_cast<Count>(v);
  }
  return state;
}

SamplerMode RunConfig::sampler_mode() const {
  if (mode == "deterministic") return SamplerMode::deterministic;
  if (mode == "fast") return SamplerMode::fast;
  throw ConfigError("mode must be 'deterministic' or 'fast', got '" + mode + "'");
}

void RunConfig::validate() const {
  (void)sampler_mode();
  if (model_path.empty()) throw ConfigError("model path is required");
  if (data_path.empty()) throw ConfigError("data path is required");
  if (thin == 0) throw ConfigError("thin must be >= 1");
  if (iterations > 0 && iterations < thin)
    throw ConfigError("iterations must be >= thin");
  if (worker_count < 1) throw ConfigError("worker_count must be >= 1");
  if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
}

std::uint64_t RunConfig::config_hash() const {
  std::ostringstream canon;
  canon << "prior=" << prior_spec << "\ntheta_init=" << theta_init
        << "\nburn_in=" << burn_in << "\niterations=" << iterations
        << "\nthin=" << thin << "\nmaster_seed=" << master_seed
        << "\nmode=" << mode << "\nmax_attempts=" << max_attempts
        << "\nbatch_size=" << batch_size << "\nmax_events=" << max_events
        << "\n";
  std::uint64_t h = fnv1a(canon.str());
  // Provenance covers file contents, not paths.
  if (!model_path.empty()) h = fnv1a(read_file(model_path), h);
  if (!data_path.empty()) h = fnv1a(read_file(data_path), h);
  return h;
}

void apply_config_override(RunConfig& config, const std::string& key,
                           const std::string& value) {
  if (key == "model") config.model_path = value;
  else if (key == "data") config.data_path = value;
  else if (key == "prior") config.prior_spec = value;
  else if (key == "theta_init") config.theta_init = value;
  else if (key == "burn_in") config.burn_in = to_u64(value, key);
  else if (key == "iterations") config.iterations = to_u64(value, key);
  else if (key == "thin") config.thin = to_u64(value, key);
  else if (key == "master_seed") config.master_seed = to_u64(value, key);
  else if (key == "worker_count")
    config.worker_count = static_cast<unsigned>(to_u64(value, key));
  else if (key == "mode") config.mode = value;
  else if (key == "max_attempts") config.max_attempts = to_u64(value, key);
  else if (key == "batch_size") config.batch_size = to_u64(value, key);
  else if (key == "max_events") config.max_events = to_u64(value, key);
  else if (key == "output_dir") config.output_dir = value;
  else throw ConfigError("unknown configuration key '" + key + "'");
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  RunConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ": line " + std::to_string(line_no) +
                        ": expected key = value");
    apply_config_override(config, trim(line.substr(0, eq)),
                          trim(line.substr(eq + 1)));
  }
  return config;
}

std::string metadata_header(std::uint64_t seed, std::uint64_t config_hash) {
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(config_hash));
  std::ostringstream out;
  out << "# " << kToolName << " " << kToolVersion << "\n";
  out << "# seed = " << seed << "\n";
  out << "# config = " << hex << "\n";
  return out.str();
}

std::string format_double(double value) {
  // Shortest decimal form that round-trips exactly.
  char buffer[64];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buffer, sizeof buffer, "%.*g", precision, value);
    if (std::strtod(buffer, nullptr) == value) return buffer;
  }
  return buffer;
}

void write_posterior_csv(std::ostream& out, const std::string& header,
                         std::span<const PosteriorSample> samples,
                         std::size_t reaction_count) {
  out << header << "iteration";
  for (std::size_t j = 1; j <= reaction_count; ++j) out << ",theta_" << j;
  out << ",K_D,K_M\n";
  for (const auto& sample : samples) {
    out << sample.iteration;
    for (double v : sample.theta.theta) out << ',' << format_double(v);
    out << ',' << format_double(sample.k_d) << ',' << format_double(sample.k_m)
        << '\n';
  }
}

void write_segments_csv(std::ostream& out, const std::string& header,
                        std::span<const PosteriorSample> samples) {
  out << header << "iteration,interval,stream_state\n";
  for (const auto& sample : samples)
    for (std::size_t i = 0; i < sample.segments.size(); ++i)
      out << sample.iteration << ',' << i << ','
          << sample.segments[i].initial_stream_state.to_hex() << '\n';
}

void write_summary_csv(std::ostream& out, const std::string& header,
                       std::span<const PosteriorSample> samples,
                       const ReactionNetwork& network) {
  out << header << "quantity,mean,q2.5,q50,q97.5\n";
  if (samples.empty()) return;
  const std::array<double, 3> levels = {0.025, 0.5, 0.975};
  const std::size_t m = network.reaction_count();
  auto emit = [&](const std::string& name, const std::vector<double>& values) {
    const Summary s = summarize(values, levels);
    out << name << ',' << format_double(s.mean);
    for (double q : s.quantiles) out << ',' << format_double(q);
    out << '\n';
  };
  std::vector<double> column(samples.size());
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < samples.size(); ++k)
      column[k] = samples[k].theta.theta[j];
    emit("theta_" + std::to_string(j + 1), column);
  }
  for (std::size_t k = 0; k < samples.size(); ++k) column[k] = samples[k].k_d;
  emit("K_D", column);
  for (std::size_t k = 0; k < samples.size(); ++k) column[k] = samples[k].k_m;
  emit("K_M", column);
}

void write_telemetry_csv(std::ostream& out, const std::string& header,
                         std::span<const IntervalTelemetry> telemetry) {
  out << header << "interval,calls,mean_attempts,total_wall_seconds\n";
  for (std::size_t i = 0; i < telemetry.size(); ++i)
    out << i << ',' << telemetry[i].calls << ','
        << format_double(telemetry[i].mean_attempts()) << ','
        << format_double(telemetry[i].total_wall_seconds) << '\n';
}

void write_sweep_csv(std::ostream& out, const std::string& header,
                     std::span<const SweepPoint> table) {
  out << header << "grid_value,workers,mean_attempts,mean_time,efficiency\n";
  for (const auto& point : table) {
    if (!point.feasible) out << "# infeasible: " << point.error << '\n';
    out << format_double(point.grid_value) << ',' << point.workers << ','
        << format_double(point.mean_attempts) << ','
        << format_double(point.parallel_seconds) << ','
        << format_double(point.efficiency) << '\n';
  }
}

void write_band_csv(std::ostream& out, const std::string& header,
                    const TrajectoryBand& band,
                    const ReactionNetwork& network) {
  out << header << "time,species,lower,median,upper\n";
  for (std::size_t g = 0; g < band.grid.size(); ++g)
    for (std::size_t s = 0; s < network.species_count(); ++s)
      out << format_double(band.grid[g]) << ',' << network.species_names[s]
          << ',' << format_double(band.lower[s][g]) << ','
          << format_double(band.median[s][g]) << ','
          << format_double(band.upper[s][g]) << '\n';
}

void write_histogram_csv(std::ostream& out, const std::string& header,
                         std::span<const HistogramBin> bins) {
  out << header << "bin_left,bin_right,count\n";
  for (const auto& bin : bins)
    out << format_double(bin.left) << ',' << format_double(bin.right) << ','
        << bin.count << '\n';
}

void write_trajectory_csv(std::ostream& out, const std::string& header,
                          const ReactionNetwork& network,
                          const Trajectory& trajectory) {
  out << header;
  out << "# initial: " << format_state(network, trajectory.initial_state)
      << "\n";
  out << "# window: " << format_double(trajectory.start_time) << " "
      << format_double(trajectory.end_time) << "\n";
  out << "time,reaction\n";
  for (const auto& event : trajectory.events)
    out << format_double(event.time) << ','
        << network.reactions[event.reaction].label << '\n';
}

std::map<std::string, std::vector<double>> load_chain_columns(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open '" + path + "'");
  std::map<std::string, std::vector<double>> columns;
  std::vector<std::string> names;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (!header_seen) {
      names = fields;
      for (const auto& n : names) columns[n];
      header_seen = true;
      continue;
    }
    if (fields.size() != names.size())
      throw IngestionError(path + ": ragged row");
    for (std::size_t f = 0; f < fields.size(); ++f)
      columns[names[f]].push_back(to_double(fields[f], names[f]));
  }
  if (!header_seen) throw IngestionError(path + ": missing header");
  return columns;
}

std::map<std::pair<std::uint64_t, std::uint64_t>, StreamState>
load_segments_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open '" + path + "'");
  std::map<std::pair<std::uint64_t, std::uint64_t>, StreamState> segments;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "iteration")
        throw IngestionError(path + ": unexpected segments header");
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) throw IngestionError(path + ": ragged row");
    const auto key = std::make_pair(to_u64(fields[0], "iteration"),
                                    to_u64(fields[1], "interval"));
    segments[key] = StreamState::from_hex(fields[2]);
  }
  return segments;
}

}  // namespace stochkin
