// stochkin: simulate / infer / oracle / bench / diagnose drivers around the
// core library. Every primary output file is byte-identical across reruns
// with the same inputs and seed; wall-clock timings live only in telemetry.

#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "stochkin/bench.hpp"
#include "stochkin/cme.hpp"
#include "stochkin/damcmc.hpp"
#include "stochkin/diagnostics.hpp"
#include "stochkin/errors.hpp"
#include "stochkin/io.hpp"
#include "stochkin/version.hpp"

namespace fs = std::filesystem;
using namespace stochkin;

namespace {

// Exit codes, also listed in the README: 0 ok, 2 config, 3 ingestion,
// 4 impropriety, 5 infeasible interval, 6 runaway simulation.
enum ExitCode {
  kOk = 0,
  kFailure = 1,
  kConfig = 2,
  kIngestion = 3,
  kImpropriety = 4,
  kInfeasible = 5,
  kRunaway = 6,
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write to '" + path.string() + "'");
  return out;
}

struct InferCli {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

int run_infer(const InferCli& cli) {
  RunConfig config;
  if (!cli.config_path.empty()) config = parse_config_file(cli.config_path);
  for (const auto& [key, value] : cli.overrides)
    apply_config_override(config, key, value);
  config.validate();

  const ReactionNetwork network = load_network(config.model_path);
  const Observations observations =
      load_observations(network, config.data_path);
  const std::vector<GammaPrior> priors =
      parse_priors(config.prior_spec, network.reaction_count());

  SamplerConfig sampler;
  sampler.batch_size = config.batch_size;
  sampler.max_attempts = config.max_attempts;
  sampler.max_events = config.max_events;
  sampler.mode = config.sampler_mode();
  sampler.worker_count = config.worker_count;

  RunOptions options;
  options.burn_in = config.burn_in;
  options.iterations = config.iterations;
  options.thin = config.thin;
  if (!config.theta_init.empty())
    options.theta_init = parse_theta(config.theta_init, network.reaction_count());

  DaMcmc mcmc(network, observations, priors, sampler, config.master_seed);
  const auto samples = mcmc.run_chain(options);

  const std::string header =
      metadata_header(config.master_seed, config.config_hash());
  fs::create_directories(config.output_dir);
  const fs::path dir(config.output_dir);
  {
    auto out = open_output(dir / "posterior.csv");
    write_posterior_csv(out, header, samples, network.reaction_count());
  }
  {
    auto out = open_output(dir / "segments.csv");
    write_segments_csv(out, header, samples);
  }
  {
    auto out = open_output(dir / "summary.csv");
    write_summary_csv(out, header, samples, network);
  }
  {
    auto out = open_output(dir / "telemetry.csv");
    write_telemetry_csv(out, header, mcmc.telemetry());
  }
  std::cout << "retained " << samples.size() << " samples; outputs in "
            << dir.string() << "\n";
  return kOk;
}

int run_simulate(const std::string& model_path, const std::string& theta_text,
                 double t_start, double t_end, std::uint64_t seed,
                 std::uint64_t paths, std::uint64_t max_events,
                 const std::string& out_dir) {
  if (!(t_end > t_start) && paths > 0)
    throw ConfigError("t-end must exceed t-start");
  const ReactionNetwork network = load_network(model_path);
  if (!network.initial_state)
    throw ConfigError("model file must declare an init: line for simulate");
  const RateParams theta = parse_theta(theta_text, network.reaction_count());

  fs::create_directories(out_dir);
  RunConfig provenance;  // only for the metadata hash
  provenance.model_path = model_path;
  provenance.data_path = model_path;
  provenance.master_seed = seed;
  provenance.theta_init = theta_text;
  const std::string header = metadata_header(seed, provenance.config_hash());

  SimulateOptions options;
  options.mode = RecorderMode::trajectory;
  options.max_events = max_events;
  for (std::uint64_t k = 0; k < paths; ++k) {
    Stream stream(seed, k);
    const auto result = simulate(network, theta, *network.initial_state,
                                 t_start, t_end, stream, options);
    auto out = open_output(fs::path(out_dir) /
                           ("path_" + std::to_string(k) + ".csv"));
    write_trajectory_csv(out, header, network, *result.trajectory);
  }
  std::cout << "wrote " << paths << " trajectories to " << out_dir << "\n";
  return kOk;
}

int run_oracle(const std::string& model_path, const std::string& theta_text,
               double t, const std::string& x0_text,
               const std::string& end_text, double bridge_at,
               std::size_t cap, bool allow_truncation) {
  const ReactionNetwork network = load_network(model_path);
  const RateParams theta = parse_theta(theta_text, network.reaction_count());
  SpeciesState x0;
  if (!x0_text.empty()) {
    x0 = parse_state(network, x0_text);
  } else if (network.initial_state) {
    x0 = *network.initial_state;
  } else {
    throw ConfigError("no initial state: pass --x0 or add an init: line");
  }

  EnumerateOptions options;
  options.cap = cap;
  options.allow_truncation = allow_truncation;
  CmeSolver solver(network, theta, x0, options);

  auto print_distribution = [&](const std::vector<double>& p) {
    std::cout << "state,probability\n";
    for (std::size_t z = 0; z < p.size(); ++z) {
      if (p[z] == 0.0) continue;
      const auto& state = solver.space().states[z];
      for (std::size_t i = 0; i < state.size(); ++i)
        std::cout << (i ? " " : "") << state[i];
      std::cout << ',' << format_double(p[z]) << '\n';
    }
  };

  if (end_text.empty()) {
    print_distribution(solver.transient_distribution(t));
    return kOk;
  }
  const SpeciesState end = parse_state(network, end_text);
  if (bridge_at > 0.0) {
    print_distribution(solver.bridge_distribution(end, t, bridge_at));
  } else {
    std::cout << "endpoint_probability,"
              << format_double(solver.endpoint_probability(end, t)) << "\n";
  }
  return kOk;
}

int run_bench(const std::string& amdahl, const std::string& model_path,
              const std::string& theta_text, std::size_t sweep_index,
              const std::vector<double>& grid, double t0, double t1,
              const std::string& start_text, const std::string& end_text,
              std::uint64_t replicates, const std::vector<unsigned>& workers,
              std::uint64_t seed, std::uint64_t max_attempts,
              const std::string& out_path) {
  if (!amdahl.empty()) {
    const auto parts = parse_theta(amdahl, 2);  // reuse: two positive numbers
    std::cout << format_double(amdahl_speedup(
                     parts.theta[0], static_cast<unsigned>(parts.theta[1])))
              << "\n";
    return kOk;
  }
  const ReactionNetwork network = load_network(model_path);
  SweepSpec spec;
  spec.theta_base = parse_theta(theta_text, network.reaction_count());
  spec.swept_index = sweep_index;
  spec.grid = grid;
  spec.problem.start_state = parse_state(network, start_text);
  spec.problem.end_state = parse_state(network, end_text);
  spec.problem.t_start = t0;
  spec.problem.t_end = t1;
  spec.replicates = replicates;
  spec.master_seed = seed;
  spec.sampler.max_attempts = max_attempts;

  const auto table = run_sweep(network, spec, workers);

  std::string header = metadata_header(seed, 0);
  header += "# cores = " +
            std::to_string(std::thread::hardware_concurrency()) + "\n";
  if (out_path.empty()) {
    write_sweep_csv(std::cout, header, table);
  } else {
    auto out = open_output(out_path);
    write_sweep_csv(out, header, table);
  }
  return kOk;
}

int run_diagnose(const std::vector<std::string>& posterior_paths,
                 std::size_t hist_bins, const std::string& out_dir,
                 const std::string& model_path, const std::string& data_path,
                 const std::string& segments_path, double grid_step,
                 const std::string& quantile_pair) {
  if (!segments_path.empty()) {
    // Trajectory band mode.
    if (model_path.empty() || data_path.empty() || posterior_paths.size() != 1)
      throw ConfigError(
          "--bands needs --model, --data, and exactly one --posterior");
    const ReactionNetwork network = load_network(model_path);
    const Observations observations = load_observations(network, data_path);
    const auto columns = load_chain_columns(posterior_paths[0]);
    const auto stored = load_segments_csv(segments_path);

    const auto& iterations = columns.at("iteration");
    std::vector<PosteriorSample> samples(iterations.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
      samples[k].iteration = static_cast<std::uint64_t>(iterations[k]);
      samples[k].theta.theta.resize(network.reaction_count());
      for (std::size_t j = 0; j < network.reaction_count(); ++j)
        samples[k].theta.theta[j] =
            columns.at("theta_" + std::to_string(j + 1))[k];
      samples[k].segments.resize(observations.interval_count());
      for (std::size_t i = 0; i < observations.interval_count(); ++i)
        samples[k].segments[i].initial_stream_state =
            stored.at({samples[k].iteration, i});
    }

    const auto levels = parse_theta(quantile_pair, 2);  // two numbers in (0,1)
    std::vector<double> grid;
    for (double t = observations.times.front(); t <= observations.times.back();
         t += grid_step)
      grid.push_back(t);
    const TrajectoryBand band =
        trajectory_bands(samples, network, observations, grid,
                         levels.theta[0], levels.theta[1]);
    if (out_dir.empty()) {
      write_band_csv(std::cout, "", band, network);
    } else {
      fs::create_directories(out_dir);
      auto out = open_output(fs::path(out_dir) / "bands.csv");
      write_band_csv(out, "", band, network);
    }
    return kOk;
  }

  if (posterior_paths.empty())
    throw ConfigError("diagnose needs at least one --posterior file");
  std::vector<std::map<std::string, std::vector<double>>> chains;
  for (const auto& path : posterior_paths)
    chains.push_back(load_chain_columns(path));

  std::cout << "quantity,rhat,mean,q2.5,q50,q97.5\n";
  const std::array<double, 3> levels = {0.025, 0.5, 0.975};
  for (const auto& [name, first_chain] : chains.front()) {
    if (name == "iteration") continue;
    std::vector<double> pooled = first_chain;
    ChainSet set;
    set.chains.push_back(first_chain);
    for (std::size_t c = 1; c < chains.size(); ++c) {
      const auto& chain = chains[c].at(name);
      set.chains.push_back(chain);
      pooled.insert(pooled.end(), chain.begin(), chain.end());
    }
    std::string rhat = "nan";
    if (chains.size() >= 2) {
      try {
        rhat = format_double(gelman_rubin(set));
      } catch (const DegenerateVarianceError&) {
        rhat = "degenerate";
      }
    }
    const Summary s = summarize(pooled, levels);
    std::cout << name << ',' << rhat << ',' << format_double(s.mean);
    for (double q : s.quantiles) std::cout << ',' << format_double(q);
    std::cout << '\n';

    if (hist_bins > 0) {
      const auto bins = histogram(pooled, hist_bins);
      const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
      fs::create_directories(dir);
      auto out = open_output(dir / ("hist_" + name + ".csv"));
      write_histogram_csv(out, "", bins);
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolName) + " " + kToolVersion +
               ": Bayesian inference for stochastic chemical kinetics"};
  app.require_subcommand(1);

  // simulate
  auto* simulate_cmd =
      app.add_subcommand("simulate", "forward-simulate SSA trajectories");
  std::string sim_model, sim_theta, sim_out = ".";
  double sim_t_start = 0.0, sim_t_end = 0.0;
  std::uint64_t sim_seed = 1, sim_paths = 1, sim_max_events = 10'000'000;
  simulate_cmd->add_option("--model", sim_model)->required();
  simulate_cmd->add_option("--theta", sim_theta)->required();
  simulate_cmd->add_option("--t-end", sim_t_end)->required();
  simulate_cmd->add_option("--t-start", sim_t_start);
  simulate_cmd->add_option("--seed", sim_seed);
  simulate_cmd->add_option("--paths", sim_paths);
  simulate_cmd->add_option("--max-events", sim_max_events);
  simulate_cmd->add_option("--out", sim_out);

  // infer
  auto* infer_cmd = app.add_subcommand("infer", "run the DA-MCMC sampler");
  InferCli infer_cli;
  infer_cmd->add_option("--config", infer_cli.config_path);
  for (const char* key :
       {"model", "data", "prior", "theta_init", "burn_in", "iterations",
        "thin", "master_seed", "worker_count", "mode", "max_attempts",
        "batch_size", "max_events", "output_dir"}) {
    infer_cmd->add_option_function<std::string>(
        "--" + std::string(key),
        [&infer_cli, key = std::string(key)](const std::string& value) {
          infer_cli.overrides.emplace_back(key, value);
        });
  }

  // oracle
  auto* oracle_cmd =
      app.add_subcommand("oracle", "exact CME transient / endpoint / bridge");
  std::string orc_model, orc_theta, orc_x0, orc_end;
  double orc_t = 0.0, orc_bridge_at = 0.0;
  std::size_t orc_cap = 20'000;
  bool orc_truncate = false;
  oracle_cmd->add_option("--model", orc_model)->required();
  oracle_cmd->add_option("--theta", orc_theta)->required();
  oracle_cmd->add_option("--t", orc_t)->required();
  oracle_cmd->add_option("--x0", orc_x0);
  oracle_cmd->add_option("--end", orc_end);
  oracle_cmd->add_option("--bridge-at", orc_bridge_at);
  oracle_cmd->add_option("--cap", orc_cap);
  oracle_cmd->add_flag("--allow-truncation", orc_truncate);

  // bench
  auto* bench_cmd =
      app.add_subcommand("bench", "rejection-difficulty sweep / Amdahl query");
  std::string ben_amdahl, ben_model, ben_theta, ben_start, ben_end, ben_out;
  std::size_t ben_index = 0;
  std::vector<double> ben_grid;
  double ben_t0 = 0.0, ben_t1 = 1.0;
  std::uint64_t ben_replicates = 100, ben_seed = 1,
                ben_max_attempts = 10'000'000;
  std::vector<unsigned> ben_workers = {1};
  bench_cmd->add_option("--amdahl", ben_amdahl, "P,C (prints the bound)");
  bench_cmd->add_option("--model", ben_model);
  bench_cmd->add_option("--theta", ben_theta);
  bench_cmd->add_option("--sweep-index", ben_index);
  bench_cmd->add_option("--grid", ben_grid)->delimiter(',');
  bench_cmd->add_option("--t0", ben_t0);
  bench_cmd->add_option("--t1", ben_t1);
  bench_cmd->add_option("--start", ben_start);
  bench_cmd->add_option("--end", ben_end);
  bench_cmd->add_option("--replicates", ben_replicates);
  bench_cmd->add_option("--workers", ben_workers)->delimiter(',');
  bench_cmd->add_option("--seed", ben_seed);
  bench_cmd->add_option("--max-attempts", ben_max_attempts);
  bench_cmd->add_option("--out", ben_out);

  // diagnose
  auto* diag_cmd =
      app.add_subcommand("diagnose", "R-hat, summaries, histograms, bands");
  std::vector<std::string> diag_posteriors;
  std::size_t diag_hist_bins = 0;
  std::string diag_out, diag_model, diag_data, diag_segments;
  double diag_grid_step = 1.0;
  std::string diag_quantiles = "0.025,0.975";
  bool diag_bands = false;
  diag_cmd->add_option("--posterior", diag_posteriors);
  diag_cmd->add_option("--hist-bins", diag_hist_bins);
  diag_cmd->add_option("--out", diag_out);
  diag_cmd->add_flag("--bands", diag_bands);
  diag_cmd->add_option("--model", diag_model);
  diag_cmd->add_option("--data", diag_data);
  diag_cmd->add_option("--segments", diag_segments);
  diag_cmd->add_option("--grid-step", diag_grid_step);
  diag_cmd->add_option("--quantiles", diag_quantiles);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (simulate_cmd->parsed())
      return run_simulate(sim_model, sim_theta, sim_t_start, sim_t_end,
                          sim_seed, sim_paths, sim_max_events, sim_out);
    if (infer_cmd->parsed()) return run_infer(infer_cli);
    if (oracle_cmd->parsed())
      return run_oracle(orc_model, orc_theta, orc_t, orc_x0, orc_end,
                        orc_bridge_at, orc_cap, orc_truncate);
    if (bench_cmd->parsed())
      return run_bench(ben_amdahl, ben_model, ben_theta, ben_index, ben_grid,
                       ben_t0, ben_t1, ben_start, ben_end, ben_replicates,
                       ben_workers, ben_seed, ben_max_attempts, ben_out);
    if (diag_cmd->parsed()) {
      if (diag_bands && diag_segments.empty())
        throw ConfigError("--bands needs --segments");
      return run_diagnose(diag_posteriors, diag_hist_bins, diag_out,
                          diag_model, diag_data, diag_segments, diag_grid_step,
                          diag_quantiles);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ContractError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ImproprietyError& e) {
    std::cerr << "impropriety: " << e.what() << "\n";
    return kImpropriety;
  } catch (const InfeasibleIntervalError& e) {
    std::cerr << "infeasible interval: " << e.what() << "\n";
    return kInfeasible;
  } catch (const RunawaySimulationError& e) {
    std::cerr << "runaway simulation: " << e.what() << "\n";
    return kRunaway;
  } catch (const ParseError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kIngestion;
  } catch (const ValidationError& e) {
    std::cerr << "ingestion error: " << e.what() << "\n";
    return kIngestion;
  } catch (const IngestionError& e) {
    std::cerr << "ingestion error: " << e.what() << "\n";
    return kIngestion;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
