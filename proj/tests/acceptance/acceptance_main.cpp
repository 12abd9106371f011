// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion.
//
//   usage: acceptance_suite <path-to-stochkin-cli> <data-dir>
//
// The Michaelis-Menten reproduction (criteria 1, 2, 7) shares one full
// 2000 + 8000 iteration run of the shipped bundle; reruns of the CLI itself
// cover byte-identity (criterion 8) at a reduced iteration count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "stochkin/bench.hpp"
#include "stochkin/cme.hpp"
#include "stochkin/damcmc.hpp"
#include "stochkin/diagnostics.hpp"
#include "stochkin/endpoint.hpp"
#include "stochkin/errors.hpp"
#include "stochkin/io.hpp"

namespace fs = std::filesystem;
using namespace stochkin;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& description,
            const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << ": "
            << description << " (" << detail << ")" << std::endl;
  if (!pass) ++g_failures;
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / xs.size();
}

double sd_of(const std::vector<double>& xs, double mean) {
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / (xs.size() - 1));
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean_of(a), mb = mean_of(b);
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  return num / std::sqrt(da * db);
}

std::vector<double> ranks(const std::vector<double>& xs) {
  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
  std::vector<double> r(xs.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos)
    r[order[pos]] = static_cast<double>(pos + 1);
  return r;
}

double total_variation(const std::vector<double>& p,
                       const std::vector<double>& q) {
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return tv / 2.0;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct MmRun {
  std::vector<PosteriorSample> samples;
  double seconds = 0.0;
};

MmRun run_mm_chain(const ReactionNetwork& network, const Observations& obs) {
  SamplerConfig sampler;
  sampler.batch_size = 32;
  sampler.worker_count = std::max(2u, std::thread::hardware_concurrency());
  sampler.mode = SamplerMode::deterministic;

  const std::vector<GammaPrior> improper(3);  // p(theta) ~ 1/theta per rate
  DaMcmc mcmc(network, obs, improper, sampler, /*master_seed=*/1);
  RunOptions options;
  options.burn_in = 2'000;
  options.iterations = 8'000;
  options.theta_init = RateParams{{0.001, 0.2, 0.1}};

  MmRun run;
  const auto started = std::chrono::steady_clock::now();
  run.samples = mcmc.run_chain(options);
  run.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return run;
}

void criteria_1_2(const MmRun& run) {
  std::vector<double> k_m, theta_1, theta_2, theta_3;
  for (const auto& s : run.samples) {
    k_m.push_back(s.k_m);
    theta_1.push_back(s.theta.theta[0]);
    theta_2.push_back(s.theta.theta[1]);
    theta_3.push_back(s.theta.theta[2]);
  }

  const double km_lo = quantile(k_m, 0.025);
  const double km_hi = quantile(k_m, 0.975);
  const double t3_lo = quantile(theta_3, 0.025);
  const double t3_hi = quantile(theta_3, 0.975);
  // Overlap with the reported interval [246, 343] on at least half its width.
  const double overlap =
      std::max(0.0, std::min(km_hi, 343.0) - std::max(km_lo, 246.0));
  const bool contains_km = km_lo <= 300.0 && 300.0 <= km_hi;
  const bool overlaps = overlap >= (343.0 - 246.0) / 2.0;
  const bool contains_t3 = t3_lo <= 0.1 && 0.1 <= t3_hi;

  std::ostringstream detail;
  detail.precision(4);
  detail << "K_M 95% CI [" << km_lo << ", " << km_hi << "], overlap " << overlap
         << ", theta_3 CI [" << t3_lo << ", " << t3_hi << "], "
         << run.samples.size() << " samples in " << run.seconds << "s";
  report(1, contains_km && overlaps && contains_t3,
         "Michaelis-Menten reproduction", detail.str());

  const double corr = pearson(theta_1, theta_2);
  const double cv1 = sd_of(theta_1, mean_of(theta_1)) / mean_of(theta_1);
  const double cv3 = sd_of(theta_3, mean_of(theta_3)) / mean_of(theta_3);
  std::ostringstream detail2;
  detail2.precision(4);
  detail2 << "corr(theta_1,theta_2) = " << corr << ", CV(theta_3) = " << cv3
          << " vs CV(theta_1) = " << cv1;
  report(2, corr > 0.5 && cv3 < cv1, "identifiability structure",
         detail2.str());
}

void criterion_3() {
  const ReactionNetwork net = parse_network(
      "species: A B\nreaction: A -> B\nreaction: B -> A\nconserve: A + B = "
      "5\ninit: A=5\n");
  const RateParams theta{{1.1, 0.8}};
  const SpeciesState x0 = {4, 1};
  const double t = 0.9;

  CmeSolver oracle(net, theta, x0);
  const auto exact = oracle.transient_distribution(t);
  const int n = 100'000;
  std::vector<double> empirical(oracle.space().size(), 0.0);
  SimulateOptions options;
  options.mode = RecorderMode::none;
  for (int i = 0; i < n; ++i) {
    Stream stream(33, static_cast<std::uint64_t>(i));
    const auto result = simulate(net, theta, x0, 0.0, t, stream, options);
    empirical[*oracle.space().find(result.final_state)] += 1.0 / n;
  }
  const double tv = total_variation(exact, empirical);
  std::ostringstream detail;
  detail << "total variation " << tv << " over " << exact.size()
         << " states, " << n << " replicates";
  report(3, tv < 0.01, "SSA final-state distribution vs CME oracle",
         detail.str());
}

void criterion_4() {
  const ReactionNetwork net = parse_network(
      "species: A B\nreaction: A -> B\nreaction: B -> A\nconserve: A + B = "
      "3\ninit: A=3\n");
  const RateParams theta{{1.2, 0.9}};
  const SpeciesState x0 = {2, 1}, x1 = {1, 2};
  const double dt = 1.0;
  const IntervalProblem problem{x0, x1, 0.0, dt};

  CmeSolver oracle(net, theta, x0);
  const auto exact = oracle.bridge_distribution(x1, dt, dt / 2);

  bool all_pass = true;
  std::ostringstream detail;
  std::uint64_t salt = 0;
  for (const SamplerMode mode : {SamplerMode::deterministic, SamplerMode::fast}) {
    for (const unsigned workers : {1u, 8u}) {
      SamplerConfig config;
      config.mode = mode;
      config.worker_count = workers;
      EndpointSampler sampler(net, config);
      const int n = 10'000;
      std::vector<double> empirical(oracle.space().size(), 0.0);
      for (int c = 0; c < n; ++c) {
        const auto segment =
            sampler.sample_interval(theta, problem, 40 + salt, c);
        const Trajectory traj =
            replay(net, theta, problem, segment.initial_stream_state);
        empirical[*oracle.space().find(state_at(net, traj, dt / 2))] += 1.0 / n;
      }
      ++salt;
      const double tv = total_variation(exact, empirical);
      all_pass = all_pass && tv < 0.02;
      detail << (mode == SamplerMode::deterministic ? "det" : "fast") << "/w"
             << workers << " tv=" << tv << " ";
    }
  }
  report(4, all_pass, "endpoint-sampler bridge distribution", detail.str());
}

void criterion_5() {
  const ReactionNetwork net = parse_network("species: A\nreaction: -> A\ninit: A=0\n");
  SweepSpec spec;
  spec.theta_base = RateParams{{1.0}};
  spec.swept_index = 0;
  spec.grid = {0.5, 1.0, 2.0};
  spec.problem = IntervalProblem{{0}, {1}, 0.0, 1.0};
  spec.replicates = 1'500;
  spec.master_seed = 55;
  spec.timing_repeats = 1;
  const std::vector<unsigned> workers = {1};
  const auto table = run_sweep(net, spec, workers);

  bool all_pass = true;
  std::ostringstream detail;
  for (std::size_t g = 0; g < spec.grid.size(); ++g) {
    // p from the oracle rather than the pmf formula.
    EnumerateOptions options;
    options.cap = 400;
    options.allow_truncation = true;
    CmeSolver oracle(net, RateParams{{spec.grid[g]}}, {0}, options);
    const double p = oracle.endpoint_probability({1}, 1.0);
    const double se = std::sqrt((1.0 - p) / (p * p) / double(spec.replicates));
    const double gap = std::abs(table[g].mean_attempts - 1.0 / p);
    all_pass = all_pass && gap < 3 * se;
    detail << "theta=" << spec.grid[g] << ": " << table[g].mean_attempts
           << " vs 1/p=" << 1.0 / p << " (3se=" << 3 * se << ") ";
  }
  report(5, all_pass, "geometric attempt counts", detail.str());
}

void criterion_6() {
  const ReactionNetwork net =
      parse_network("species: A B\nreaction: A -> B\nreaction: B -> A\n");
  struct Case {
    GammaPrior prior;
    std::uint64_t r;
    double b;
  };
  const std::vector<Case> cases = {{{1.0, 1.0}, 3, 2.0},
                                   {{0.0, 0.0}, 40, 160.0}};
  bool all_pass = true;
  std::ostringstream detail;
  std::uint64_t salt = 0;
  for (const auto& c : cases) {
    const double shape = c.prior.alpha + double(c.r);
    const double rate = c.prior.beta + c.b;
    const std::vector<GammaPrior> priors = {c.prior, {1.0, 1.0}};
    const SufficientStats stats{{c.r, 1}, {c.b, 1.0}};
    Stream stream(60 + salt++, 0);
    const int n = 100'000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double draw = draw_theta(stats, priors, stream, net).theta[0];
      sum += draw;
      sumsq += draw * draw;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    const double true_mean = shape / rate;
    const double true_var = shape / (rate * rate);
    const double mean_tol = 3 * std::sqrt(true_var / n);
    // Var(S^2) ~ (mu4 - sigma^4)/n with mu4 = 3 a (a + 2) / b^4.
    const double mu4 = 3.0 * shape * (shape + 2.0) / std::pow(rate, 4);
    const double var_tol = 3 * std::sqrt((mu4 - true_var * true_var) / n);
    const bool ok = std::abs(mean - true_mean) < mean_tol &&
                    std::abs(var - true_var) < var_tol;
    all_pass = all_pass && ok;
    detail << "Gamma(" << shape << "," << rate << "): mean " << mean << "/"
           << true_mean << ", var " << var << "/" << true_var << " ";
  }
  report(6, all_pass, "conjugate draw moments", detail.str());
}

void criterion_7(const ReactionNetwork& network, const Observations& obs,
                 const MmRun& run) {
  std::size_t checked = 0, good = 0;
  for (std::size_t k = 0; k < run.samples.size(); k += 100) {  // 1% spot check
    const auto& sample = run.samples[k];
    bool sample_ok = true;
    for (std::size_t i = 0; i < sample.segments.size(); ++i) {
      try {
        const Trajectory traj =
            replay(network, sample.theta, obs.interval(i),
                   sample.segments[i].initial_stream_state);
        const SufficientStats stats = stats_from_trajectory(network, traj);
        sample_ok = sample_ok && stats.r == sample.segments[i].stats.r;
      } catch (const ReplayCorruptionError&) {
        sample_ok = false;
      }
    }
    ++checked;
    if (sample_ok) ++good;
  }
  std::ostringstream detail;
  detail << good << "/" << checked
         << " spot-checked samples replayed to their endpoints with "
            "bit-identical r";
  report(7, checked > 0 && good == checked, "seed-replay integrity",
         detail.str());
}

void criterion_8(const std::string& cli, const fs::path& data_dir,
                 const fs::path& work_dir) {
  const std::string config =
      (data_dir / "michaelis_menten.config").string();
  const std::string model = (data_dir / "michaelis_menten.model").string();
  const std::string data = (data_dir / "michaelis_menten_obs.csv").string();

  struct Run {
    unsigned workers;
    int repeat;
    fs::path dir;
  };
  std::vector<Run> runs = {{1, 0, {}}, {1, 1, {}}, {8, 0, {}}, {8, 1, {}}};
  bool all_ok = true;
  std::ostringstream detail;
  for (auto& run : runs) {
    run.dir = work_dir / ("det_w" + std::to_string(run.workers) + "_r" +
                          std::to_string(run.repeat));
    std::ostringstream cmd;
    cmd << '"' << cli << '"' << " infer --config \"" << config << "\""
        << " --model \"" << model << "\" --data \"" << data << "\""
        << " --burn_in 50 --iterations 200 --worker_count " << run.workers
        << " --output_dir \"" << run.dir.string() << "\" > /dev/null";
    const int status = std::system(cmd.str().c_str());
    if (status != 0) {
      all_ok = false;
      detail << "run failed (status " << status << ") ";
    }
  }
  if (all_ok) {
    for (const char* file : {"posterior.csv", "segments.csv", "summary.csv"}) {
      const std::string reference = read_bytes(runs[0].dir / file);
      if (reference.empty()) {
        all_ok = false;
        detail << file << " empty ";
        continue;
      }
      for (std::size_t r = 1; r < runs.size(); ++r)
        if (read_bytes(runs[r].dir / file) != reference) {
          all_ok = false;
          detail << file << " differs between runs 0 and " << r << " ";
        }
    }
    if (all_ok)
      detail << "4 infer runs (workers 1 and 8, twice each) byte-identical";
  }
  report(8, all_ok, "deterministic-mode byte-identical outputs", detail.str());
}

void criterion_9(const ReactionNetwork& network) {
  // Fig. 3 design on CPU cores: sweep theta_1 upward, measure attempts and
  // the serial/parallel wall-time ratio at 8 workers. Only the shape claim
  // (harder rejection -> better efficiency) is tested.
  SweepSpec spec;
  spec.theta_base = RateParams{{0.001, 0.2, 0.1}};
  spec.swept_index = 0;
  spec.grid = {0.0005, 0.00065, 0.0008, 0.001, 0.00125};
  spec.problem =
      IntervalProblem{{120, 301, 0, 0}, {71, 219, 49, 33}, 0.0, 10.0};
  spec.replicates = 12;
  spec.master_seed = 90;
  spec.timing_repeats = 3;
  // Large batches amortize pool dispatch; the serial baseline is batch-1
  // sequential sampling, so easy grid points pay the batch-padding cost and
  // hard ones amortize it, which is the shape under test.
  spec.sampler.batch_size = 256;
  const std::vector<unsigned> workers = {8};
  const auto table = run_sweep(network, spec, workers);

  std::vector<double> attempts, efficiency;
  std::ostringstream detail;
  for (const auto& point : table) {
    if (!point.feasible) continue;
    attempts.push_back(point.mean_attempts);
    efficiency.push_back(point.efficiency);
    detail << "(" << point.mean_attempts << ", " << point.efficiency << ") ";
  }
  bool pass = attempts.size() == spec.grid.size();
  double rho = 0.0;
  if (pass) {
    rho = pearson(ranks(attempts), ranks(efficiency));
    pass = rho > 0.0;
  }
  detail << "spearman=" << rho;
  report(9, pass, "efficiency trend vs rejection difficulty", detail.str());
}

void criterion_10() {
  const bool ok = amdahl_speedup(0.0, 7) == 1.0 &&
                  amdahl_speedup(1.0, 4) == 4.0 &&
                  amdahl_speedup(0.5, 2) == 1.0 / (0.5 + 0.25);
  report(10, ok, "Amdahl formula exact cases",
         "P=0 -> 1, P=1,C=4 -> 4, P=0.5,C=2 -> 4/3");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance_suite <stochkin-cli> <data-dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path data_dir = argv[2];

  const fs::path work_dir =
      fs::temp_directory_path() / "stochkin_acceptance";
  fs::remove_all(work_dir);
  fs::create_directories(work_dir);

  const ReactionNetwork network =
      load_network((data_dir / "michaelis_menten.model").string());
  const Observations observations = load_observations(
      network, (data_dir / "michaelis_menten_obs.csv").string());

  std::cout << "running Michaelis-Menten chain (2000 burn-in + 8000 retained)..."
            << std::endl;
  const MmRun mm = run_mm_chain(network, observations);

  criteria_1_2(mm);
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7(network, observations, mm);
  criterion_8(cli, data_dir, work_dir);
  criterion_9(network);
  criterion_10();

  fs::remove_all(work_dir);
  if (g_failures) {
    std::cout << g_failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all acceptance criteria passed" << std::endl;
  return 0;
}
