#include "stochkin/bench.hpp"

#include <cmath>

#include "doctest.h"
#include "stochkin/cme.hpp"
#include "stochkin/errors.hpp"
#include "support/test_models.hpp"

using namespace stochkin;

TEST_CASE("amdahl bound on the pinned cases") {
  CHECK(amdahl_speedup(0.0, 1) == 1.0);
  CHECK(amdahl_speedup(0.0, 64) == 1.0);
  CHECK(amdahl_speedup(1.0, 4) == 4.0);
  CHECK(amdahl_speedup(0.5, 2) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("amdahl bound is monotone and capped by the core count") {
  double last = 0.0;
  for (double p = 0.0; p <= 1.0; p += 0.05) {
    const double value = amdahl_speedup(p, 8);
    CHECK(value >= last);
    CHECK(value <= 8.0 + 1e-12);
    last = value;
  }
  for (unsigned c = 1; c <= 16; ++c)
    CHECK(amdahl_speedup(1.0, c) == double(c));

  CHECK_THROWS_AS(amdahl_speedup(-0.1, 2), ContractError);
  CHECK_THROWS_AS(amdahl_speedup(1.1, 2), ContractError);
  CHECK_THROWS_AS(amdahl_speedup(0.5, 0), ContractError);
}

TEST_CASE("pure-birth sweep attempts track 1/p from the Poisson pmf") {
  const ReactionNetwork net = parse_network(test_models::kPureBirth);
  SweepSpec spec;
  spec.theta_base = RateParams{{1.0}};
  spec.swept_index = 0;
  spec.grid = {0.5, 1.0, 2.0};
  spec.problem = IntervalProblem{{0}, {1}, 0.0, 1.0};  // k = 1 birth
  spec.replicates = 800;
  spec.master_seed = 21;
  spec.timing_repeats = 1;

  const std::vector<unsigned> workers = {1};
  const auto table = run_sweep(net, spec, workers);
  REQUIRE(table.size() == 3);
  for (std::size_t g = 0; g < spec.grid.size(); ++g) {
    const double lambda = spec.grid[g];  // theta * T
    const double p = lambda * std::exp(-lambda);
    const double se =
        std::sqrt((1.0 - p) / (p * p) / double(spec.replicates));
    REQUIRE(table[g].feasible);
    CHECK(std::abs(table[g].mean_attempts - 1.0 / p) < 3 * se);
  }
}

TEST_CASE("acceptance probability one means one attempt per call") {
  const ReactionNetwork net = parse_network(test_models::kIsomerization);
  SweepSpec spec;
  spec.theta_base = RateParams{{1.0}};
  spec.swept_index = 0;
  spec.grid = {1.0};
  spec.problem = IntervalProblem{{0, 1}, {0, 1}, 0.0, 1.0};  // frozen
  spec.replicates = 200;
  spec.master_seed = 22;
  spec.timing_repeats = 1;
  const std::vector<unsigned> workers = {2};
  const auto table = run_sweep(net, spec, workers);
  REQUIRE(table.size() == 1);
  CHECK(table[0].mean_attempts == 1.0);
  CHECK(table[0].efficiency > 0.0);
}

TEST_CASE("infeasible grid points are reported and the sweep continues") {
  const ReactionNetwork net = parse_network(test_models::kExchange3);
  SweepSpec spec;
  spec.theta_base = RateParams{{1.0, 1.0}};
  spec.swept_index = 0;
  spec.grid = {1.0, 2.0};
  spec.problem = IntervalProblem{{3, 0}, {3, 3}, 0.0, 1.0};  // violates law
  spec.replicates = 5;
  spec.sampler.max_attempts = 64;
  spec.timing_repeats = 1;
  const std::vector<unsigned> workers = {1};
  const auto table = run_sweep(net, spec, workers);
  REQUIRE(table.size() == 2);
  CHECK_FALSE(table[0].feasible);
  CHECK_FALSE(table[1].feasible);
  CHECK(!table[0].error.empty());
}

TEST_CASE("deterministic attempts are identical across worker counts") {
  const ReactionNetwork net = parse_network(test_models::kExchange3);
  SweepSpec spec;
  spec.theta_base = RateParams{{1.0, 1.0}};
  spec.swept_index = 0;
  spec.grid = {0.7};
  spec.problem = IntervalProblem{{2, 1}, {1, 2}, 0.0, 1.0};
  spec.replicates = 50;
  spec.sampler.batch_size = 8;
  spec.master_seed = 23;
  spec.timing_repeats = 2;
  const std::vector<unsigned> workers = {1, 2, 4};
  const auto table = run_sweep(net, spec, workers);
  REQUIRE(table.size() == 3);
  CHECK(table[0].mean_attempts == table[1].mean_attempts);
  CHECK(table[0].mean_attempts == table[2].mean_attempts);
}
