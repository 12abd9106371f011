#include "stochkin/cme.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "stochkin/errors.hpp"

namespace stochkin {

namespace {
constexpr double kSeriesMass = 1.0 - 1e-12;
constexpr double kFrontierMassBudget = 1e-9;
}  // namespace

StateSpace enumerate_states(const ReactionNetwork& network,
                            const SpeciesState& x0,
                            const EnumerateOptions& options) {
  if (!valid_state(network, x0))
    throw ContractError("enumerate_states: invalid initial state");
  if (options.cap < 1) throw ContractError("enumerate_states: cap must be >= 1");

  StateSpace space;
  space.states.push_back(x0);
  space.index.emplace(x0, 0);
  std::deque<std::size_t> queue{0};

  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    const SpeciesState x = space.states[s];  // copy: states vector may grow
    for (std::size_t j = 0; j < network.reaction_count(); ++j) {
      if (hazard(network.reactions[j], x) <= 0.0) continue;
      SpeciesState y = x;
      for (const auto& [i, delta] : network.reactions[j].change_terms)
        y[i] += delta;
      if (space.index.contains(y)) continue;
      if (space.states.size() >= options.cap) {
        if (!options.allow_truncation) throw StateSpaceError(options.cap);
        space.truncated = true;
        if (space.frontier.size() < space.states.size())
          space.frontier.resize(space.states.size(), false);
        space.frontier[s] = true;
        continue;
      }
      space.index.emplace(y, space.states.size());
      space.states.push_back(std::move(y));
      queue.push_back(space.states.size() - 1);
    }
  }
  space.frontier.resize(space.states.size(), false);
  return space;
}

CmeSolver::CmeSolver(const ReactionNetwork& network, RateParams theta,
                     SpeciesState x0, const EnumerateOptions& options)
    : network_(network), theta_(std::move(theta)), x0_(std::move(x0)) {
  if (theta_.theta.size() != network_.reaction_count())
    throw ContractError("CmeSolver: theta length mismatch");
  space_ = enumerate_states(network_, x0_, options);

  out_edges_.resize(space_.size());
  exit_rate_.assign(space_.size(), 0.0);
  for (std::size_t s = 0; s < space_.size(); ++s) {
    const SpeciesState& x = space_.states[s];
    for (std::size_t j = 0; j < network_.reaction_count(); ++j) {
      const double a = theta_.theta[j] * hazard(network_.reactions[j], x);
      if (a <= 0.0) continue;
      SpeciesState y = x;
      for (const auto& [i, delta] : network_.reactions[j].change_terms)
        y[i] += delta;
      const auto target = space_.find(y);
      if (!target) continue;  // dropped by truncation; s is a frontier state
      out_edges_[s].push_back({static_cast<std::uint32_t>(*target), a});
      exit_rate_[s] += a;
    }
  }
  double max_exit = 0.0;
  for (double rate : exit_rate_) max_exit = std::max(max_exit, rate);
  uniformization_rate_ = 1.05 * max_exit;
}

std::vector<double> CmeSolver::propagate(std::vector<double> v, double t,
                                         bool forward) const {
  if (t < 0.0) throw ContractError("CmeSolver: negative time");
  const double q = uniformization_rate_ * t;
  if (q == 0.0) return v;

  const std::size_t n = space_.size();
  std::vector<double> result(n, 0.0);
  std::vector<double> next(n);

  // Poisson(q) weights, in log space so large q cannot underflow the whole
  // series; early terms that underflow individually carry no mass anyway.
  double log_weight = -q;
  const double log_q = std::log(q);
  double cumulative = 0.0;
  const std::uint64_t hard_cap =
      200 + static_cast<std::uint64_t>(10.0 * (q + 10.0 * std::sqrt(q)));

  for (std::uint64_t k = 0;; ++k) {
    const double w = std::exp(log_weight);
    if (w > 0.0) {
      cumulative += w;
      for (std::size_t i = 0; i < n; ++i) result[i] += w * v[i];
    }
    if (cumulative >= kSeriesMass) break;
    if (k >= hard_cap)
      throw ValidationError("uniformization series failed to converge");

    // v <- v P (forward, row vector) or P v (backward, column vector),
    // P = I + Q/Lambda.
    if (forward) {
      for (std::size_t i = 0; i < n; ++i)
        next[i] = v[i] * (1.0 - exit_rate_[i] / uniformization_rate_);
      for (std::size_t i = 0; i < n; ++i) {
        if (v[i] == 0.0) continue;
        for (const Edge& e : out_edges_[i])
          next[e.target] += v[i] * (e.rate / uniformization_rate_);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = v[i] * (1.0 - exit_rate_[i] / uniformization_rate_);
        for (const Edge& e : out_edges_[i])
          acc += (e.rate / uniformization_rate_) * v[e.target];
        next[i] = acc;
      }
    }
    v.swap(next);
    log_weight += log_q - std::log(static_cast<double>(k + 1));
  }
  return result;
}

std::vector<double> CmeSolver::transient_distribution(double t) const {
  const auto idx = space_.find(x0_);
  return distribution_from(*idx, t);
}

std::vector<double> CmeSolver::distribution_from(std::size_t state_index,
                                                 double t) const {
  if (state_index >= space_.size())
    throw ContractError("distribution_from: state index out of range");
  std::vector<double> v(space_.size(), 0.0);
  v[state_index] = 1.0;
  auto p = propagate(std::move(v), t, /*forward=*/true);
  if (space_.truncated) {
    double frontier_mass = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (space_.frontier[i]) frontier_mass += p[i];
    if (frontier_mass > kFrontierMassBudget)
      throw ValidationError(
          "truncated state space: frontier states carry probability " +
          std::to_string(frontier_mass) + "; raise the cap");
  }
  return p;
}

double CmeSolver::endpoint_probability(const SpeciesState& x1,
                                       double dt) const {
  const auto target = space_.find(x1);
  if (!target) return 0.0;
  return transient_distribution(dt)[*target];
}

std::vector<double> CmeSolver::bridge_distribution(const SpeciesState& x1,
                                                   double dt, double s) const {
  if (!(s > 0.0 && s < dt))
    throw ContractError("bridge_distribution: need 0 < s < dt");
  const auto target = space_.find(x1);
  if (!target)
    throw BridgeError("bridge_distribution: endpoint is unreachable");

  const std::vector<double> fwd = transient_distribution(s);

  std::vector<double> e1(space_.size(), 0.0);
  e1[*target] = 1.0;
  const std::vector<double> bwd = propagate(std::move(e1), dt - s,
                                            /*forward=*/false);

  std::vector<double> bridge(space_.size());
  double norm = 0.0;
  for (std::size_t z = 0; z < space_.size(); ++z) {
    bridge[z] = fwd[z] * bwd[z];
    norm += bridge[z];
  }
  if (norm <= 0.0)
    throw BridgeError("bridge_distribution: endpoint has zero probability");
  for (double& p : bridge) p /= norm;
  return bridge;
}

}  // namespace stochkin
