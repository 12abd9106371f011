#ifndef STOCHKIN_CME_HPP
#define STOCHKIN_CME_HPP

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "stochkin/network.hpp"

namespace stochkin {

struct SpeciesStateHash {
  std::size_t operator()(const SpeciesState& x) const {
    // FNV-1a over the count words.
    std::uint64_t h = 1469598103934665603ull;
    for (Count c : x) {
      std::uint64_t v = static_cast<std::uint64_t>(c);
      for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xFF;
        h *= 1099511628211ull;
      }
    }
    return static_cast<std::size_t>(h);
  }
};

struct EnumerateOptions {
  std::size_t cap = 20'000;
  /// When false (default), discovering a state past the cap raises
  /// StateSpaceError. When true, transitions out of the enumerated set are
  /// dropped instead and the source states are marked as frontier states;
  /// transient computations then verify the frontier stays massless.
  bool allow_truncation = false;
};

/// Reachability closure from one initial state, in BFS discovery order.
struct StateSpace {
  std::vector<SpeciesState> states;
  std::unordered_map<SpeciesState, std::size_t, SpeciesStateHash> index;
  std::vector<bool> frontier;  // states with dropped outgoing transitions
  bool truncated = false;

  std::size_t size() const { return states.size(); }
  std::optional<std::size_t> find(const SpeciesState& x) const {
    const auto it = index.find(x);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

StateSpace enumerate_states(const ReactionNetwork& network,
                            const SpeciesState& x0,
                            const EnumerateOptions& options = {});

/// Exact transient solutions of the chemical master equation on an
/// enumerated state space, via uniformization: p(t)' = p(0)' exp(Qt) with
/// the Poisson series over P = I + Q/Lambda truncated once its cumulative
/// weight reaches 1 - 1e-12, Lambda = 1.05 * max |diagonal|.
class CmeSolver {
 public:
  CmeSolver(const ReactionNetwork& network, RateParams theta, SpeciesState x0,
            const EnumerateOptions& options = {});

  const StateSpace& space() const { return space_; }
  const SpeciesState& initial_state() const { return x0_; }

  /// Distribution over space() at time t, starting from the point mass at
  /// the constructor's x0.
  std::vector<double> transient_distribution(double t) const;

  /// Same, starting from an arbitrary member state.
  std::vector<double> distribution_from(std::size_t state_index, double t) const;

  /// Transition probability x0 -> x1 over dt; 0 when x1 is unreachable.
  double endpoint_probability(const SpeciesState& x1, double dt) const;

  /// P(X_s = . | X_0 = x0, X_dt = x1) for 0 < s < dt. Throws BridgeError
  /// when the endpoint has zero probability.
  std::vector<double> bridge_distribution(const SpeciesState& x1, double dt,
                                          double s) const;

 private:
  struct Edge {
    std::uint32_t target;
    double rate;
  };

  std::vector<double> propagate(std::vector<double> v, double t,
                                bool forward) const;

  ReactionNetwork network_;
  RateParams theta_;
  SpeciesState x0_;
  StateSpace space_;
  std::vector<std::vector<Edge>> out_edges_;  // per source state
  std::vector<double> exit_rate_;             // -diagonal
  double uniformization_rate_ = 0.0;
};

}  // namespace stochkin

#endif
