#ifndef STOCHKIN_ERRORS_HPP
#define STOCHKIN_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace stochkin {

// Violated precondition on an API call (caller bug, not data).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

// Model text could not be parsed; positions are 1-based.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, int line, int col)
      : std::runtime_error("line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ": " + what),
        line(line),
        col(col) {}
  int line;
  int col;
};

// Structurally invalid network, observations, or sample set.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed serialized StreamState.
struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Event cap exceeded during simulation.
struct RunawaySimulationError : std::runtime_error {
  explicit RunawaySimulationError(std::uint64_t cap)
      : std::runtime_error("simulation exceeded event cap of " +
                           std::to_string(cap)),
        event_cap(cap) {}
  std::uint64_t event_cap;
};

// Rejection sampler exhausted its attempt budget.
struct InfeasibleIntervalError : std::runtime_error {
  InfeasibleIntervalError(std::uint64_t attempts, const std::string& detail)
      : std::runtime_error("no accepted trajectory after " +
                           std::to_string(attempts) + " attempts" +
                           (detail.empty() ? "" : " (" + detail + ")")),
        attempts(attempts) {}
  std::uint64_t attempts;
};

// Gamma full conditional is improper for some reaction.
struct ImproprietyError : std::runtime_error {
  explicit ImproprietyError(const std::string& reaction_label,
                            const std::string& context = "")
      : std::runtime_error(
            (context.empty() ? "" : context + ": ") +
            "improper full conditional for reaction '" + reaction_label +
            "': shape or rate is zero; either the reaction never fired or "
            "its hazard integral is zero. Use a weak proper prior such as "
            "Gamma(1e-3, 1e-3)."),
        reaction(reaction_label) {}
  std::string reaction;
};

// Replay from a stored stream state did not reproduce the accepted endpoint.
struct ReplayCorruptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reachable state space exceeds the configured cap.
struct StateSpaceError : std::runtime_error {
  explicit StateSpaceError(std::size_t cap)
      : std::runtime_error("reachable state space exceeds cap of " +
                           std::to_string(cap)),
        cap(cap) {}
  std::size_t cap;
};

// Bridge conditioning on a zero-probability endpoint.
struct BridgeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All chains constant: Gelman-Rubin undefined.
struct DegenerateVarianceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad data file contents (observations, chain files).
struct IngestionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad run configuration (file or flags).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace stochkin

#endif
