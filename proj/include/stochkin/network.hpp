#ifndef STOCHKIN_NETWORK_HPP
#define STOCHKIN_NETWORK_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stochkin {

using Count = std::int64_t;

/// Molecule counts, one entry per species, all non-negative.
using SpeciesState = std::vector<Count>;

/// One reaction channel: reactant multiplicities k_ij and the net state
/// change v_j, both of length N. reactant_terms/change_terms are the sparse
/// views used by the simulation hot path; ReactionNetwork::finalize() fills
/// them from the dense vectors.
struct Reaction {
  std::vector<Count> reactant_multiplicities;
  std::vector<Count> state_change;
  std::string label;

  std::vector<std::pair<std::size_t, Count>> reactant_terms;  // k_ij > 0
  std::vector<std::pair<std::size_t, Count>> change_terms;    // v_ij != 0
};

/// Linear invariant: coefficients . x == value along every path.
struct ConservationLaw {
  std::vector<Count> coefficients;
  Count value;
};

/// Strictly positive stochastic rate constants, one per reaction.
struct RateParams {
  std::vector<double> theta;
};

struct ReactionNetwork {
  std::vector<std::string> species_names;
  std::vector<Reaction> reactions;
  std::vector<ConservationLaw> conservation_laws;
  std::optional<SpeciesState> initial_state;

  std::size_t species_count() const { return species_names.size(); }
  std::size_t reaction_count() const { return reactions.size(); }
  std::optional<std::size_t> species_index(std::string_view name) const;

  /// Builds the sparse reaction views. Called by parse_network; call it
  /// yourself after constructing a network by hand.
  void finalize();

  /// Checks every structural invariant (unique names, consistent lengths,
  /// laws annihilated by every state change, laws holding at the initial
  /// state, counts within the 2^31 input bound). Throws ValidationError.
  void validate() const;
};

/// Parses the plain-text model format (see README for the grammar):
///   species:  E S ES P
///   reaction: E + S -> ES
///   conserve: E + ES = 120
///   init:     E=120 S=301
/// Throws ParseError (with line/col) or ValidationError.
ReactionNetwork parse_network(std::string_view text);

/// Stochastic mass-action hazard of one reaction: the product over reactant
/// species of falling factorials x_i (x_i - 1) ... (x_i - k_ij + 1).
double hazard(const Reaction& reaction, const SpeciesState& x);

std::vector<double> hazards(const ReactionNetwork& network,
                            const SpeciesState& x);

void hazards_into(const ReactionNetwork& network, const SpeciesState& x,
                  std::span<double> out);

struct Propensities {
  std::vector<double> a;
  double a0 = 0.0;
};

/// a_j = theta_j * h_j and their total a0.
Propensities propensities(std::span<const double> h, const RateParams& theta);

/// x + v_j with the firing precondition checked (h_j(x) > 0). Throws
/// ContractError on an impossible firing.
SpeciesState apply_reaction(const ReactionNetwork& network,
                            const SpeciesState& x, std::size_t j);

/// Do all declared conservation laws hold at x?
bool satisfies_laws(const ReactionNetwork& network, const SpeciesState& x);

inline bool valid_state(const ReactionNetwork& network, const SpeciesState& x) {
  if (x.size() != network.species_count()) return false;
  for (Count c : x)
    if (c < 0) return false;
  return true;
}

/// Renders a state as space-separated "name=count" pairs, for messages.
std::string format_state(const ReactionNetwork& network, const SpeciesState& x);

}  // namespace stochkin

#endif
