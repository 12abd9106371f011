#include "stochkin/network.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "stochkin/errors.hpp"

namespace stochkin {

namespace {

// Input counts are capped so that int64 state arithmetic cannot overflow
// within the event cap: |count| <= 2^31 at the boundary, per-event deltas are
// small, and at most ~1e7 events fire per window.
constexpr Count kMaxInputCount = Count{1} << 31;

struct LineScanner {
  std::string_view text;
  int line_no;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_no, static_cast<int>(pos) + 1);
  }
  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= text.size();
  }
  bool consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  bool consume(std::string_view token) {
    skip_ws();
    if (text.substr(pos, token.size()) == token) {
      pos += token.size();
      return true;
    }
    return false;
  }
  std::string identifier() {
    skip_ws();
    const std::size_t start = pos;
    if (pos < text.size() &&
        (std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      ++pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) ||
              text[pos] == '_'))
        ++pos;
    }
    if (pos == start) fail("expected a species name");
    return std::string(text.substr(start, pos - start));
  }
  Count integer() {
    skip_ws();
    const std::size_t start = pos;
    if (pos < text.size() && text[pos] == '-') ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      ++pos;
    if (pos == start || (text[start] == '-' && pos == start + 1))
      fail("expected an integer");
    Count value = 0;
    bool negative = text[start] == '-';
    for (std::size_t i = start + (negative ? 1 : 0); i < pos; ++i) {
      value = value * 10 + (text[i] - '0');
      if (value > kMaxInputCount) fail("count exceeds the 2^31 input bound");
    }
    return negative ? -value : value;
  }
  // term := [multiplicity] name, multiplicity glued to the name ("2A").
  std::pair<Count, std::string> term() {
    skip_ws();
    Count mult = 1;
    if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      mult = integer();
      if (mult <= 0) fail("multiplicity must be positive");
    }
    return {mult, identifier()};
  }
};

std::size_t require_species(const ReactionNetwork& net, const std::string& name,
                            const LineScanner& sc) {
  const auto idx = net.species_index(name);
  if (!idx) sc.fail("unknown species '" + name + "'");
  return *idx;
}

}  // namespace

std::optional<std::size_t> ReactionNetwork::species_index(
    std::string_view name) const {
  for (std::size_t i = 0; i < species_names.size(); ++i)
    if (species_names[i] == name) return i;
  return std::nullopt;
}

void ReactionNetwork::finalize() {
  for (Reaction& r : reactions) {
    r.reactant_terms.clear();
    r.change_terms.clear();
    for (std::size_t i = 0; i < r.reactant_multiplicities.size(); ++i)
      if (r.reactant_multiplicities[i] > 0)
        r.reactant_terms.emplace_back(i, r.reactant_multiplicities[i]);
    for (std::size_t i = 0; i < r.state_change.size(); ++i)
      if (r.state_change[i] != 0) r.change_terms.emplace_back(i, r.state_change[i]);
  }
}

void ReactionNetwork::validate() const {
  const std::size_t n = species_count();
  if (n == 0) throw ValidationError("network declares no species");
  if (reactions.empty()) throw ValidationError("no reactions");

  std::set<std::string_view> seen;
  for (const auto& name : species_names)
    if (!seen.insert(name).second)
      throw ValidationError("duplicate species name '" + name + "'");
  seen.clear();
  for (const auto& r : reactions)
    if (!seen.insert(r.label).second)
      throw ValidationError("duplicate reaction label '" + r.label + "'");

  for (const auto& r : reactions) {
    if (r.reactant_multiplicities.size() != n || r.state_change.size() != n)
      throw ValidationError("reaction '" + r.label +
                            "' has vectors of the wrong length");
    for (std::size_t i = 0; i < n; ++i) {
      if (r.reactant_multiplicities[i] < 0)
        throw ValidationError("reaction '" + r.label +
                              "' has a negative multiplicity");
      // v applied to any state with enough reactants must stay non-negative.
      if (r.state_change[i] < -r.reactant_multiplicities[i])
        throw ValidationError("reaction '" + r.label + "' consumes more of '" +
                              species_names[i] + "' than it declares");
      if (std::abs(r.state_change[i]) > kMaxInputCount ||
          r.reactant_multiplicities[i] > kMaxInputCount)
        throw ValidationError("reaction '" + r.label +
                              "' exceeds the 2^31 input bound");
    }
  }

  for (const auto& law : conservation_laws) {
    if (law.coefficients.size() != n)
      throw ValidationError("conservation law has the wrong length");
    for (const auto& r : reactions) {
      Count dot = 0;
      for (std::size_t i = 0; i < n; ++i)
        dot += law.coefficients[i] * r.state_change[i];
      if (dot != 0)
        throw ValidationError("conservation law is violated by reaction '" +
                              r.label + "'");
    }
  }

  if (initial_state) {
    if (initial_state->size() != n)
      throw ValidationError("initial state has the wrong length");
    for (std::size_t i = 0; i < n; ++i) {
      if ((*initial_state)[i] < 0)
        throw ValidationError("initial count of '" + species_names[i] +
                              "' is negative");
      if ((*initial_state)[i] > kMaxInputCount)
        throw ValidationError("initial count of '" + species_names[i] +
                              "' exceeds the 2^31 input bound");
    }
    for (const auto& law : conservation_laws) {
      Count dot = 0;
      for (std::size_t i = 0; i < n; ++i)
        dot += law.coefficients[i] * (*initial_state)[i];
      if (dot != law.value)
        throw ValidationError(
            "conservation law does not hold at the declared initial state");
    }
  }
}

ReactionNetwork parse_network(std::string_view text) {
  ReactionNetwork net;
  std::vector<std::pair<std::string, Count>> init_pairs;
  bool saw_species = false;

  int line_no = 0;
  std::size_t offset = 0;
  while (offset <= text.size()) {
    const std::size_t eol = text.find('\n', offset);
    std::string_view raw = text.substr(
        offset, eol == std::string_view::npos ? text.size() - offset : eol - offset);
    offset = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos)
      raw = raw.substr(0, hash);

    LineScanner sc{raw, line_no};
    if (sc.done()) continue;

    if (sc.consume("species:")) {
      if (saw_species) sc.fail("duplicate species declaration");
      saw_species = true;
      while (!sc.done()) net.species_names.push_back(sc.identifier());
      if (net.species_names.empty()) sc.fail("species list is empty");
    } else if (sc.consume("reaction:")) {
      if (!saw_species) sc.fail("species must be declared before reactions");
      const std::size_t n = net.species_count();
      Reaction r;
      r.reactant_multiplicities.assign(n, 0);
      r.state_change.assign(n, 0);
      // left side: empty, "0", or term (+ term)*
      if (!sc.consume("->")) {
        if (sc.consume('0')) {
          if (!sc.consume("->")) sc.fail("expected '->'");
        } else {
          do {
            auto [mult, name] = sc.term();
            r.reactant_multiplicities[require_species(net, name, sc)] += mult;
          } while (sc.consume('+'));
          if (!sc.consume("->")) sc.fail("expected '->'");
        }
      }
      // right side: products
      for (std::size_t i = 0; i < n; ++i)
        r.state_change[i] = -r.reactant_multiplicities[i];
      if (!sc.done() && !sc.consume('0')) {
        do {
          auto [mult, name] = sc.term();
          r.state_change[require_species(net, name, sc)] += mult;
        } while (sc.consume('+'));
      }
      if (!sc.done()) sc.fail("trailing text after reaction");
      r.label = "R" + std::to_string(net.reactions.size() + 1);
      net.reactions.push_back(std::move(r));
    } else if (sc.consume("conserve:")) {
      if (!saw_species) sc.fail("species must be declared before conserve");
      ConservationLaw law;
      law.coefficients.assign(net.species_count(), 0);
      do {
        auto [mult, name] = sc.term();
        law.coefficients[require_species(net, name, sc)] += mult;
      } while (sc.consume('+'));
      if (!sc.consume('=')) sc.fail("expected '='");
      law.value = sc.integer();
      if (!sc.done()) sc.fail("trailing text after conservation law");
      net.conservation_laws.push_back(std::move(law));
    } else if (sc.consume("init:")) {
      if (!saw_species) sc.fail("species must be declared before init");
      while (!sc.done()) {
        const std::string name = sc.identifier();
        if (!sc.consume('=')) sc.fail("expected '=' after species name");
        const Count value = sc.integer();
        if (value < 0) sc.fail("initial count must be non-negative");
        init_pairs.emplace_back(name, value);
        require_species(net, name, sc);
      }
    } else {
      sc.fail("expected 'species:', 'reaction:', 'conserve:', or 'init:'");
    }
  }

  if (!saw_species) throw ValidationError("network declares no species");
  if (!init_pairs.empty()) {
    SpeciesState init(net.species_count(), 0);  // unspecified species start at 0
    for (const auto& [name, value] : init_pairs)
      init[*net.species_index(name)] = value;
    net.initial_state = std::move(init);
  }
  net.finalize();
  net.validate();
  return net;
}

double hazard(const Reaction& reaction, const SpeciesState& x) {
  double h = 1.0;
  for (const auto& [i, mult] : reaction.reactant_terms) {
    const Count count = x[i];
    if (count < mult) return 0.0;
    for (Count step = 0; step < mult; ++step)
      h *= static_cast<double>(count - step);
  }
  return h;
}

std::vector<double> hazards(const ReactionNetwork& network,
                            const SpeciesState& x) {
  std::vector<double> out(network.reaction_count());
  hazards_into(network, x, out);
  return out;
}

void hazards_into(const ReactionNetwork& network, const SpeciesState& x,
                  std::span<double> out) {
  for (std::size_t j = 0; j < network.reactions.size(); ++j)
    out[j] = hazard(network.reactions[j], x);
}

Propensities propensities(std::span<const double> h, const RateParams& theta) {
  if (h.size() != theta.theta.size())
    throw ContractError("propensities: length mismatch");
  Propensities p;
  p.a.resize(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) {
    p.a[j] = theta.theta[j] * h[j];
    p.a0 += p.a[j];
  }
  return p;
}

SpeciesState apply_reaction(const ReactionNetwork& network,
                            const SpeciesState& x, std::size_t j) {
  if (j >= network.reaction_count())
    throw ContractError("apply_reaction: reaction index out of range");
  const Reaction& r = network.reactions[j];
  if (hazard(r, x) <= 0.0)
    throw ContractError("apply_reaction: reaction '" + r.label +
                        "' cannot fire in this state");
  SpeciesState next = x;
  for (const auto& [i, delta] : r.change_terms) next[i] += delta;
  return next;
}

bool satisfies_laws(const ReactionNetwork& network, const SpeciesState& x) {
  for (const auto& law : network.conservation_laws) {
    Count dot = 0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += law.coefficients[i] * x[i];
    if (dot != law.value) return false;
  }
  return true;
}

std::string format_state(const ReactionNetwork& network,
                         const SpeciesState& x) {
  std::ostringstream out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out << ' ';
    out << network.species_names[i] << '=' << x[i];
  }
  return out.str();
}

}  // namespace stochkin
