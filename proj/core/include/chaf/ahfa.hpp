#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chaf/recognizer.hpp"
#include "chaf/rewrite.hpp"

namespace chaf {

// A state of the split LR(0) epsilon-DFA: a set of dotted rules. Predicted
// states are the epsilon-transition targets; all others are confirmed.
struct AhfaState {
  std::size_t id = 0;
  std::vector<DottedRule> items;  // sorted, unique
  bool predicted = false;
};

class Ahfa {
 public:
  const std::vector<AhfaState>& states() const { return states_; }
  const AhfaState& state(std::size_t id) const { return states_.at(id); }
  // Transition on a symbol, or on epsilon when x is nullopt.
  std::optional<std::size_t> go(std::size_t state, std::optional<SymbolId> x) const;
  const std::map<std::pair<std::size_t, SymbolId>, std::size_t>& transitions() const {
    return transitions_;
  }
  std::optional<std::size_t> find_state(const std::vector<DottedRule>& items) const;

 private:
  friend Ahfa build_ahfa(const RewrittenGrammar& g);
  // epsilon transitions are keyed with kNoSymbol.
  std::vector<AhfaState> states_;
  std::map<std::pair<std::size_t, SymbolId>, std::size_t> transitions_;
};

// Builds the AHFA over a factored grammar (empty rules only on nulling
// symbols; nulling symbols allowed, proper nullables must have been factored
// out by the NNF rewrite). The start state is the nulling-closure of the
// initial dotted rule; GOTO(S, x) advances the dot over x; GOTO(S, eps) is
// the prediction closure of S's postdot nonterminals and exists for
// confirmed states. Nulling-closure advances dots over nulling symbols.
Ahfa build_ahfa(const RewrittenGrammar& g);

struct AhfaKindStats {
  std::map<std::size_t, std::size_t> size_histogram;  // size -> state count
  std::size_t count = 0;
  double mean_size = 0.0;
  double mean_square_size = 0.0;
};

struct AhfaStats {
  AhfaKindStats confirmed;
  AhfaKindStats predicted;
  std::vector<std::size_t> completed_lhs_counts;  // per state id
  // Dotted rules appearing in more than one state, with the state ids.
  std::vector<std::pair<DottedRule, std::vector<std::size_t>>> duplicates;
};

AhfaStats ahfa_statistics(const Ahfa& a, const RewrittenGrammar& g);

std::string render_states(const Ahfa& a, const RewrittenGrammar& g);
// Graphviz dot output; epsilon edges are labeled "eps".
std::string render_dot(const Ahfa& a, const RewrittenGrammar& g);
// Aligned-text tables followed by a CSV section.
std::string render_stats(const AhfaStats& s, const Ahfa& a, const RewrittenGrammar& g);

}  // namespace chaf
