#pragma once

#include <set>
#include <string>
#include <vector>

#include "chaf/classify.hpp"
#include "chaf/grammar.hpp"
#include "chaf/rewrite.hpp"

namespace chaf::testing {

// S ::= A B; A ::= B | x a; B ::= x b -- the pair grammar, no nullables.
inline const char* kPairGrammar =
    "start: S\nS ::= A B\nA ::= B\nA ::= x a\nB ::= x b\n";

// S ::= A A; A ::= a | empty -- two optional slots.
inline const char* kOptPairGrammar = "start: S\nS ::= A A\nA ::= a\nA ::=\n";

// S ::= A A A A; A ::= a | empty -- four optional slots.
inline const char* kOptQuadGrammar = "start: S\nS ::= A A A A\nA ::= a\nA ::=\n";

inline Grammar augmented(const char* text) { return augment(parse_grammar(text)); }

inline RewrittenGrammar null_free(const Grammar& g) {
  SymbolClassification cls = classify(g);
  RewrittenGrammar chaf = chaf_rewrite(g, cls);
  return eliminate_nulling(chaf, classify(chaf.grammar));
}

// (rendered rule, role) pairs for golden comparisons.
inline std::multiset<std::pair<std::string, std::string>> rule_role_set(
    const RewrittenGrammar& rg) {
  std::multiset<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < rg.grammar.rule_count(); ++i)
    out.insert({rg.grammar.render_rule(i), to_string(rg.bindings[i].role)});
  return out;
}

inline std::multiset<std::string> rule_set(const Grammar& g) {
  std::multiset<std::string> out;
  for (std::size_t i = 0; i < g.rule_count(); ++i) out.insert(g.render_rule(i));
  return out;
}

}  // namespace chaf::testing
