#include <random>
#include <set>

#include "chaf/ahfa.hpp"
#include "chaf/classify.hpp"
#include "chaf/oracle.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/gen.hpp"

using namespace chaf;
using namespace chaf::testing;

namespace {

RewrittenGrammar nnf_of(const char* text) {
  Grammar g = augmented(text);
  return nnf_rewrite(g, classify(g));
}

// Looks up a state by its rendered item set.
std::optional<std::size_t> state_of(const Ahfa& a, const RewrittenGrammar& rg,
                                    const std::set<std::string>& items) {
  for (const AhfaState& st : a.states()) {
    std::set<std::string> got;
    for (DottedRule d : st.items) got.insert(render_dotted(rg.grammar, d));
    if (got == items) return st.id;
  }
  return std::nullopt;
}

}  // namespace

TEST_SUITE_BEGIN("ahfa");

TEST_CASE("the pair grammar automaton, state by state") {
  RewrittenGrammar rg = nnf_of(kPairGrammar);
  Ahfa a = build_ahfa(rg);

  auto c0 = state_of(a, rg, {"S' ::= • S"});
  auto c8 = state_of(a, rg, {"S' ::= S •"});
  auto p1 = state_of(a, rg, {"S ::= • A B", "A ::= • B", "A ::= • x a",
                             "B ::= • x b"});
  auto c2 = state_of(a, rg, {"A ::= x • a", "B ::= x • b"});
  auto c3 = state_of(a, rg, {"S ::= A • B"});
  auto c4 = state_of(a, rg, {"S ::= A B •"});
  auto p2 = state_of(a, rg, {"B ::= • x b"});
  auto c5 = state_of(a, rg, {"B ::= x • b"});
  auto c6 = state_of(a, rg, {"B ::= x b •"});
  auto c7 = state_of(a, rg, {"A ::= x a •"});
  auto unit = state_of(a, rg, {"A ::= B •"});  // reachable via GOTO(p1, B)

  for (auto s : {c0, c8, p1, c2, c3, c4, p2, c5, c6, c7, unit}) REQUIRE(s);
  CHECK(a.states().size() == 11);

  const Grammar& g = rg.grammar;
  SymbolId S = *g.find_symbol("S"), A = *g.find_symbol("A"), B = *g.find_symbol("B");
  SymbolId x = *g.find_symbol("x"), ta = *g.find_symbol("a"), tb = *g.find_symbol("b");

  CHECK(a.go(*c0, S) == c8);
  CHECK(a.go(*c0, std::nullopt) == p1);
  CHECK(a.go(*p1, x) == c2);
  CHECK(a.go(*p1, A) == c3);
  CHECK(a.go(*p1, B) == unit);
  CHECK(a.go(*c3, std::nullopt) == p2);
  CHECK(a.go(*c3, B) == c4);
  CHECK(a.go(*p2, x) == c5);
  CHECK(a.go(*c2, ta) == c7);
  CHECK(a.go(*c2, tb) == c6);
  CHECK(a.go(*c5, tb) == c6);
  // the final states have no out-edges
  for (SymbolId s = 0; s < static_cast<SymbolId>(g.symbol_count()); ++s) {
    CHECK_FALSE(a.go(*c8, s).has_value());
    CHECK_FALSE(a.go(*c4, s).has_value());
  }
  CHECK_FALSE(a.go(*c8, std::nullopt).has_value());

  CHECK_FALSE(a.state(*c0).predicted);  // the initial state is confirmed
  CHECK(a.state(*p1).predicted);
  CHECK(a.state(*p2).predicted);
}

TEST_CASE("the duplication report flags shared dotted rules") {
  RewrittenGrammar rg = nnf_of(kPairGrammar);
  Ahfa a = build_ahfa(rg);
  AhfaStats s = ahfa_statistics(a, rg);
  auto c2 = state_of(a, rg, {"A ::= x • a", "B ::= x • b"});
  auto c5 = state_of(a, rg, {"B ::= x • b"});
  bool found = false;
  for (const auto& [dr, ids] : s.duplicates) {
    if (render_dotted(rg.grammar, dr) == "B ::= x • b") {
      found = true;
      CHECK(std::set<std::size_t>(ids.begin(), ids.end()) ==
            std::set<std::size_t>{*c2, *c5});
    }
  }
  CHECK(found);
}

TEST_CASE("a one-terminal grammar has four states and one epsilon edge") {
  RewrittenGrammar rg = nnf_of("start: S\nS ::= t\n");
  Ahfa a = build_ahfa(rg);
  CHECK(a.states().size() == 4);
  std::size_t eps = 0;
  for (const auto& [key, to] : a.transitions())
    if (key.second == kNoSymbol) {
      ++eps;
      CHECK(a.state(to).predicted);
    }
  CHECK(eps == 1);
}

TEST_CASE("nulling symbols advance the dot inside states") {
  RewrittenGrammar rg = nnf_of(kOptPairGrammar);
  Ahfa a = build_ahfa(rg);
  const Grammar& g = rg.grammar;
  SymbolId ae = *g.find_symbol("Ae");
  // GOTO over Ae lands in a state that also holds the nulling-advanced items
  bool checked = false;
  for (const AhfaState& st : a.states()) {
    std::set<std::string> items;
    for (DottedRule d : st.items) items.insert(render_dotted(g, d));
    if (items.count("S ::= Ae • Ae")) {
      CHECK(items.count("S ::= Ae Ae •"));
      checked = true;
    }
  }
  CHECK(checked);
  CHECK(ae >= 0);
}

TEST_CASE("predicted states hold only non-kernel items") {
  std::mt19937_64 rng(606);
  for (int i = 0; i < 40; ++i) {
    Grammar g = augment(random_grammar(rng));
    RewrittenGrammar rg = nnf_rewrite(g, classify(g));
    Ahfa a = build_ahfa(rg);
    SymbolClassification cls = classify(rg.grammar);
    for (const AhfaState& st : a.states()) {
      if (!st.predicted) continue;
      bool has_dot0 = false;
      for (DottedRule d : st.items) {
        if (d.pos == 0) has_dot0 = true;
        // any dot > 0 item in a predicted state comes from nulling advancement
        for (std::uint32_t p = 0; p < d.pos; ++p) {
          SymbolId s = rg.grammar.rule(d.rule).rhs[p];
          CHECK((rg.is_alias(s) || cls.nulling(s)));
        }
      }
      CHECK(has_dot0);
    }
    // at most one epsilon transition per state, always into a predicted state
    std::map<std::size_t, int> eps_count;
    for (const auto& [key, to] : a.transitions())
      if (key.second == kNoSymbol) {
        ++eps_count[key.first];
        CHECK(a.state(to).predicted);
      }
    for (const auto& [st, n] : eps_count) CHECK(n == 1);
  }
}

TEST_CASE("every dotted rule of a reachable rule appears in some state") {
  std::mt19937_64 rng(607);
  for (int i = 0; i < 40; ++i) {
    Grammar g = augment(random_grammar(rng));
    RewrittenGrammar rg = nnf_rewrite(g, classify(g));
    Ahfa a = build_ahfa(rg);
    const Grammar& nf = rg.grammar;
    // reachable symbols from the accept symbol
    std::set<SymbolId> reach{nf.accept()};
    bool grew = true;
    while (grew) {
      grew = false;
      for (const Rule& r : nf.rules())
        if (reach.count(r.lhs))
          for (SymbolId s : r.rhs) grew |= reach.insert(s).second;
    }
    std::set<DottedRule> in_states;
    for (const AhfaState& st : a.states())
      for (DottedRule d : st.items) in_states.insert(d);
    for (std::uint32_t ri = 0; ri < nf.rule_count(); ++ri) {
      if (!reach.count(nf.rule(ri).lhs)) continue;
      for (std::uint32_t pos = 0; pos <= nf.rule(ri).rhs.size(); ++pos) {
        INFO("grammar #", i, " dotted rule ", render_dotted(nf, {ri, pos}));
        CHECK(in_states.count(DottedRule{ri, pos}));
      }
    }
  }
}

TEST_CASE("statistics: histograms, means, and completed-LHS counts") {
  RewrittenGrammar rg = nnf_of(kPairGrammar);
  Ahfa a = build_ahfa(rg);
  AhfaStats s = ahfa_statistics(a, rg);

  std::size_t confirmed_total = 0, predicted_total = 0;
  for (const auto& [size, n] : s.confirmed.size_histogram) confirmed_total += n;
  for (const auto& [size, n] : s.predicted.size_histogram) predicted_total += n;
  CHECK(confirmed_total == s.confirmed.count);
  CHECK(predicted_total == s.predicted.count);
  CHECK(s.confirmed.count + s.predicted.count == a.states().size());

  // every state of this automaton completes at most one LHS symbol
  for (std::size_t n : s.completed_lhs_counts) CHECK(n <= 1);

  // sum of state sizes exceeds the distinct dotted rules exactly when
  // the duplication report is nonempty
  std::size_t item_occurrences = 0;
  std::set<DottedRule> distinct;
  for (const AhfaState& st : a.states()) {
    item_occurrences += st.items.size();
    distinct.insert(st.items.begin(), st.items.end());
  }
  CHECK(item_occurrences >= distinct.size());
  CHECK((item_occurrences == distinct.size()) == s.duplicates.empty());

  std::string text = render_stats(s, a, rg);
  CHECK(text.find("mean size") != std::string::npos);
  CHECK(text.find("kind,size,occurrences") != std::string::npos);
}

TEST_CASE("a single-rule grammar has confirmed mean size 1") {
  RewrittenGrammar rg = nnf_of("start: S\nS ::= t\n");
  Ahfa a = build_ahfa(rg);
  AhfaStats s = ahfa_statistics(a, rg);
  CHECK(s.confirmed.mean_size == doctest::Approx(1.0));
}

TEST_CASE("construction is deterministic") {
  RewrittenGrammar rg = nnf_of(kPairGrammar);
  Ahfa a1 = build_ahfa(rg);
  Ahfa a2 = build_ahfa(rg);
  CHECK(render_states(a1, rg) == render_states(a2, rg));
}

TEST_CASE("raw grammars with unfactored nullables are rejected") {
  Grammar g = augmented(kOptPairGrammar);
  RewrittenGrammar raw;
  raw.grammar = g;
  raw.pre = g;
  raw.bindings.resize(g.rule_count());
  CHECK_THROWS_AS(build_ahfa(raw), GrammarError);
}

TEST_SUITE_END();
