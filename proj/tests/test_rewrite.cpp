#include <random>

#include "chaf/classify.hpp"
#include "chaf/oracle.hpp"
#include "chaf/rewrite.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/gen.hpp"

using namespace chaf;
using namespace chaf::testing;

TEST_SUITE_BEGIN("rewrite");

TEST_CASE("NNF of the optional-pair grammar is the seven-rule grammar") {
  Grammar g = augmented(kOptPairGrammar);
  RewrittenGrammar rg = nnf_rewrite(g, classify(g));
  std::multiset<std::string> want{
      "S' ::= S", "S ::= Ae Ae", "S ::= Ae A", "S ::= A Ae",
      "S ::= A A", "A ::= a",    "Ae ::=",
  };
  CHECK(rule_set(rg.grammar) == want);
  CHECK(rg.nullable_start);
}

TEST_CASE("NNF factors a rule with two proper nullables into four") {
  Grammar g = augmented(kOptPairGrammar);
  auto cls = classify(g);
  RewrittenGrammar rg = nnf_rewrite(g, cls);
  std::size_t factored = 0;
  for (const RewriteBinding& b : rg.bindings)
    if (b.pre_rule && *b.pre_rule == 0) ++factored;  // rule 0 is S ::= A A
  CHECK(factored == 4);
  CHECK(nnf_factored_count(g, cls, 0) == 4);
}

namespace {

// start R; R ::= A ... A (pn copies); A ::= a | empty.
Grammar optional_run(int pn) {
  std::string src = "start: R\nR ::=";
  for (int i = 0; i < pn; ++i) src += " A";
  src += "\nA ::= a\nA ::=\n";
  return augmented(src.c_str());
}

}  // namespace

TEST_CASE("NNF counting mode matches two to the pn") {
  Grammar g = optional_run(19);
  auto cls = classify(g);
  CHECK(nnf_factored_count(g, cls, 0) == 524288);  // 2^19
  for (int pn = 1; pn <= 10; ++pn) {
    Grammar h = optional_run(pn);
    auto hcls = classify(h);
    RewrittenGrammar rg = nnf_rewrite(h, hcls);
    std::size_t factored = 0;
    for (const RewriteBinding& b : rg.bindings)
      if (b.pre_rule && *b.pre_rule == 0) ++factored;
    CHECK(factored == (std::size_t{1} << pn));
    CHECK(nnf_factored_count(h, hcls, 0) == (std::uint64_t{1} << pn));
  }
}

TEST_CASE("NNF materialization matches the counting mode on random grammars") {
  std::mt19937_64 rng(6543);
  for (int i = 0; i < 60; ++i) {
    Grammar g = augment(random_grammar(rng));
    auto cls = classify(g);
    RewrittenGrammar rg = nnf_rewrite(g, cls);
    std::vector<std::size_t> per_rule(g.rule_count(), 0);
    for (std::size_t ri = 0; ri < rg.grammar.rule_count(); ++ri) {
      if (rg.is_alias(rg.grammar.rule(ri).lhs)) continue;  // alias rules aside
      if (rg.bindings[ri].pre_rule) ++per_rule[*rg.bindings[ri].pre_rule];
    }
    for (std::size_t ri = 0; ri < g.rule_count(); ++ri) {
      INFO("grammar #", i, " rule ", g.render_rule(ri));
      CHECK(per_rule[ri] == nnf_factored_count(g, cls, ri));
    }
  }
}

TEST_CASE("CHAF of the optional-quad grammar is the twelve-rule grammar") {
  Grammar g = augmented(kOptQuadGrammar);
  RewrittenGrammar rg = chaf_rewrite(g, classify(g));
  std::multiset<std::pair<std::string, std::string>> want{
      {"S' ::= S", "pass-through"},
      {"S ::= A S1", "chaf-head"},
      {"S ::= A Ae Ae Ae", "verbatim"},
      {"S ::= Ae S1", "chaf-head"},
      {"S1 ::= A S2", "chaf-inner"},
      {"S1 ::= A Ae Ae", "chaf-tail"},
      {"S1 ::= Ae S2", "chaf-inner"},
      {"S2 ::= A A", "chaf-tail"},
      {"S2 ::= A Ae", "chaf-tail"},
      {"S2 ::= Ae A", "chaf-tail"},
      {"A ::= a", "verbatim"},
      {"Ae ::=", "verbatim"},
  };
  CHECK(rule_role_set(rg) == want);
  CHECK(rg.nullable_start);
  // the all-nulling alternative S2 ::= Ae Ae is dropped
  CHECK(rule_set(rg.grammar).count("S2 ::= Ae Ae") == 0);
}

TEST_CASE("CHAF slot maps point into the pre-rewrite RHS") {
  Grammar g = augmented(kOptQuadGrammar);
  RewrittenGrammar rg = chaf_rewrite(g, classify(g));
  for (std::size_t i = 0; i < rg.grammar.rule_count(); ++i) {
    if (rg.grammar.render_rule(i) == "S1 ::= A S2") {
      CHECK(rg.bindings[i].slot_map() ==
            std::vector<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}});
      CHECK(rg.bindings[i].childv_len == 4);
    }
    if (rg.grammar.render_rule(i) == "S2 ::= Ae A") {
      CHECK(rg.bindings[i].slot_map() ==
            std::vector<std::pair<std::uint32_t, std::uint32_t>>{{0, 2}, {1, 3}});
    }
  }
}

TEST_CASE("CHAF with one proper nullable keeps a single chunk") {
  Grammar g = augment(parse_grammar("start: S\nS ::= B A C\nA ::= a\nA ::=\nB ::= b\nC ::= c\n"));
  RewrittenGrammar rg = chaf_rewrite(g, classify(g));
  std::multiset<std::pair<std::string, std::string>> got;
  for (std::size_t i = 0; i < rg.grammar.rule_count(); ++i)
    if (rg.bindings[i].pre_rule == std::optional<std::size_t>{0})
      got.insert({rg.grammar.render_rule(i), to_string(rg.bindings[i].role)});
  std::multiset<std::pair<std::string, std::string>> want{
      {"S ::= B A C", "chaf-tail"},
      {"S ::= B Ae C", "chaf-tail"},
  };
  CHECK(got == want);
}

TEST_CASE("CHAF rule growth is linear in pn") {
  for (int pn : {2, 5, 12, 19}) {
    Grammar g = optional_run(pn);
    RewrittenGrammar rg = chaf_rewrite(g, classify(g));
    std::size_t factored = 0;
    for (const RewriteBinding& b : rg.bindings)
      if (b.pre_rule && *b.pre_rule == 0) ++factored;
    if (pn <= 2)
      CHECK(factored <= 4);
    else
      CHECK(factored <= 3 * static_cast<std::size_t>(pn) + 1);
  }
  // contrast at pn = 19: NNF would emit 524,288
  Grammar g = optional_run(19);
  CHECK(nnf_factored_count(g, classify(g), 0) == 524288);
}

TEST_CASE("no CHAF alternative has an all-nulling RHS") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 60; ++i) {
    Grammar g = augment(random_grammar(rng));
    RewrittenGrammar rg = chaf_rewrite(g, classify(g));
    auto cls2 = classify(rg.grammar);
    for (std::size_t ri = 0; ri < rg.grammar.rule_count(); ++ri) {
      RewriteRole role = rg.bindings[ri].role;
      if (role == RewriteRole::ChafHead || role == RewriteRole::ChafInner ||
          role == RewriteRole::ChafTail)
        CHECK(cls2.rule_class[ri] != NullClass::Nulling);
    }
  }
}

TEST_CASE("eliminate_nulling keeps the duplicated rules apart by markup") {
  Grammar g = augmented(kOptQuadGrammar);
  RewrittenGrammar chaf = chaf_rewrite(g, classify(g));
  RewrittenGrammar nf = eliminate_nulling(chaf, classify(chaf.grammar));
  std::vector<std::size_t> s2_rules;
  for (std::size_t i = 0; i < nf.grammar.rule_count(); ++i)
    if (nf.grammar.render_rule(i) == "S2 ::= A") s2_rules.push_back(i);
  REQUIRE(s2_rules.size() == 2);
  auto id0 = rule_identity(nf.grammar.rule(s2_rules[0]), nf.markup_of(s2_rules[0]));
  auto id1 = rule_identity(nf.grammar.rule(s2_rules[1]), nf.markup_of(s2_rules[1]));
  CHECK(id0 != id1);
  // same LHS/RHS, markup differing only in position
  CHECK(rule_identity(nf.grammar.rule(s2_rules[0]), nullptr) ==
        rule_identity(nf.grammar.rule(s2_rules[1]), nullptr));
}

TEST_CASE("fixture: the duplication is avoidable by splitting the LHS instead") {
  // The engine keeps duplicated rules apart by markup. The alternative is a
  // rewrite that differentiates them by LHS: replace the S2 alternatives of
  // the factored optional-quad grammar with S2a/S2b forwarding rules. After
  // elimination no two rules share an (LHS, RHS) shape.
  const char* split_lhs =
      "start: S\n"
      "S ::= A S1\nS ::= A Ae Ae Ae\nS ::= Ae S1\n"
      "S1 ::= A S2\nS1 ::= A Ae Ae\nS1 ::= Ae S2\n"
      "S2 ::= S2a\nS2 ::= S2b\n"
      "S2a ::= A A\nS2a ::= A Ae\nS2b ::= Ae A\n"
      "A ::= a\nAe ::=\n";
  Grammar g = augmented(split_lhs);
  auto cls = classify(g);
  CHECK(cls.of(*g.find_symbol("Ae")) == NullClass::Nulling);
  RewrittenGrammar rg = chaf_rewrite(g, cls);  // no proper nullables: verbatim
  RewrittenGrammar nf = eliminate_nulling(rg, classify(rg.grammar));
  std::set<std::string> shapes;
  for (std::size_t i = 0; i < nf.grammar.rule_count(); ++i)
    CHECK(shapes.insert(nf.grammar.render_rule(i)).second);
  // and it recognizes the same nonempty sentences as the original
  Grammar quad = augmented(kOptQuadGrammar);
  auto want = oracle::bf_language(quad, 4).sentences;
  want.erase(std::vector<SymbolId>{});
  std::set<std::vector<std::string>> got_names, want_names;
  for (const auto& w : oracle::bf_language(nf.grammar, 4).sentences) {
    std::vector<std::string> names;
    for (SymbolId s : w) names.push_back(nf.grammar.name(s));
    got_names.insert(names);
  }
  for (const auto& w : want) {
    std::vector<std::string> names;
    for (SymbolId s : w) names.push_back(quad.name(s));
    want_names.insert(names);
  }
  CHECK(got_names == want_names);
}

TEST_CASE("rule_identity is stable for identical rules and markup") {
  Grammar g = augmented(kOptQuadGrammar);
  RewrittenGrammar nf = null_free(g);
  for (std::size_t i = 0; i < nf.grammar.rule_count(); ++i)
    CHECK(rule_identity(nf.grammar.rule(i), nf.markup_of(i)) ==
          rule_identity(nf.grammar.rule(i), nf.markup_of(i)));
}

TEST_CASE("a nulling start eliminates to the trivial grammar") {
  Grammar g = augment(parse_grammar("start: S\nS ::=\n"));
  RewrittenGrammar nf = null_free(g);
  CHECK(nf.grammar.rule_count() == 0);
  CHECK(nf.nullable_start);
}

TEST_CASE("eliminate_nulling rejects unfactored grammars") {
  Grammar g = augmented(kOptPairGrammar);
  auto cls = classify(g);
  RewrittenGrammar raw;
  raw.grammar = g;
  raw.pre = g;
  raw.bindings.resize(g.rule_count());
  CHECK_THROWS_AS(eliminate_nulling(raw, cls), GrammarError);
}

TEST_CASE("markup round-trips to the nulling-present rule") {
  std::mt19937_64 rng(4242);
  for (int i = 0; i < 80; ++i) {
    Grammar g = augment(random_grammar(rng));
    RewrittenGrammar chaf = chaf_rewrite(g, classify(g));
    RewrittenGrammar nf = eliminate_nulling(chaf, classify(chaf.grammar));
    REQUIRE(nf.nulling_present);
    for (std::size_t ri = 0; ri < nf.grammar.rule_count(); ++ri) {
      Rule back = reconstruct_nulling_present(nf, ri);
      const Rule& np = nf.nulling_present->rule(nf.markup_of(ri)->source_rule);
      CHECK(back == np);
    }
  }
}

TEST_CASE("language preservation through CHAF and elimination") {
  std::mt19937_64 rng(555);
  for (int i = 0; i < 60; ++i) {
    Grammar g = augment(random_grammar(rng));
    auto pre_lang = oracle::bf_language(g, 5).sentences;
    RewrittenGrammar chaf = chaf_rewrite(g, classify(g));
    auto chaf_lang = oracle::bf_language(chaf.grammar, 5).sentences;
    RewrittenGrammar nf = eliminate_nulling(chaf, classify(chaf.grammar));
    auto nf_lang = oracle::bf_language(nf.grammar, 5).sentences;

    auto nonempty = pre_lang;
    bool had_empty = nonempty.erase(std::vector<SymbolId>{}) > 0;
    bool chaf_empty = chaf_lang.erase(std::vector<SymbolId>{}) > 0;
    CHECK(chaf_lang == nonempty);
    // the empty sentence survives CHAF only through pure nulling chains;
    // elimination removes it for good, and nullable_start records it
    if (chaf_empty) CHECK(had_empty);
    CHECK(nf_lang == nonempty);
    CHECK(nf_lang.count({}) == 0);
    CHECK(had_empty == chaf.nullable_start);
  }
}

TEST_CASE("post-elimination grammars have no nullable symbols") {
  std::mt19937_64 rng(556);
  for (int i = 0; i < 60; ++i) {
    Grammar g = augment(random_grammar(rng));
    RewrittenGrammar nf = null_free(g);
    CHECK_FALSE(classify(nf.grammar).any_nullable());
    for (const Rule& r : nf.grammar.rules()) CHECK_FALSE(r.rhs.empty());
  }
}

TEST_CASE("NNF preserves the non-empty language") {
  std::mt19937_64 rng(557);
  for (int i = 0; i < 40; ++i) {
    Grammar g = augment(random_grammar(rng));
    auto pre_lang = oracle::bf_language(g, 4).sentences;
    RewrittenGrammar nnf = nnf_rewrite(g, classify(g));
    auto nnf_lang = oracle::bf_language(nnf.grammar, 4).sentences;
    pre_lang.erase(std::vector<SymbolId>{});
    nnf_lang.erase(std::vector<SymbolId>{});
    CHECK(pre_lang == nnf_lang);
  }
}

TEST_CASE("elimination also cleans up NNF output") {
  // the all-alias factoring S ::= Ae Ae keeps S transitively nullable in the
  // NNF output; elimination empties and drops it
  Grammar g = augmented(kOptPairGrammar);
  RewrittenGrammar nnf = nnf_rewrite(g, classify(g));
  RewrittenGrammar nf = eliminate_nulling(nnf, classify(nnf.grammar));
  std::multiset<std::string> want{"S' ::= S", "S ::= A", "S ::= A", "S ::= A A",
                                  "A ::= a"};
  CHECK(rule_set(nf.grammar) == want);
  CHECK_FALSE(classify(nf.grammar).any_nullable());
  auto nonempty = oracle::bf_language(g, 4).sentences;
  nonempty.erase(std::vector<SymbolId>{});
  CHECK(oracle::bf_language(nf.grammar, 4).sentences == nonempty);
}

TEST_CASE("CHAF binding chains partition the childV slots") {
  std::mt19937_64 rng(558);
  for (int i = 0; i < 60; ++i) {
    Grammar g = augment(random_grammar(rng));
    RewrittenGrammar chaf = chaf_rewrite(g, classify(g));
    CHECK(verify_chaf_bindings(chaf).empty());
    RewrittenGrammar nf = eliminate_nulling(chaf, classify(chaf.grammar));
    CHECK(verify_chaf_bindings(nf).empty());
  }
}

TEST_CASE("dump_rules shows roles, pre-rewrite rules, and markup") {
  Grammar g = augmented(kOptQuadGrammar);
  RewrittenGrammar nf = null_free(g);
  std::string dump = dump_rules(nf);
  CHECK(dump.find("role=chaf-head") != std::string::npos);
  CHECK(dump.find("pre=S ::= A A A A") != std::string::npos);
  CHECK(dump.find("markup=(1,Ae)") != std::string::npos);
}

TEST_SUITE_END();
