#pragma once

#include <random>
#include <string>
#include <vector>

#include "chaf/grammar.hpp"
#include "chaf/oracle.hpp"

namespace chaf::testing {

struct GenParams {
  int min_nts = 2, max_nts = 3;
  int min_ts = 1, max_ts = 2;
  int max_rules = 8;
  int max_rhs = 3;
  double empty_rule_prob = 0.3;
  bool nulling_free = false;        // no empty rules at all
  bool require_productive = false;  // every nonterminal derives a sentence
  bool require_nullable = false;    // at least one nullable symbol
};

// Deterministic (seeded) random grammar, unaugmented. N0 is the start symbol.
inline Grammar random_grammar(std::mt19937_64& rng, const GenParams& p = {}) {
  auto uniform = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto chance = [&](double pr) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < pr;
  };
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Grammar g;
    int nts = uniform(p.min_nts, p.max_nts);
    int ts = uniform(p.min_ts, p.max_ts);
    std::vector<SymbolId> all;
    for (int i = 0; i < nts; ++i)
      all.push_back(g.add_symbol("N" + std::to_string(i), false));
    for (int i = 0; i < ts; ++i)
      all.push_back(g.add_symbol("t" + std::to_string(i), true));
    int nrules = uniform(nts, p.max_rules);
    std::vector<Rule> rules;
    for (int i = 0; i < nrules; ++i) {
      Rule r;
      r.lhs = all[uniform(0, nts - 1)];
      if (!(p.nulling_free || !chance(p.empty_rule_prob))) {
        // empty rule
      } else {
        int len = uniform(1, p.max_rhs);
        for (int k = 0; k < len; ++k)
          r.rhs.push_back(all[uniform(0, static_cast<int>(all.size()) - 1)]);
      }
      bool dup = false;
      for (const Rule& prev : rules)
        if (prev == r) { dup = true; break; }
      if (!dup) rules.push_back(std::move(r));
    }
    for (Rule& r : rules) g.add_rule(std::move(r));
    g.set_start(all[0]);

    if (p.require_productive) {
      auto prod = oracle::productive_symbols(g);
      bool ok = true;
      for (SymbolId s = 0; s < static_cast<SymbolId>(g.symbol_count()); ++s)
        if (!prod[s]) { ok = false; break; }
      if (!ok) continue;
    }
    if (p.require_nullable) {
      bool any = false;
      for (const Rule& r : g.rules())
        if (r.rhs.empty()) { any = true; break; }
      if (!any) continue;
    }
    return g;
  }
  throw std::runtime_error("random_grammar: no grammar met the constraints");
}

// All token sequences over the grammar's terminals with length <= max_len,
// shortest first, capped.
inline std::vector<std::vector<Token>> all_inputs(const Grammar& g,
                                                  std::size_t max_len,
                                                  std::size_t cap) {
  std::vector<SymbolId> ts = g.terminals();
  std::vector<std::vector<Token>> out{{}};
  std::size_t level_begin = 0;
  for (std::size_t len = 1; len <= max_len && !ts.empty(); ++len) {
    std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (SymbolId t : ts) {
        auto w = out[i];
        w.push_back(Token{t, ""});
        out.push_back(std::move(w));
        if (out.size() >= cap) return out;
      }
    }
    level_begin = level_end;
  }
  return out;
}

inline std::vector<SymbolId> symbols_of(const std::vector<Token>& w) {
  std::vector<SymbolId> out;
  out.reserve(w.size());
  for (const Token& t : w) out.push_back(t.symbol);
  return out;
}

}  // namespace chaf::testing
