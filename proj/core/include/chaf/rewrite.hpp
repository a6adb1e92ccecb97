#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "chaf/classify.hpp"
#include "chaf/grammar.hpp"

namespace chaf {

enum class RewriteRole : std::uint8_t {
  PassThrough,  // unit rule whose value is its child's value (the accept rule)
  Verbatim,     // calls the pre-rewrite rule function on its children directly
  ChafHead,     // first chunk of a factored rule, ends in a continuation symbol
  ChafInner,    // middle chunk, ends in a continuation symbol
  ChafTail,     // final chunk of a factoring chain (or a whole single chunk)
  NullingAlias, // <Xe ::= > for a proper nullable X with no direct empty rule
};

const char* to_string(RewriteRole r);

// Links a rewritten rule to the rule it was factored from. `slots` has one
// entry per RHS position: the childV slot that position's value fills, or -1
// for positions that feed no slot (the trailing continuation symbol).
struct RewriteBinding {
  RewriteRole role = RewriteRole::Verbatim;
  std::optional<std::size_t> pre_rule;  // index into the pre-rewrite grammar
  std::uint32_t childv_len = 0;
  std::vector<std::int32_t> slots;

  std::vector<std::pair<std::uint32_t, std::uint32_t>> slot_map() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (std::uint32_t p = 0; p < slots.size(); ++p)
      if (slots[p] >= 0) out.emplace_back(p, static_cast<std::uint32_t>(slots[p]));
    return out;
  }
};

// One eliminated nulling symbol: where it sat in the nulling-present RHS and
// which childV slot its nulled value fills (-1 outside CHAF chains).
struct NullingInsertion {
  std::uint32_t position = 0;
  SymbolId symbol = kNoSymbol;
  std::int32_t slot = -1;

  bool operator==(const NullingInsertion&) const = default;
};

struct NullingMarkup {
  std::vector<NullingInsertion> insertions;  // ascending by position
  std::size_t source_rule = 0;               // rule in the nulling-present grammar
};

// Rule identity incorporates the nulling markup: two rules with equal
// LHS/RHS but different markup are distinct.
struct RuleIdentity {
  SymbolId lhs = kNoSymbol;
  std::vector<SymbolId> rhs;
  std::vector<std::pair<std::uint32_t, SymbolId>> nulled;

  auto operator<=>(const RuleIdentity&) const = default;
};

RuleIdentity rule_identity(const Rule& r, const NullingMarkup* m);

struct RewrittenGrammar {
  Grammar grammar;  // the current stage
  Grammar pre;      // the original augmented grammar bindings refer to
  std::optional<Grammar> nulling_present;  // set by eliminate_nulling
  std::vector<RewriteBinding> bindings;    // one per rule of `grammar`
  std::vector<NullingMarkup> markup;       // one per rule once nulling-free
  bool nullable_start = false;  // the pre-rewrite start symbol was nullable
  bool nulling_free = false;

  std::unordered_map<SymbolId, SymbolId> alias_of;      // alias -> aliased symbol
  std::unordered_set<SymbolId> continuation_symbols;

  bool is_continuation(SymbolId s) const { return continuation_symbols.count(s) > 0; }
  bool is_alias(SymbolId s) const { return alias_of.count(s) > 0; }
  // The pre-rewrite symbol an alias stands for; other symbols map to themselves.
  SymbolId pre_symbol(SymbolId s) const {
    auto it = alias_of.find(s);
    return it == alias_of.end() ? s : it->second;
  }
  const NullingMarkup* markup_of(std::size_t rule) const {
    return markup.empty() ? nullptr : &markup.at(rule);
  }
};

// Nihilist normal form: each non-accept rule with pn proper nullables on its
// RHS is factored into the 2^pn alias/symbol choices; nulling rules of proper
// nullables are dropped and replaced by one <Xe ::= > alias rule per factored
// proper nullable. The accept rule passes through.
RewrittenGrammar nnf_rewrite(const Grammar& g, const SymbolClassification& cls);

// Number of rules the NNF factoring emits for one rule (2^pn), without
// materializing them.
std::uint64_t nnf_factored_count(const Grammar& g, const SymbolClassification& cls,
                                 std::size_t rule);

// CHAF: rules with proper nullables are chunked left to right, cutting after
// the first proper nullable while more than two remain, with a fresh
// continuation symbol joining the chunks; each chunk's alternatives take the
// null/non-null choice per proper nullable, plus a tail-null alternative for
// non-final chunks when the remainder is all-nullable. Alternatives with an
// entirely nulling RHS are dropped. Linear in pn.
RewrittenGrammar chaf_rewrite(const Grammar& g, const SymbolClassification& cls);

// Removes every nulling symbol occurrence (recording markup), every rule
// defining a nulling symbol, and every rule whose RHS became empty. The
// result has no nullable symbols at all; cls must classify rg.grammar.
RewrittenGrammar eliminate_nulling(const RewrittenGrammar& rg,
                                   const SymbolClassification& cls);

// Re-inserts the eliminated symbols; the result equals the nulling-present rule.
Rule reconstruct_nulling_present(const RewrittenGrammar& rg, std::size_t rule);

// One line per rule:
//   LHS ::= RHS   # role=<role> pre=<pre-rewrite rule or -> markup=<(pos,sym),...>
std::string dump_rules(const RewrittenGrammar& rg);

// Static CHAF protocol check: along every head/inner*/tail chain the slot
// maps must partition {0..childv_len-1}. Returns human-readable violations.
std::vector<std::string> verify_chaf_bindings(const RewrittenGrammar& rg);

}  // namespace chaf
