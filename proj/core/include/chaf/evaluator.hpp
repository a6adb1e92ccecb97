#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chaf/recognizer.hpp"
#include "chaf/rewrite.hpp"
#include "chaf/semantics.hpp"

namespace chaf {

// A node of a derivation tree over the nulling-free grammar. Nulled nodes
// appear only as the trivial parse of the empty input; the nulled symbols
// eliminated from rules are restored from the markup during evaluation.
struct ParseNode {
  enum class Kind { Rule, Token, Nulled };

  Kind kind = Kind::Rule;
  std::size_t rule = 0;         // Kind::Rule: rule index in the nulling-free grammar
  SymbolId symbol = kNoSymbol;  // Kind::Token / Kind::Nulled
  std::string token_value;      // Kind::Token
  std::uint32_t start = 0, end = 0;
  std::vector<ParseNode> children;
};

// One canonical derivation tree of an accepted chart: lowest rule index
// first, then the longest span for the leftmost child. The trivial parse
// yields a single nulled node for the start symbol.
std::optional<ParseNode> build_tree(const Chart& chart);

// Every derivation tree of the input, for equivalence testing. Throws
// oracle-style errors via GrammarError when `cap` is exceeded or a
// span-preserving cycle makes the count infinite.
std::vector<ParseNode> enumerate_trees(const RewrittenGrammar& g,
                                       std::span<const Token> input,
                                       std::size_t cap);

// The childV accumulator of a CHAF chain: one slot per pre-rewrite RHS
// position, each populated exactly once.
class ChildV {
 public:
  explicit ChildV(std::size_t len) : values_(len), filled_(len, false) {}

  void set(std::size_t slot, Value v);
  bool populated(std::size_t slot) const { return filled_.at(slot); }
  bool full() const;
  std::size_t size() const { return values_.size(); }
  std::span<const Value> values() const { return values_; }

 private:
  std::vector<Value> values_;
  std::vector<bool> filled_;
};

// The three CHAF steps. `child_values` excludes the trailing continuation
// argument; slots fill right to left. Eliminated nulling symbols contribute
// their nulled values at the slots recorded in the markup.
ChildV chaf_tail_step(const RewrittenGrammar& g, std::size_t rule,
                      std::span<const Value> child_values, const Semantics& sem,
                      EvalContext& ctx);
void chaf_inner_step(const RewrittenGrammar& g, std::size_t rule,
                     std::span<const Value> child_values, ChildV& cv,
                     const Semantics& sem, EvalContext& ctx);
Value chaf_head_step(const RewrittenGrammar& g, std::size_t rule,
                     std::span<const Value> child_values, ChildV* cv,
                     const Semantics& sem, EvalContext& ctx);

// Bottom-up evaluation, leftmost child first. Pass-through nodes return
// their only child's value; verbatim nodes call the pre-rewrite rule
// function directly; CHAF chains run the childV protocol.
Value evaluate(const ParseNode& tree, const Semantics& sem,
               const RewrittenGrammar& g);

// The tree reassembled in pre-rewrite terms: CHAF chains collapse into one
// rule node and the eliminated nulling symbols reappear as nulled nodes.
struct PreNode {
  ParseNode::Kind kind = ParseNode::Kind::Rule;
  std::size_t rule = 0;  // pre-rewrite rule index
  SymbolId symbol = kNoSymbol;
  std::string token_value;
  std::uint32_t start = 0, end = 0;
  std::vector<PreNode> children;
};

PreNode reassemble(const RewrittenGrammar& g, const ParseNode& tree);

// Indented dump, one node per line:
//   rule <pre-rewrite LHS ::= RHS> span=[i,j)
//   token <name>=<value>
//   nulled <name>
std::string dump_tree(const RewrittenGrammar& g, const ParseNode& tree);

}  // namespace chaf
