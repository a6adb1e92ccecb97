#pragma once

#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "chaf/grammar.hpp"
#include "chaf/semantics.hpp"

// Deliberately naive reference implementations, kept free of any dependency
// on the rewrite and recognizer modules so they cannot share bugs with them.
// Desk scale only.
namespace chaf::oracle {

struct OracleLimits {
  std::size_t max_form_len = 24;   // sentential forms longer than this are pruned
  std::size_t max_steps = 500000;  // expansion budget for the rewriting searches
  std::size_t max_trees = 5000;    // derivation-tree cap for bf_parse_values
};

class OracleCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SentenceSet {
  std::size_t max_len = 0;
  std::set<std::vector<SymbolId>> sentences;

  bool contains(std::span<const SymbolId> w) const {
    return sentences.count(std::vector<SymbolId>(w.begin(), w.end())) > 0;
  }
};

// True iff breadth-first rewriting from <s> reaches the empty string.
// Memoizes sentential forms; forms containing terminals are dead ends.
bool bf_nullable(const Grammar& g, SymbolId s, const OracleLimits& lim = {});

// True iff every sentential form derivable from <s> is itself nullable,
// decided by breadth-first enumeration of derivable forms.
bool bf_nulling(const Grammar& g, SymbolId s, const OracleLimits& lim = {});

// Exact set of sentences of length <= max_len, by exhaustive memoized
// bottom-up expansion of per-symbol bounded languages.
SentenceSet bf_language(const Grammar& g, std::size_t max_len);

// Same, but derived from an arbitrary symbol; works unaugmented.
SentenceSet bf_language_from(const Grammar& g, SymbolId from, std::size_t max_len);

bool bf_recognize(const Grammar& g, std::span<const SymbolId> w);

// Terminals t such that prefix.t is a prefix of some sentence of g.
std::set<SymbolId> bf_acceptable_tokens(const Grammar& g,
                                        std::span<const SymbolId> prefix);

// Symbols that derive at least one terminal string.
std::vector<bool> productive_symbols(const Grammar& g);

// Evaluates every derivation tree of w and returns the root values, one per
// tree. Subtrees spanning no input collapse to their topmost symbol's nulled
// value. Throws OracleCapError when the tree count exceeds lim.max_trees or
// a span-preserving derivation cycle makes it infinite.
std::vector<Value> bf_parse_values(const Grammar& g, std::span<const Token> w,
                                   const Semantics& sem,
                                   const OracleLimits& lim = {});

}  // namespace chaf::oracle
