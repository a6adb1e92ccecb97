#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace chaf {

// Symbols are interned per grammar; a SymbolId is an index into the
// grammar's symbol table. The empty string is not a symbol and has no id.
using SymbolId = std::int32_t;
inline constexpr SymbolId kNoSymbol = -1;

struct SymbolInfo {
  std::string name;
  bool terminal = false;
};

struct Rule {
  SymbolId lhs = kNoSymbol;
  std::vector<SymbolId> rhs;  // may be empty (an empty rule)

  bool operator==(const Rule&) const = default;
};

struct Token {
  SymbolId symbol = kNoSymbol;
  std::string value;  // application token value, may be empty
};

class GrammarError : public std::runtime_error {
 public:
  explicit GrammarError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg
                                    : msg),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

class Grammar {
 public:
  SymbolId add_symbol(std::string name, bool terminal);
  // Find-or-add. New symbols get the given terminal flag.
  SymbolId intern(std::string_view name, bool terminal_if_new);
  std::optional<SymbolId> find_symbol(std::string_view name) const;
  // Returns a name not yet in the symbol table, derived from `base`.
  std::string fresh_name(const std::string& base) const;

  const SymbolInfo& symbol(SymbolId id) const { return symbols_.at(id); }
  const std::string& name(SymbolId id) const { return symbols_.at(id).name; }
  bool is_terminal(SymbolId id) const { return symbols_.at(id).terminal; }
  void set_terminal(SymbolId id, bool terminal) { symbols_.at(id).terminal = terminal; }
  std::size_t symbol_count() const { return symbols_.size(); }
  std::vector<SymbolId> terminals() const;

  std::size_t add_rule(Rule r);
  const Rule& rule(std::size_t i) const { return rules_.at(i); }
  std::size_t rule_count() const { return rules_.size(); }
  const std::vector<Rule>& rules() const { return rules_; }
  // Indices of the rules with the given LHS.
  const std::vector<std::size_t>& rules_of(SymbolId lhs) const;

  SymbolId start() const { return start_; }
  void set_start(SymbolId s) { start_ = s; }
  SymbolId accept() const { return accept_; }
  void set_accept(SymbolId a) { accept_ = a; }
  bool augmented() const { return accept_ != kNoSymbol; }
  std::size_t accept_rule() const;  // index of <accept ::= start>; augmented only

  std::string render_rule(const Rule& r) const;
  std::string render_rule(std::size_t i) const { return render_rule(rules_.at(i)); }

 private:
  std::vector<SymbolInfo> symbols_;
  std::unordered_map<std::string, SymbolId> by_name_;
  std::vector<Rule> rules_;
  std::vector<std::vector<std::size_t>> rules_of_;  // indexed by lhs symbol
  SymbolId start_ = kNoSymbol;
  SymbolId accept_ = kNoSymbol;
};

// Parses the grammar file format:
//   start: <name>          exactly once
//   <lhs> ::= <sym> ...    empty RHS permitted
//   # comment              blank lines ignored
// Symbol names are runs of non-whitespace other than "::=" and "#".
// Terminals are the symbols that never appear as an LHS.
// Throws GrammarError with a line number on bad input.
Grammar parse_grammar(std::string_view text);

// Adds a fresh accept symbol and the rule <accept ::= start>.
// Throws GrammarError if g is already augmented.
Grammar augment(const Grammar& g);

}  // namespace chaf
