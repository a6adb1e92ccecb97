#include "chaf/grammar.hpp"

#include <algorithm>
#include <sstream>

namespace chaf {

SymbolId Grammar::add_symbol(std::string name, bool terminal) {
  if (by_name_.count(name)) throw GrammarError("duplicate symbol name: " + name);
  SymbolId id = static_cast<SymbolId>(symbols_.size());
  by_name_.emplace(name, id);
  symbols_.push_back(SymbolInfo{std::move(name), terminal});
  rules_of_.emplace_back();
  return id;
}

SymbolId Grammar::intern(std::string_view name, bool terminal_if_new) {
  auto it = by_name_.find(std::string(name));
  if (it != by_name_.end()) return it->second;
  return add_symbol(std::string(name), terminal_if_new);
}

std::optional<SymbolId> Grammar::find_symbol(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::string Grammar::fresh_name(const std::string& base) const {
  std::string candidate = base;
  int n = 2;
  while (by_name_.count(candidate)) {
    candidate = base + "_" + std::to_string(n++);
  }
  return candidate;
}

std::vector<SymbolId> Grammar::terminals() const {
  std::vector<SymbolId> out;
  for (SymbolId id = 0; id < static_cast<SymbolId>(symbols_.size()); ++id)
    if (symbols_[id].terminal) out.push_back(id);
  return out;
}

std::size_t Grammar::add_rule(Rule r) {
  if (r.lhs < 0 || r.lhs >= static_cast<SymbolId>(symbols_.size()))
    throw GrammarError("rule LHS is not a symbol of this grammar");
  if (symbols_[r.lhs].terminal)
    throw GrammarError("rule LHS must be a nonterminal: " + symbols_[r.lhs].name);
  for (SymbolId s : r.rhs)
    if (s < 0 || s >= static_cast<SymbolId>(symbols_.size()))
      throw GrammarError("rule RHS symbol is not in the vocabulary");
  std::size_t index = rules_.size();
  rules_of_[r.lhs].push_back(index);
  rules_.push_back(std::move(r));
  return index;
}

const std::vector<std::size_t>& Grammar::rules_of(SymbolId lhs) const {
  return rules_of_.at(lhs);
}

std::size_t Grammar::accept_rule() const {
  if (!augmented()) throw GrammarError("grammar is not augmented");
  const auto& of_accept = rules_of_.at(accept_);
  if (of_accept.size() != 1) throw GrammarError("accept rule is not unique");
  return of_accept.front();
}

std::string Grammar::render_rule(const Rule& r) const {
  std::string out = name(r.lhs) + " ::=";
  for (SymbolId s : r.rhs) {
    out += ' ';
    out += name(s);
  }
  return out;
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

Grammar parse_grammar(std::string_view text) {
  Grammar g;
  std::optional<std::string> start_name;
  int start_line = 0;

  std::vector<std::pair<int, std::vector<std::string>>> rule_lines;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto toks = split_ws(raw);
    if (toks.empty()) continue;
    if (toks.front() == "start:") {
      if (toks.size() != 2)
        throw GrammarError("expected 'start: <name>'", lineno);
      if (start_name)
        throw GrammarError("duplicate start declaration (first on line " +
                               std::to_string(start_line) + ")",
                           lineno);
      start_name = toks[1];
      start_line = lineno;
      continue;
    }
    if (toks.size() < 2 || toks[1] != "::=")
      throw GrammarError("expected '<lhs> ::= <sym> ...'", lineno);
    if (toks.front() == "::=" || toks.front() == "#")
      throw GrammarError("bad LHS symbol name", lineno);
    for (std::size_t i = 2; i < toks.size(); ++i)
      if (toks[i] == "::=") throw GrammarError("'::=' repeated in rule", lineno);
    rule_lines.emplace_back(lineno, std::move(toks));
  }

  if (!start_name) throw GrammarError("grammar has no start declaration");

  // First pass interns the LHS symbols so terminal-ness is known when the
  // rules are added.
  for (auto& [line, toks] : rule_lines) g.intern(toks[0], false);
  for (auto& [line, toks] : rule_lines) {
    Rule r;
    r.lhs = *g.find_symbol(toks[0]);
    for (std::size_t i = 2; i < toks.size(); ++i)
      r.rhs.push_back(g.intern(toks[i], true));
    g.add_rule(std::move(r));
  }

  auto start = g.find_symbol(*start_name);
  if (!start)
    throw GrammarError("start symbol undefined: " + *start_name, start_line);
  g.set_start(*start);
  return g;
}

Grammar augment(const Grammar& g) {
  if (g.augmented()) throw GrammarError("grammar is already augmented");
  if (g.start() == kNoSymbol) throw GrammarError("grammar has no start symbol");
  Grammar out = g;
  SymbolId accept =
      out.add_symbol(out.fresh_name(out.name(out.start()) + "'"), false);
  out.add_rule(Rule{accept, {out.start()}});
  out.set_accept(accept);
  return out;
}

}  // namespace chaf
