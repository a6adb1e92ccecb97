#include "chaf/oracle.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace chaf::oracle {

namespace {

using Form = std::vector<SymbolId>;

// Expands the leftmost symbol of `form` one step, in every way. Leftmost
// rewriting reaches the empty string whenever any derivation does, and for
// the nulling check a blocked left context is itself the non-nullable
// witness the search is after.
void expand_leftmost(const Grammar& g, const Form& form, std::vector<Form>& out) {
  if (form.empty() || g.is_terminal(form[0])) return;
  for (std::size_t ri : g.rules_of(form[0])) {
    const Rule& r = g.rule(ri);
    Form next;
    next.reserve(form.size() - 1 + r.rhs.size());
    next.insert(next.end(), r.rhs.begin(), r.rhs.end());
    next.insert(next.end(), form.begin() + 1, form.end());
    out.push_back(std::move(next));
  }
}

// A derivation to the empty string never needs forms beyond
// (maxRHS-1)*nts + 1 symbols: some witness tree repeats no nonterminal
// along a path, and leftmost traversal keeps at most (maxRHS - 1) per
// level plus the spine. The nulling search needs twice that, since
// exposing a buried symbol erases an all-nullable prefix first.
std::size_t form_cap(const Grammar& g, const OracleLimits& lim,
                     std::size_t factor) {
  std::size_t nts = 0, max_rhs = 1;
  for (std::size_t s = 0; s < g.symbol_count(); ++s)
    if (!g.is_terminal(static_cast<SymbolId>(s))) ++nts;
  for (const Rule& r : g.rules()) max_rhs = std::max(max_rhs, r.rhs.size());
  return std::min(lim.max_form_len, factor * (max_rhs - 1) * nts + 1);
}

}  // namespace

bool bf_nullable(const Grammar& g, SymbolId s, const OracleLimits& lim) {
  if (g.is_terminal(s)) return false;
  const std::size_t cap = form_cap(g, lim, 1);
  std::deque<Form> queue{Form{s}};
  std::set<Form> seen{Form{s}};
  std::size_t steps = 0;
  std::vector<Form> next;
  while (!queue.empty()) {
    Form form = std::move(queue.front());
    queue.pop_front();
    if (form.empty()) return true;
    if (++steps > lim.max_steps)
      throw OracleCapError("bf_nullable: expansion budget exceeded");
    next.clear();
    expand_leftmost(g, form, next);
    for (Form& f : next) {
      if (f.size() > cap) continue;
      // A terminal can never be rewritten away.
      if (std::any_of(f.begin(), f.end(),
                      [&](SymbolId x) { return g.is_terminal(x); }))
        continue;
      if (seen.insert(f).second) queue.push_back(f);
    }
  }
  return false;
}

bool bf_nulling(const Grammar& g, SymbolId s, const OracleLimits& lim) {
  if (g.is_terminal(s)) return false;
  std::map<SymbolId, bool> nullable_memo;
  auto nullable = [&](SymbolId x) {
    auto it = nullable_memo.find(x);
    if (it != nullable_memo.end()) return it->second;
    bool v = bf_nullable(g, x, lim);
    nullable_memo.emplace(x, v);
    return v;
  };
  if (!nullable(s)) return false;

  // Enumerate derivable sentential forms; a single form containing a
  // non-nullable symbol disproves nulling.
  const std::size_t cap = form_cap(g, lim, 2);
  std::deque<Form> queue{Form{s}};
  std::set<Form> seen{Form{s}};
  std::size_t steps = 0;
  std::vector<Form> next;
  while (!queue.empty()) {
    Form form = std::move(queue.front());
    queue.pop_front();
    for (SymbolId x : form)
      if (g.is_terminal(x) || !nullable(x)) return false;
    if (++steps > lim.max_steps)
      throw OracleCapError("bf_nulling: expansion budget exceeded");
    next.clear();
    expand_leftmost(g, form, next);
    for (Form& f : next) {
      if (f.size() > cap) continue;
      if (seen.insert(f).second) queue.push_back(f);
    }
  }
  return true;
}

namespace {

using Lang = std::set<std::vector<SymbolId>>;

// Bounded concatenation of string sets.
Lang concat(const Lang& a, const Lang& b, std::size_t max_len) {
  Lang out;
  for (const auto& u : a)
    for (const auto& v : b) {
      if (u.size() + v.size() > max_len) continue;
      auto w = u;
      w.insert(w.end(), v.begin(), v.end());
      out.insert(std::move(w));
    }
  return out;
}

Lang seq_language(const std::vector<SymbolId>& rhs, const std::vector<Lang>& lang,
                  std::size_t max_len) {
  Lang acc{{}};
  for (SymbolId s : rhs) {
    acc = concat(acc, lang[s], max_len);
    if (acc.empty()) break;
  }
  return acc;
}

// Exact per-symbol languages of sentences with length <= max_len, as the
// least fixed point over the rules.
std::vector<Lang> bounded_languages(const Grammar& g, std::size_t max_len) {
  std::vector<Lang> lang(g.symbol_count());
  for (std::size_t s = 0; s < g.symbol_count(); ++s)
    if (g.is_terminal(static_cast<SymbolId>(s)))
      lang[s].insert({static_cast<SymbolId>(s)});
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Rule& r : g.rules()) {
      for (auto& w : seq_language(r.rhs, lang, max_len))
        if (lang[r.lhs].insert(w).second) changed = true;
    }
  }
  return lang;
}

}  // namespace

SentenceSet bf_language(const Grammar& g, std::size_t max_len) {
  if (!g.augmented()) throw GrammarError("bf_language requires an augmented grammar");
  return bf_language_from(g, g.accept(), max_len);
}

SentenceSet bf_language_from(const Grammar& g, SymbolId from, std::size_t max_len) {
  auto lang = bounded_languages(g, max_len);
  return SentenceSet{max_len, std::move(lang.at(from))};
}

bool bf_recognize(const Grammar& g, std::span<const SymbolId> w) {
  return bf_language(g, w.size()).contains(w);
}

std::vector<bool> productive_symbols(const Grammar& g) {
  std::vector<bool> prod(g.symbol_count(), false);
  for (std::size_t s = 0; s < g.symbol_count(); ++s)
    if (g.is_terminal(static_cast<SymbolId>(s))) prod[s] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Rule& r : g.rules()) {
      if (prod[r.lhs]) continue;
      bool all = true;
      for (SymbolId s : r.rhs)
        if (!prod[s]) { all = false; break; }
      if (all) {
        prod[r.lhs] = true;
        changed = true;
      }
    }
  }
  return prod;
}

std::set<SymbolId> bf_acceptable_tokens(const Grammar& g,
                                        std::span<const SymbolId> prefix) {
  if (!g.augmented())
    throw GrammarError("bf_acceptable_tokens requires an augmented grammar");
  const std::size_t k = prefix.size() + 1;
  auto full = bounded_languages(g, k);
  auto prod = productive_symbols(g);

  // viab[X] = strings of length <= k extendable to a sentence of X.
  std::vector<Lang> viab(g.symbol_count());
  for (std::size_t s = 0; s < g.symbol_count(); ++s)
    if (g.is_terminal(static_cast<SymbolId>(s))) {
      viab[s].insert({});
      if (k >= 1) viab[s].insert({static_cast<SymbolId>(s)});
    }

  bool changed = true;
  while (changed) {
    changed = false;
    for (const Rule& r : g.rules()) {
      const auto& rhs = r.rhs;
      std::size_t n = rhs.size();
      // productive_suffix[i]: every symbol of rhs[i..] derives some sentence
      std::vector<bool> productive_suffix(n + 1, true);
      for (std::size_t i = n; i-- > 0;)
        productive_suffix[i] = productive_suffix[i + 1] && prod[rhs[i]];
      std::vector<Lang> suffix(n + 1);
      suffix[n].insert({});
      for (std::size_t i = n; i-- > 0;) {
        if (productive_suffix[i + 1])
          suffix[i] = viab[rhs[i]];
        for (const auto& u : full[rhs[i]])
          for (const auto& v : suffix[i + 1]) {
            if (u.size() + v.size() > k) continue;
            auto w = u;
            w.insert(w.end(), v.begin(), v.end());
            suffix[i].insert(std::move(w));
          }
      }
      for (auto& w : suffix[0])
        if (viab[r.lhs].insert(w).second) changed = true;
    }
  }

  std::set<SymbolId> out;
  std::vector<SymbolId> want(prefix.begin(), prefix.end());
  want.push_back(kNoSymbol);
  for (SymbolId t : g.terminals()) {
    want.back() = t;
    if (viab[g.accept()].count(want)) out.insert(t);
  }
  return out;
}

namespace {

struct TreeEnumerator {
  const Grammar& g;
  std::span<const Token> w;
  const Semantics& sem;
  const OracleLimits& lim;
  std::map<SymbolId, bool> nullable_memo;
  std::map<std::tuple<SymbolId, std::uint32_t, std::uint32_t>, std::vector<Value>> memo;
  std::set<std::tuple<SymbolId, std::uint32_t, std::uint32_t>> in_progress;
  std::size_t produced = 0;

  bool nullable(SymbolId x) {
    auto it = nullable_memo.find(x);
    if (it != nullable_memo.end()) return it->second;
    bool v = bf_nullable(g, x, lim);
    nullable_memo.emplace(x, v);
    return v;
  }

  void bump(std::size_t n) {
    produced += n;
    if (produced > lim.max_trees)
      throw OracleCapError("bf_parse_values: derivation count above cap");
  }

  // All values of X spanning w[i, j).
  std::vector<Value> values(SymbolId x, std::uint32_t i, std::uint32_t j) {
    auto key = std::make_tuple(x, i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<Value> out;
    EvalContext ctx{&g, i, j};
    if (i == j) {
      // Nulled subtrees collapse to their topmost symbol.
      if (nullable(x)) {
        out.push_back(sem.nulled_value(ctx, x));
        bump(1);
      }
      memo.emplace(key, out);
      return out;
    }
    if (g.is_terminal(x)) {
      if (j == i + 1 && w[i].symbol == x) {
        if (!sem.terminal) throw GrammarError("semantics has no terminal function");
        out.push_back(sem.terminal(ctx, x, w[i].value));
        bump(1);
      }
      memo.emplace(key, out);
      return out;
    }
    if (!in_progress.insert(key).second)
      throw OracleCapError("bf_parse_values: cyclic derivation, infinitely many trees");
    for (std::size_t ri : g.rules_of(x)) {
      const Rule& r = g.rule(ri);
      std::vector<std::vector<Value>> column;
      collect_splits(r, 0, i, j, i, j, column, ri, out);
    }
    in_progress.erase(key);
    memo.emplace(key, out);
    return out;
  }

  // Recursively splits [cur, end) over rhs[pos..], accumulating one value
  // list per child, and applies the rule function to every combination.
  void collect_splits(const Rule& r, std::size_t pos, std::uint32_t cur,
                      std::uint32_t end, std::uint32_t node_start,
                      std::uint32_t node_end,
                      std::vector<std::vector<Value>>& column,
                      std::size_t rule_index, std::vector<Value>& out) {
    if (pos == r.rhs.size()) {
      if (cur != end) return;
      apply_rule(rule_index, node_start, node_end, column, out);
      return;
    }
    bool last = pos + 1 == r.rhs.size();
    for (std::uint32_t mid = last ? end : cur; mid <= end; ++mid) {
      auto vals = values(r.rhs[pos], cur, mid);
      if (!vals.empty()) {
        column.push_back(std::move(vals));
        collect_splits(r, pos + 1, mid, end, node_start, node_end, column,
                       rule_index, out);
        column.pop_back();
      }
      if (last) break;
    }
  }

  void apply_rule(std::size_t rule_index, std::uint32_t node_start,
                  std::uint32_t node_end,
                  const std::vector<std::vector<Value>>& column,
                  std::vector<Value>& out) {
    const RuleFn* fn = sem.find_rule(rule_index);
    if (!fn)
      throw GrammarError("semantics missing for rule: " + g.render_rule(rule_index));
    if (column.empty()) return;
    std::vector<std::size_t> pick(column.size(), 0);
    while (true) {
      std::vector<Value> kids;
      kids.reserve(column.size());
      for (std::size_t c = 0; c < column.size(); ++c) kids.push_back(column[c][pick[c]]);
      EvalContext ctx{&g, node_start, node_end};
      out.push_back((*fn)(ctx, kids));
      bump(1);
      std::size_t c = column.size();
      while (true) {
        if (c == 0) return;
        --c;
        if (++pick[c] < column[c].size()) break;
        pick[c] = 0;
      }
    }
  }
};

}  // namespace

std::vector<Value> bf_parse_values(const Grammar& g, std::span<const Token> w,
                                   const Semantics& sem, const OracleLimits& lim) {
  if (!g.augmented())
    throw GrammarError("bf_parse_values requires an augmented grammar");
  if (w.empty()) {
    // Trivial parse: the whole forest collapses to the nulled start symbol.
    EvalContext ctx{&g, 0, 0};
    if (bf_nullable(g, g.start(), lim)) return {sem.nulled_value(ctx, g.start())};
    return {};
  }
  TreeEnumerator en{g, w, sem, lim, {}, {}, {}, 0};
  return en.values(g.accept(), 0, static_cast<std::uint32_t>(w.size()));
}

}  // namespace chaf::oracle
