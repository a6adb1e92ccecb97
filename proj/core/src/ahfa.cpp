#include "chaf/ahfa.hpp"

#include <algorithm>
#include <deque>
#include <iomanip>
#include <set>
#include <sstream>

namespace chaf {

std::optional<std::size_t> Ahfa::go(std::size_t state,
                                    std::optional<SymbolId> x) const {
  auto it = transitions_.find({state, x ? *x : kNoSymbol});
  if (it == transitions_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Ahfa::find_state(
    const std::vector<DottedRule>& items) const {
  auto sorted = items;
  std::sort(sorted.begin(), sorted.end());
  for (const AhfaState& s : states_)
    if (s.items == sorted) return s.id;
  return std::nullopt;
}

namespace {

bool is_nulling_symbol(const RewrittenGrammar& rg, const SymbolClassification& cls,
                       SymbolId s) {
  if (rg.is_alias(s)) return true;
  if (s < static_cast<SymbolId>(cls.symbol_class.size())) return cls.nulling(s);
  return false;
}

// Adds next_dr(d) whenever postdot(d) is nulling, to a fixed point.
void nulling_closure(const RewrittenGrammar& rg, const SymbolClassification& cls,
                     std::set<DottedRule>& items) {
  const Grammar& g = rg.grammar;
  std::deque<DottedRule> work(items.begin(), items.end());
  while (!work.empty()) {
    DottedRule d = work.front();
    work.pop_front();
    auto pd = postdot(g, d);
    if (!pd || !is_nulling_symbol(rg, cls, *pd)) continue;
    DottedRule n = *next_dr(g, d);
    if (items.insert(n).second) work.push_back(n);
  }
}

// The dot-0 prediction closure of the postdot nonterminals of `from`,
// closed together with nulling advancement (an advanced dot exposes new
// postdot symbols to predict through).
std::set<DottedRule> predicted_items(const RewrittenGrammar& rg,
                                     const SymbolClassification& cls,
                                     const std::vector<DottedRule>& from) {
  const Grammar& g = rg.grammar;
  std::set<DottedRule> items;
  std::set<SymbolId> predicted;
  std::deque<SymbolId> work;
  auto predict_symbol = [&](SymbolId s) {
    if (g.is_terminal(s)) return;
    if (predicted.insert(s).second) work.push_back(s);
  };
  for (DottedRule d : from)
    if (auto pd = postdot(g, d)) predict_symbol(*pd);
  while (!work.empty()) {
    SymbolId s = work.front();
    work.pop_front();
    std::set<DottedRule> added;
    for (std::size_t ri : g.rules_of(s))
      added.insert(DottedRule{static_cast<std::uint32_t>(ri), 0});
    nulling_closure(rg, cls, added);
    for (DottedRule d : added)
      if (items.insert(d).second)
        if (auto pd = postdot(g, d)) predict_symbol(*pd);
  }
  return items;
}

}  // namespace

Ahfa build_ahfa(const RewrittenGrammar& rg) {
  const Grammar& g = rg.grammar;
  if (!g.augmented()) throw GrammarError("AHFA construction requires augmentation");
  SymbolClassification cls = classify(g);
  for (const Rule& r : g.rules())
    if (r.rhs.empty() && !is_nulling_symbol(rg, cls, r.lhs))
      throw GrammarError(
          "AHFA construction requires a factored grammar: proper nullable " +
          g.name(r.lhs) + " has an empty rule");

  Ahfa a;
  std::map<std::vector<DottedRule>, std::size_t> known;
  std::deque<std::size_t> work;

  auto intern_state = [&](std::set<DottedRule> items, bool predicted) {
    std::vector<DottedRule> sorted(items.begin(), items.end());
    auto it = known.find(sorted);
    if (it != known.end()) return it->second;
    std::size_t id = a.states_.size();
    a.states_.push_back(AhfaState{id, sorted, predicted});
    known.emplace(std::move(sorted), id);
    work.push_back(id);
    return id;
  };

  std::size_t accept_rule = g.accept_rule();
  std::set<DottedRule> start{DottedRule{static_cast<std::uint32_t>(accept_rule), 0}};
  nulling_closure(rg, cls, start);
  intern_state(std::move(start), false);

  while (!work.empty()) {
    std::size_t id = work.front();
    work.pop_front();
    // Symbol transitions, in symbol order for deterministic ids.
    std::map<SymbolId, std::set<DottedRule>> kernels;
    for (DottedRule d : a.states_[id].items)
      if (auto pd = postdot(g, d)) kernels[*pd].insert(*next_dr(g, d));
    for (auto& [sym, kernel] : kernels) {
      nulling_closure(rg, cls, kernel);
      std::size_t to = intern_state(std::move(kernel), false);
      a.transitions_[{id, sym}] = to;
    }
    // The epsilon transition pairs a confirmed state with its companion
    // predicted state. Predicted states are prediction-closed already.
    if (!a.states_[id].predicted) {
      auto items = predicted_items(rg, cls, a.states_[id].items);
      if (!items.empty()) {
        std::size_t to = intern_state(std::move(items), true);
        a.transitions_[{id, kNoSymbol}] = to;
      }
    }
  }
  return a;
}

AhfaStats ahfa_statistics(const Ahfa& a, const RewrittenGrammar& rg) {
  const Grammar& g = rg.grammar;
  AhfaStats s;
  std::map<DottedRule, std::vector<std::size_t>> occurrence;
  for (const AhfaState& st : a.states()) {
    AhfaKindStats& k = st.predicted ? s.predicted : s.confirmed;
    ++k.size_histogram[st.items.size()];
    ++k.count;
    k.mean_size += static_cast<double>(st.items.size());
    k.mean_square_size +=
        static_cast<double>(st.items.size()) * static_cast<double>(st.items.size());
    std::set<SymbolId> completed;
    for (DottedRule d : st.items) {
      occurrence[d].push_back(st.id);
      if (is_completion(g, d)) completed.insert(g.rule(d.rule).lhs);
    }
    s.completed_lhs_counts.push_back(completed.size());
  }
  for (AhfaKindStats* k : {&s.confirmed, &s.predicted}) {
    if (k->count == 0) continue;
    k->mean_size /= static_cast<double>(k->count);
    k->mean_square_size /= static_cast<double>(k->count);
  }
  for (auto& [dr, ids] : occurrence)
    if (ids.size() > 1) s.duplicates.emplace_back(dr, ids);
  return s;
}

std::string render_states(const Ahfa& a, const RewrittenGrammar& rg) {
  std::ostringstream os;
  const Grammar& g = rg.grammar;
  for (const AhfaState& st : a.states()) {
    os << "state " << st.id << (st.predicted ? " (predicted)" : " (confirmed)")
       << ":\n";
    for (DottedRule d : st.items) os << "  " << render_dotted(g, d) << '\n';
  }
  os << "transitions:\n";
  for (const auto& [key, to] : a.transitions()) {
    os << "  " << key.first << " --"
       << (key.second == kNoSymbol ? std::string("eps") : g.name(key.second))
       << "--> " << to << '\n';
  }
  return os.str();
}

std::string render_dot(const Ahfa& a, const RewrittenGrammar& rg) {
  std::ostringstream os;
  const Grammar& g = rg.grammar;
  os << "digraph ahfa {\n  rankdir=LR;\n  node [shape=box];\n";
  for (const AhfaState& st : a.states()) {
    os << "  s" << st.id << " [label=\"" << st.id
       << (st.predicted ? " P" : " C") << "\\n";
    for (DottedRule d : st.items) {
      std::string line = render_dotted(g, d);
      os << line << "\\n";
    }
    os << "\"];\n";
  }
  for (const auto& [key, to] : a.transitions()) {
    os << "  s" << key.first << " -> s" << to << " [label=\""
       << (key.second == kNoSymbol ? std::string("eps") : g.name(key.second))
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

namespace {

void render_kind(std::ostringstream& os, const char* name, const AhfaKindStats& k) {
  os << name << " states: " << k.count << '\n';
  os << "  size  occurrences\n";
  for (const auto& [size, n] : k.size_histogram)
    os << "  " << std::setw(4) << size << "  " << n << '\n';
  os << std::fixed << std::setprecision(4);
  os << "  mean size:        " << k.mean_size << '\n';
  os << "  mean square size: " << k.mean_square_size << '\n';
}

}  // namespace

std::string render_stats(const AhfaStats& s, const Ahfa& a,
                         const RewrittenGrammar& rg) {
  const Grammar& g = rg.grammar;
  std::ostringstream os;
  render_kind(os, "confirmed", s.confirmed);
  render_kind(os, "predicted", s.predicted);
  os << "completed LHS symbols per state:\n";
  for (const AhfaState& st : a.states())
    os << "  state " << st.id << ": " << s.completed_lhs_counts[st.id] << '\n';
  os << "duplicated dotted rules:\n";
  if (s.duplicates.empty()) os << "  (none)\n";
  for (const auto& [dr, ids] : s.duplicates) {
    os << "  " << render_dotted(g, dr) << " in states";
    for (std::size_t id : ids) os << ' ' << id;
    os << '\n';
  }
  // CSV section
  os << "csv:\n";
  os << "kind,size,occurrences\n";
  for (const auto& [size, n] : s.confirmed.size_histogram)
    os << "confirmed," << size << ',' << n << '\n';
  for (const auto& [size, n] : s.predicted.size_histogram)
    os << "predicted," << size << ',' << n << '\n';
  os << std::fixed << std::setprecision(4);
  os << "kind,mean,mean_square\n";
  os << "confirmed," << s.confirmed.mean_size << ',' << s.confirmed.mean_square_size
     << '\n';
  os << "predicted," << s.predicted.mean_size << ',' << s.predicted.mean_square_size
     << '\n';
  os << "state,completed_lhs\n";
  for (const AhfaState& st : a.states())
    os << st.id << ',' << s.completed_lhs_counts[st.id] << '\n';
  return os.str();
}

}  // namespace chaf
