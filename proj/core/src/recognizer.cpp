#include "chaf/recognizer.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace chaf {

std::optional<SymbolId> postdot(const Grammar& g, DottedRule dr) {
  const Rule& r = g.rule(dr.rule);
  if (dr.pos >= r.rhs.size()) return std::nullopt;
  return r.rhs[dr.pos];
}

std::optional<DottedRule> next_dr(const Grammar& g, DottedRule dr) {
  const Rule& r = g.rule(dr.rule);
  if (dr.pos >= r.rhs.size()) return std::nullopt;
  return DottedRule{dr.rule, dr.pos + 1};
}

bool is_completion(const Grammar& g, DottedRule dr) {
  return dr.pos >= g.rule(dr.rule).rhs.size();
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Seed: return "seed";
    case Phase::Scan: return "scan";
    case Phase::Reduce: return "reduce";
    case Phase::Predict: return "predict";
  }
  return "?";
}

PredictionClosure::PredictionClosure(std::size_t symbols, std::size_t rules)
    : words_((rules + 63) / 64), masks_(symbols), lists_(symbols) {
  for (auto& m : masks_) m.assign(words_, 0);
}

bool PredictionClosure::contains(SymbolId s, std::size_t rule) const {
  const auto& m = masks_.at(s);
  return (m[rule / 64] >> (rule % 64)) & 1u;
}

const std::vector<std::uint64_t>& PredictionClosure::mask(SymbolId s) const {
  return masks_.at(s);
}

const std::vector<std::size_t>& PredictionClosure::rules_for(SymbolId s) const {
  return lists_.at(s);
}

void PredictionClosure::set(SymbolId s, std::size_t rule) {
  masks_.at(s)[rule / 64] |= std::uint64_t{1} << (rule % 64);
}

void PredictionClosure::finalize() {
  for (std::size_t s = 0; s < masks_.size(); ++s) {
    lists_[s].clear();
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t bits = masks_[s][w];
      while (bits) {
        unsigned b = static_cast<unsigned>(__builtin_ctzll(bits));
        lists_[s].push_back(w * 64 + b);
        bits &= bits - 1;
      }
    }
  }
}

PredictionClosure precompute_prediction_closure(const RewrittenGrammar& rg) {
  const Grammar& g = rg.grammar;
  for (const Rule& r : g.rules())
    if (r.rhs.empty())
      throw GrammarError("prediction closure requires a nulling-free grammar");
  PredictionClosure pc(g.symbol_count(), g.rule_count());
  for (std::size_t sym = 0; sym < g.symbol_count(); ++sym) {
    SymbolId x = static_cast<SymbolId>(sym);
    if (g.is_terminal(x)) continue;
    // Rules with LHS x, closed under prediction through each first symbol.
    std::vector<SymbolId> stack{x};
    std::vector<bool> seen(g.symbol_count(), false);
    seen[sym] = true;
    while (!stack.empty()) {
      SymbolId y = stack.back();
      stack.pop_back();
      for (std::size_t ri : g.rules_of(y)) {
        pc.set(x, ri);
        SymbolId first = g.rule(ri).rhs.front();
        if (!g.is_terminal(first) && !seen[first]) {
          seen[first] = true;
          stack.push_back(first);
        }
      }
    }
  }
  pc.finalize();
  return pc;
}

std::vector<EarleyItem> opred(const EarleyItem& x, const RewrittenGrammar& rg) {
  const Grammar& g = rg.grammar;
  std::vector<EarleyItem> out;
  auto pd = postdot(g, x.dr);
  if (!pd || g.is_terminal(*pd)) return out;
  for (std::size_t ri : g.rules_of(*pd))
    out.push_back(EarleyItem{DottedRule{static_cast<std::uint32_t>(ri), 0},
                             x.current, x.current, Phase::Predict});
  std::sort(out.begin(), out.end(),
            [](const EarleyItem& a, const EarleyItem& b) { return a.dr < b.dr; });
  return out;
}

std::vector<EarleyItem> ahpred(const EarleyItem& x, const RewrittenGrammar& rg) {
  // predAll over opred: level 0 is opred(x), level n+1 applies opred to
  // every member of level n; the union stabilizes.
  std::set<DottedRule> all;
  std::vector<EarleyItem> level = opred(x, rg);
  for (const auto& e : level) all.insert(e.dr);
  while (!level.empty()) {
    std::vector<EarleyItem> next;
    std::set<DottedRule> next_keys;
    for (const auto& e : level)
      for (const auto& p : opred(e, rg))
        if (next_keys.insert(p.dr).second) next.push_back(p);
    level.clear();
    for (const auto& p : next)
      if (all.insert(p.dr).second) level.push_back(p);
  }
  std::vector<EarleyItem> out;
  for (DottedRule dr : all)
    out.push_back(EarleyItem{dr, x.current, x.current, Phase::Predict});
  return out;
}

namespace {

std::uint64_t item_key(DottedRule dr, std::uint32_t origin) {
  if (dr.rule >= (1u << 20) || dr.pos >= (1u << 12))
    throw GrammarError("grammar too large for the chart item index");
  return (std::uint64_t{dr.rule} << 44) | (std::uint64_t{dr.pos} << 32) | origin;
}

}  // namespace

bool EarleySet::contains(DottedRule dr, std::uint32_t origin) const {
  return index_.count(item_key(dr, origin)) > 0;
}

const std::vector<std::uint32_t>& EarleySet::with_postdot(SymbolId s) const {
  static const std::vector<std::uint32_t> kEmpty;
  auto it = by_postdot_.find(s);
  return it == by_postdot_.end() ? kEmpty : it->second;
}

bool EarleySet::add(const Grammar& g, DottedRule dr, std::uint32_t origin,
                    Phase phase) {
  if (!index_.insert(item_key(dr, origin)).second) return false;
  items_.push_back(EarleyItem{dr, origin, location_, phase});
  if (auto pd = postdot(g, dr))
    by_postdot_[*pd].push_back(static_cast<std::uint32_t>(items_.size() - 1));
  return true;
}

Chart::Chart(const RewrittenGrammar& g, const PredictionClosure& closure)
    : g_(&g), closure_(&closure) {
  if (!g.nulling_free)
    throw GrammarError(
        "the recognizer requires a nulling-free grammar; run the rewrite "
        "pipeline first");
  sets_.emplace_back(0);
  const Grammar& gr = g.grammar;
  if (gr.augmented() && !gr.rules_of(gr.accept()).empty()) {
    std::size_t ar = gr.rules_of(gr.accept()).front();
    add(0, DottedRule{static_cast<std::uint32_t>(ar), 0}, 0, Phase::Seed);
    predict_phase(sets_[0]);
  }
}

bool Chart::add(std::uint32_t set, DottedRule dr, std::uint32_t origin, Phase phase) {
  ++attempts_;
  bool added = sets_[set].add(g_->grammar, dr, origin, phase);
  if (!added) ++duplicates_;
  return added;
}

void Chart::predict_phase(EarleySet& es) {
  const Grammar& g = g_->grammar;
  std::vector<std::uint64_t> bitmap(closure_->words(), 0);
  for (const EarleyItem& item : es.items()) {
    auto pd = postdot(g, item.dr);
    if (!pd || g.is_terminal(*pd)) continue;
    const auto& mask = closure_->mask(*pd);
    for (std::size_t w = 0; w < mask.size(); ++w) bitmap[w] |= mask[w];
  }
  for (std::size_t w = 0; w < bitmap.size(); ++w) {
    std::uint64_t bits = bitmap[w];
    while (bits) {
      unsigned b = static_cast<unsigned>(__builtin_ctzll(bits));
      bits &= bits - 1;
      std::uint32_t rule = static_cast<std::uint32_t>(w * 64 + b);
      add(es.location(), DottedRule{rule, 0}, es.location(), Phase::Predict);
    }
  }
}

void Chart::advance(const Token& token) {
  const Grammar& g = g_->grammar;
  if (token.symbol < 0 ||
      token.symbol >= static_cast<SymbolId>(g.symbol_count()) ||
      !g.is_terminal(token.symbol))
    throw GrammarError("token is not a terminal of the grammar: " +
                       (token.symbol >= 0 &&
                                token.symbol < static_cast<SymbolId>(g.symbol_count())
                            ? g.name(token.symbol)
                            : token.value));
  std::uint32_t i = frontier_;
  sets_.emplace_back(i + 1);
  EarleySet& next = sets_[i + 1];

  // Phase 1: scan.
  for (std::uint32_t idx : sets_[i].with_postdot(token.symbol)) {
    const EarleyItem& m = sets_[i].items()[idx];
    add(i + 1, *next_dr(g, m.dr), m.origin, Phase::Scan);
  }

  // Phase 2: reductions to a fixed point. Completions found here or in the
  // scan pass are tributaries; their mainstems live in earlier sets, which
  // are final, so no prediction is ever re-entered.
  std::deque<std::uint32_t> work;
  for (std::uint32_t idx = 0; idx < next.items().size(); ++idx)
    if (is_completion(g, next.items()[idx].dr)) work.push_back(idx);
  while (!work.empty()) {
    std::uint32_t idx = work.front();
    work.pop_front();
    EarleyItem trib = next.items()[idx];
    SymbolId lhs = g.rule(trib.dr.rule).lhs;
    const EarleySet& at_origin = sets_[trib.origin];
    for (std::uint32_t midx : at_origin.with_postdot(lhs)) {
      const EarleyItem& mainstem = at_origin.items()[midx];
      if (add(i + 1, *next_dr(g, mainstem.dr), mainstem.origin, Phase::Reduce)) {
        std::uint32_t nidx = static_cast<std::uint32_t>(next.items().size() - 1);
        if (is_completion(g, next.items()[nidx].dr)) work.push_back(nidx);
      }
    }
  }

  // Phase 3: predictions from the closure table.
  predict_phase(next);

  input_.push_back(token);
  frontier_ = i + 1;
}

bool Chart::accepted() const {
  const Grammar& g = g_->grammar;
  if (input_.empty()) return g_->nullable_start;
  if (!g.augmented()) return false;
  for (std::size_t ar : g.rules_of(g.accept())) {
    DottedRule done{static_cast<std::uint32_t>(ar),
                    static_cast<std::uint32_t>(g.rule(ar).rhs.size())};
    if (sets_[frontier_].contains(done, 0)) return true;
  }
  return false;
}

std::vector<SymbolId> Chart::acceptable_tokens() const {
  const Grammar& g = g_->grammar;
  std::set<SymbolId> out;
  for (const EarleyItem& item : sets_[frontier_].items()) {
    auto pd = postdot(g, item.dr);
    if (pd && g.is_terminal(*pd)) out.insert(*pd);
  }
  return {out.begin(), out.end()};
}

ChartStats Chart::stats() const {
  ChartStats s;
  for (const EarleySet& es : sets_) {
    s.per_set.push_back(es.size());
    s.total += es.size();
  }
  s.add_attempts = attempts_;
  s.duplicate_attempts = duplicates_;
  return s;
}

namespace {

// Dot position in the nulling-present RHS: eliminated symbols are consumed
// as soon as the dot reaches them.
std::uint32_t nulling_present_dot(const NullingMarkup* m, std::uint32_t nf_dot,
                                  std::size_t np_len) {
  if (!m) return nf_dot;
  auto inserted_at = [&](std::uint32_t p) {
    for (const auto& ins : m->insertions)
      if (ins.position == p) return true;
    return false;
  };
  std::uint32_t np = 0, consumed = 0;
  while (np < np_len) {
    if (inserted_at(np))
      ++np;
    else if (consumed < nf_dot) {
      ++np;
      ++consumed;
    } else {
      break;
    }
  }
  return np;
}

// childV slot of each nulling-present RHS position (-1 for the continuation).
std::vector<std::int32_t> np_slots(const RewriteBinding& b, const NullingMarkup* m,
                                   std::size_t np_len) {
  std::vector<std::int32_t> out(np_len, -1);
  std::size_t surviving = 0;
  for (std::uint32_t p = 0; p < np_len; ++p) {
    bool ins = false;
    if (m)
      for (const auto& e : m->insertions)
        if (e.position == p) {
          out[p] = e.slot;
          ins = true;
          break;
        }
    if (!ins) out[p] = b.slots.at(surviving++);
  }
  return out;
}

}  // namespace

void Chart::collect_origins(std::uint32_t set, std::uint32_t item,
                            std::vector<std::uint32_t>& out,
                            std::unordered_set<std::uint64_t>& seen) const {
  if (!seen.insert((std::uint64_t{set} << 32) | item).second) return;
  const EarleyItem& e = sets_[set].items()[item];
  SymbolId lhs = g_->grammar.rule(e.dr.rule).lhs;
  if (!g_->is_continuation(lhs)) {
    out.push_back(e.origin);
    return;
  }
  const EarleySet& at_origin = sets_[e.origin];
  for (std::uint32_t pidx : at_origin.with_postdot(lhs))
    collect_origins(e.origin, pidx, out, seen);
}

std::vector<ProgressEntry> Chart::progress_report(std::uint32_t i) const {
  if (i > frontier_) throw GrammarError("progress report beyond the frontier");
  const Grammar& g = g_->grammar;
  std::set<ProgressEntry> merged;
  const EarleySet& es = sets_[i];
  for (std::uint32_t idx = 0; idx < es.items().size(); ++idx) {
    const EarleyItem& item = es.items()[idx];
    const RewriteBinding& b = g_->bindings[item.dr.rule];
    if (!b.pre_rule) continue;
    const NullingMarkup* m = g_->markup_of(item.dr.rule);
    std::size_t np_len =
        g.rule(item.dr.rule).rhs.size() + (m ? m->insertions.size() : 0);
    std::uint32_t np_dot = nulling_present_dot(m, item.dr.pos, np_len);

    std::uint32_t pre_dot = 0;
    if (b.role == RewriteRole::PassThrough) {
      pre_dot = np_dot;
    } else {
      auto slots = np_slots(b, m, np_len);
      if (np_dot == 0) {
        pre_dot = slots.empty() ? 0 : static_cast<std::uint32_t>(slots[0]);
      } else {
        std::int32_t last = slots[np_dot - 1];
        pre_dot = last < 0 ? b.childv_len : static_cast<std::uint32_t>(last + 1);
      }
    }

    std::vector<std::uint32_t> origins;
    std::unordered_set<std::uint64_t> seen;
    collect_origins(i, idx, origins, seen);
    for (std::uint32_t o : origins)
      merged.insert(ProgressEntry{*b.pre_rule, pre_dot, o});
  }
  return {merged.begin(), merged.end()};
}

RecognizeResult recognize(const RewrittenGrammar& g, const PredictionClosure& closure,
                          std::span<const Token> input) {
  Chart chart(g, closure);
  for (const Token& t : input) chart.advance(t);
  return RecognizeResult{chart.accepted(), std::move(chart)};
}

std::string render_dotted(const Grammar& g, DottedRule dr) {
  const Rule& r = g.rule(dr.rule);
  std::string out = g.name(r.lhs) + " ::=";
  for (std::size_t p = 0; p < r.rhs.size(); ++p) {
    if (p == dr.pos) out += " •";
    out += ' ';
    out += g.name(r.rhs[p]);
  }
  if (dr.pos >= r.rhs.size()) out += " •";
  return out;
}

std::string render_item(const Grammar& g, const EarleyItem& item) {
  std::ostringstream os;
  os << "item=<" << render_dotted(g, item.dr) << "> origin=" << item.origin;
  return os.str();
}

std::string render_trace(const Chart& chart) {
  std::ostringstream os;
  const Grammar& g = chart.grammar().grammar;
  for (std::uint32_t i = 0; i <= chart.frontier(); ++i)
    for (const EarleyItem& item : chart.set(i).items())
      os << "set=" << i << ' ' << render_item(g, item)
         << " phase=" << to_string(item.phase) << '\n';
  return os.str();
}

std::string render_progress(const Chart& chart) {
  std::ostringstream os;
  const Grammar& pre = chart.grammar().pre;
  for (std::uint32_t i = 0; i <= chart.frontier(); ++i)
    for (const ProgressEntry& e : chart.progress_report(i))
      os << "set=" << i << " item=<"
         << render_dotted(pre, DottedRule{static_cast<std::uint32_t>(e.pre_rule), e.dot})
         << "> origin=" << e.origin << '\n';
  return os.str();
}

}  // namespace chaf
