#include "chaf/rewrite.hpp"

#include <algorithm>
#include <map>

namespace chaf {

const char* to_string(RewriteRole r) {
  switch (r) {
    case RewriteRole::PassThrough: return "pass-through";
    case RewriteRole::Verbatim: return "verbatim";
    case RewriteRole::ChafHead: return "chaf-head";
    case RewriteRole::ChafInner: return "chaf-inner";
    case RewriteRole::ChafTail: return "chaf-tail";
    case RewriteRole::NullingAlias: return "nulling-alias";
  }
  return "?";
}

RuleIdentity rule_identity(const Rule& r, const NullingMarkup* m) {
  RuleIdentity id;
  id.lhs = r.lhs;
  id.rhs = r.rhs;
  if (m)
    for (const auto& ins : m->insertions) id.nulled.emplace_back(ins.position, ins.symbol);
  return id;
}

namespace {

Grammar copy_symbols(const Grammar& g) {
  Grammar out;
  for (std::size_t i = 0; i < g.symbol_count(); ++i) {
    const auto& info = g.symbol(static_cast<SymbolId>(i));
    out.add_symbol(info.name, info.terminal);
  }
  out.set_start(g.start());
  out.set_accept(g.accept());
  return out;
}

std::vector<std::int32_t> identity_slots(std::size_t n) {
  std::vector<std::int32_t> slots(n);
  for (std::size_t i = 0; i < n; ++i) slots[i] = static_cast<std::int32_t>(i);
  return slots;
}

// Shared state for the two factoring rewrites.
struct RewriteBuilder {
  const Grammar& g;
  const SymbolClassification& cls;
  RewrittenGrammar out;
  std::vector<SymbolId> alias_order;  // aliases in creation order

  explicit RewriteBuilder(const Grammar& g_, const SymbolClassification& cls_)
      : g(g_), cls(cls_) {
    if (!g.augmented()) throw GrammarError("rewrite requires an augmented grammar");
    out.grammar = copy_symbols(g);
    out.pre = g;
    out.nullable_start = cls.nullable(g.start());
  }

  SymbolId alias_for(SymbolId x) {
    if (auto it = std::find_if(out.alias_of.begin(), out.alias_of.end(),
                               [&](auto& kv) { return kv.second == x; });
        it != out.alias_of.end())
      return it->first;
    SymbolId alias =
        out.grammar.add_symbol(out.grammar.fresh_name(g.name(x) + "e"), false);
    out.alias_of.emplace(alias, x);
    alias_order.push_back(alias);
    return alias;
  }

  bool nulling_in_output(SymbolId s) const {
    if (out.alias_of.count(s)) return true;
    if (out.continuation_symbols.count(s)) return false;
    return cls.nulling(s);
  }

  void emit(Rule r, RewriteBinding b) {
    out.grammar.add_rule(std::move(r));
    out.bindings.push_back(std::move(b));
  }

  void emit_pass_through(std::size_t ri) {
    emit(g.rule(ri), RewriteBinding{RewriteRole::PassThrough, ri, 1, {0}});
  }

  void emit_verbatim(std::size_t ri) {
    const Rule& r = g.rule(ri);
    emit(r, RewriteBinding{RewriteRole::Verbatim, ri,
                           static_cast<std::uint32_t>(r.rhs.size()),
                           identity_slots(r.rhs.size())});
  }

  // The nulling rules of a proper nullable are dropped; its empty-string
  // derivation lives on in the alias rule <Xe ::= >.
  bool drops(std::size_t ri) const {
    return cls.rule_class[ri] == NullClass::Nulling &&
           cls.of(g.rule(ri).lhs) == NullClass::ProperNullable;
  }

  void append_alias_rules() {
    for (SymbolId alias : alias_order) {
      SymbolId x = out.alias_of.at(alias);
      std::optional<std::size_t> pre;
      for (std::size_t ri : g.rules_of(x))
        if (g.rule(ri).rhs.empty()) { pre = ri; break; }
      RewriteBinding b;
      b.role = pre ? RewriteRole::Verbatim : RewriteRole::NullingAlias;
      b.pre_rule = pre;
      emit(Rule{alias, {}}, std::move(b));
    }
  }
};

}  // namespace

std::uint64_t nnf_factored_count(const Grammar& g, const SymbolClassification& cls,
                                 std::size_t rule) {
  if (g.augmented() && rule == g.accept_rule()) return 1;
  const Rule& r = g.rule(rule);
  if (cls.rule_class[rule] == NullClass::Nulling &&
      cls.of(r.lhs) == NullClass::ProperNullable)
    return 0;
  std::size_t pn = 0;
  for (SymbolId s : r.rhs)
    if (cls.of(s) == NullClass::ProperNullable) ++pn;
  if (pn >= 64) throw GrammarError("NNF factoring count overflows");
  return std::uint64_t{1} << pn;
}

RewrittenGrammar nnf_rewrite(const Grammar& g, const SymbolClassification& cls) {
  RewriteBuilder b(g, cls);
  const std::size_t accept_rule = g.accept_rule();
  for (std::size_t ri = 0; ri < g.rule_count(); ++ri) {
    if (ri == accept_rule) {
      b.emit_pass_through(ri);
      continue;
    }
    if (b.drops(ri)) continue;
    const Rule& r = g.rule(ri);
    std::vector<std::size_t> pn_pos;
    for (std::size_t i = 0; i < r.rhs.size(); ++i)
      if (cls.of(r.rhs[i]) == NullClass::ProperNullable) pn_pos.push_back(i);
    if (pn_pos.empty()) {
      b.emit_verbatim(ri);
      continue;
    }
    // 2^pn factorings, alias choice first at each position.
    std::vector<SymbolId> rhs = r.rhs;
    auto rec = [&](auto&& self, std::size_t k) -> void {
      if (k == pn_pos.size()) {
        b.emit(Rule{r.lhs, rhs},
               RewriteBinding{RewriteRole::Verbatim, ri,
                              static_cast<std::uint32_t>(r.rhs.size()),
                              identity_slots(r.rhs.size())});
        return;
      }
      std::size_t p = pn_pos[k];
      rhs[p] = b.alias_for(r.rhs[p]);
      self(self, k + 1);
      rhs[p] = r.rhs[p];
      self(self, k + 1);
    };
    rec(rec, 0);
  }
  b.append_alias_rules();
  return std::move(b.out);
}

namespace {

struct Chunk {
  std::size_t first = 0, last = 0;  // inclusive positions in the pre-rewrite RHS
  bool final_chunk = false;
  SymbolId lhs = kNoSymbol;
  SymbolId continuation = kNoSymbol;  // valid unless final
};

}  // namespace

RewrittenGrammar chaf_rewrite(const Grammar& g, const SymbolClassification& cls) {
  RewriteBuilder b(g, cls);
  const std::size_t accept_rule = g.accept_rule();
  std::map<SymbolId, int> continuation_counter;

  for (std::size_t ri = 0; ri < g.rule_count(); ++ri) {
    if (ri == accept_rule) {
      b.emit_pass_through(ri);
      continue;
    }
    if (b.drops(ri)) continue;
    const Rule& r = g.rule(ri);
    std::vector<std::size_t> pn_pos;
    for (std::size_t i = 0; i < r.rhs.size(); ++i)
      if (cls.of(r.rhs[i]) == NullClass::ProperNullable) pn_pos.push_back(i);
    if (pn_pos.empty()) {
      b.emit_verbatim(ri);
      continue;
    }

    // Chunk left to right: cut just after the first proper nullable while
    // more than two remain in the unprocessed suffix.
    std::vector<Chunk> chunks;
    std::size_t cursor = 0, next_pn = 0;
    while (pn_pos.size() - next_pn > 2) {
      Chunk c;
      c.first = cursor;
      c.last = pn_pos[next_pn];
      chunks.push_back(c);
      cursor = c.last + 1;
      ++next_pn;
    }
    chunks.push_back(Chunk{cursor, r.rhs.size() - 1, true, kNoSymbol, kNoSymbol});

    for (std::size_t ci = 0; ci < chunks.size(); ++ci) {
      chunks[ci].lhs = ci == 0 ? r.lhs : chunks[ci - 1].continuation;
      if (!chunks[ci].final_chunk) {
        int& n = continuation_counter[r.lhs];
        ++n;
        chunks[ci].continuation = b.out.grammar.add_symbol(
            b.out.grammar.fresh_name(g.name(r.lhs) + std::to_string(n)), false);
        b.out.continuation_symbols.insert(chunks[ci].continuation);
      }
    }

    const std::uint32_t childv_len = static_cast<std::uint32_t>(r.rhs.size());
    for (std::size_t ci = 0; ci < chunks.size(); ++ci) {
      const Chunk& c = chunks[ci];
      std::vector<std::size_t> chunk_pns;
      for (std::size_t p = c.first; p <= c.last; ++p)
        if (cls.of(r.rhs[p]) == NullClass::ProperNullable) chunk_pns.push_back(p);

      auto emit_variant = [&](const std::vector<SymbolId>& rhs,
                              const std::vector<std::int32_t>& slots,
                              RewriteRole role) {
        bool all_nulling = true;
        for (SymbolId s : rhs)
          if (!b.nulling_in_output(s)) { all_nulling = false; break; }
        if (all_nulling) return;  // its only derivation is the empty string
        b.emit(Rule{c.lhs, rhs}, RewriteBinding{role, ri, childv_len, slots});
      };

      auto chunk_variant = [&](std::uint32_t mask) {
        std::vector<SymbolId> rhs;
        std::vector<std::int32_t> slots;
        for (std::size_t p = c.first; p <= c.last; ++p) {
          SymbolId s = r.rhs[p];
          auto it = std::find(chunk_pns.begin(), chunk_pns.end(), p);
          if (it != chunk_pns.end()) {
            // rightmost proper nullable in the low bit
            std::size_t bit = chunk_pns.size() - 1 -
                              static_cast<std::size_t>(it - chunk_pns.begin());
            if ((mask >> bit) & 1u) s = b.alias_for(s);
          }
          rhs.push_back(s);
          slots.push_back(static_cast<std::int32_t>(p));
        }
        if (!c.final_chunk) {
          rhs.push_back(c.continuation);
          slots.push_back(-1);
        }
        return std::make_pair(rhs, slots);
      };

      RewriteRole role = c.final_chunk ? RewriteRole::ChafTail
                         : ci == 0     ? RewriteRole::ChafHead
                                       : RewriteRole::ChafInner;
      for (std::uint32_t mask = 0; mask < (1u << chunk_pns.size()); ++mask) {
        auto [rhs, slots] = chunk_variant(mask);
        emit_variant(rhs, slots, role);
        if (mask == 0 && !c.final_chunk) {
          // Tail-null alternative: chunk as-is, the entire remainder replaced
          // by its nulling aliases, available when the remainder is
          // all-nullable. The head-chunk variant covers the whole pre-rewrite
          // RHS and calls its semantics directly.
          bool all_nullable = true;
          for (std::size_t p = c.last + 1; p < r.rhs.size(); ++p)
            if (!cls.nullable(r.rhs[p])) { all_nullable = false; break; }
          if (all_nullable) {
            std::vector<SymbolId> rhs_tn;
            std::vector<std::int32_t> slots_tn;
            for (std::size_t p = c.first; p <= c.last; ++p) {
              rhs_tn.push_back(r.rhs[p]);
              slots_tn.push_back(static_cast<std::int32_t>(p));
            }
            for (std::size_t p = c.last + 1; p < r.rhs.size(); ++p) {
              SymbolId s = r.rhs[p];
              if (cls.of(s) == NullClass::ProperNullable) s = b.alias_for(s);
              rhs_tn.push_back(s);
              slots_tn.push_back(static_cast<std::int32_t>(p));
            }
            emit_variant(rhs_tn, slots_tn,
                         ci == 0 ? RewriteRole::Verbatim : RewriteRole::ChafTail);
          }
        }
      }
    }
  }
  b.append_alias_rules();
  return std::move(b.out);
}

RewrittenGrammar eliminate_nulling(const RewrittenGrammar& rg,
                                   const SymbolClassification& cls) {
  const Grammar& g = rg.grammar;
  for (const Rule& r : g.rules())
    if (r.rhs.empty() && !cls.nulling(r.lhs))
      throw GrammarError(
          "eliminate_nulling requires a factored grammar: empty rule on "
          "non-nulling symbol " +
          g.name(r.lhs));

  RewrittenGrammar out;
  out.grammar = copy_symbols(g);
  out.pre = rg.pre;
  out.nulling_present = g;
  out.nullable_start = rg.nullable_start;
  out.nulling_free = true;
  out.alias_of = rg.alias_of;
  out.continuation_symbols = rg.continuation_symbols;

  for (std::size_t ri = 0; ri < g.rule_count(); ++ri) {
    const Rule& r = g.rule(ri);
    if (cls.nulling(r.lhs)) continue;  // rules defining nulling symbols go away
    const RewriteBinding& b = rg.bindings[ri];
    Rule nf{r.lhs, {}};
    RewriteBinding nb{b.role, b.pre_rule, b.childv_len, {}};
    NullingMarkup m;
    m.source_rule = ri;
    for (std::size_t p = 0; p < r.rhs.size(); ++p) {
      SymbolId s = r.rhs[p];
      if (cls.nulling(s)) {
        m.insertions.push_back(NullingInsertion{
            static_cast<std::uint32_t>(p), s,
            p < b.slots.size() ? b.slots[p] : -1});
      } else {
        nf.rhs.push_back(s);
        nb.slots.push_back(p < b.slots.size() ? b.slots[p] : -1);
      }
    }
    if (nf.rhs.empty()) continue;  // its RHS was entirely nulling
    out.grammar.add_rule(std::move(nf));
    out.bindings.push_back(std::move(nb));
    out.markup.push_back(std::move(m));
  }
  return out;
}

Rule reconstruct_nulling_present(const RewrittenGrammar& rg, std::size_t rule) {
  const Rule& r = rg.grammar.rule(rule);
  const NullingMarkup* m = rg.markup_of(rule);
  Rule out{r.lhs, {}};
  std::size_t next = 0;  // next surviving symbol
  std::size_t n = r.rhs.size() + (m ? m->insertions.size() : 0);
  std::size_t ins = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (m && ins < m->insertions.size() && m->insertions[ins].position == p) {
      out.rhs.push_back(m->insertions[ins].symbol);
      ++ins;
    } else {
      out.rhs.push_back(r.rhs.at(next++));
    }
  }
  return out;
}

std::string dump_rules(const RewrittenGrammar& rg) {
  std::string out;
  for (std::size_t ri = 0; ri < rg.grammar.rule_count(); ++ri) {
    const RewriteBinding& b = rg.bindings[ri];
    out += rg.grammar.render_rule(ri);
    out += "   # role=";
    out += to_string(b.role);
    out += " pre=";
    out += b.pre_rule ? rg.pre.render_rule(*b.pre_rule) : std::string("-");
    out += " markup=";
    const NullingMarkup* m = rg.markup_of(ri);
    if (!m || m->insertions.empty()) {
      out += "-";
    } else {
      for (std::size_t i = 0; i < m->insertions.size(); ++i) {
        if (i) out += ',';
        out += '(' + std::to_string(m->insertions[i].position) + ',' +
               rg.grammar.name(m->insertions[i].symbol) + ')';
      }
    }
    out += '\n';
  }
  return out;
}

std::vector<std::string> verify_chaf_bindings(const RewrittenGrammar& rg) {
  std::vector<std::string> violations;
  const Grammar& g = rg.grammar;

  // Walks every head/inner*/tail chain, accumulating slot contributions.
  auto walk = [&](auto&& self, std::size_t ri, std::vector<bool> filled,
                  std::size_t depth) -> void {
    const RewriteBinding& b = rg.bindings[ri];
    if (depth > g.rule_count()) {
      violations.push_back("chain through " + g.render_rule(ri) + " does not end");
      return;
    }
    auto fill = [&](std::int32_t slot) {
      if (slot < 0 || slot >= static_cast<std::int32_t>(filled.size())) {
        violations.push_back("slot out of range in " + g.render_rule(ri));
        return;
      }
      if (filled[slot])
        violations.push_back("slot " + std::to_string(slot) +
                             " doubly populated via " + g.render_rule(ri));
      filled[slot] = true;
    };
    const Rule& r = g.rule(ri);
    bool has_continuation = false;
    for (std::size_t p = 0; p < r.rhs.size(); ++p) {
      if (b.slots[p] >= 0)
        fill(b.slots[p]);
      else
        has_continuation = true;
    }
    if (const NullingMarkup* m = rg.markup_of(ri))
      for (const auto& ins : m->insertions) fill(ins.slot);

    if (has_continuation) {
      SymbolId c = r.rhs.back();
      if (!rg.is_continuation(c)) {
        violations.push_back("unmapped non-continuation position in " + g.render_rule(ri));
        return;
      }
      for (std::size_t next : g.rules_of(c)) self(self, next, filled, depth + 1);
      return;
    }
    for (std::size_t s = 0; s < filled.size(); ++s)
      if (!filled[s])
        violations.push_back("slot " + std::to_string(s) +
                             " unpopulated in chain ending at " + g.render_rule(ri));
  };

  for (std::size_t ri = 0; ri < g.rule_count(); ++ri) {
    const RewriteBinding& b = rg.bindings[ri];
    if (!b.pre_rule || b.role == RewriteRole::PassThrough) continue;
    if (g.rule(ri).lhs != rg.pre.rule(*b.pre_rule).lhs) continue;  // chain head only
    walk(walk, ri, std::vector<bool>(b.childv_len, false), 0);
  }
  return violations;
}

}  // namespace chaf
