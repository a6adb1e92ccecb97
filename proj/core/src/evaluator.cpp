#include "chaf/evaluator.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <variant>

namespace chaf {

namespace {

struct TreeSearch {
  const Chart& chart;
  const RewrittenGrammar& rg;
  std::set<std::tuple<SymbolId, std::uint32_t, std::uint32_t>> in_progress;

  std::optional<ParseNode> symbol_tree(SymbolId x, std::uint32_t i, std::uint32_t j) {
    const Grammar& g = rg.grammar;
    if (g.is_terminal(x)) {
      if (j != i + 1 || chart.input()[i].symbol != x) return std::nullopt;
      ParseNode n;
      n.kind = ParseNode::Kind::Token;
      n.symbol = x;
      n.token_value = chart.input()[i].value;
      n.start = i;
      n.end = j;
      return n;
    }
    auto key = std::make_tuple(x, i, j);
    if (!in_progress.insert(key).second) return std::nullopt;
    std::optional<ParseNode> out;
    for (std::size_t ri : g.rules_of(x)) {
      const Rule& r = g.rule(ri);
      // The chart knows which rule instances completed over [i, j).
      if (!chart.set(j).contains(
              DottedRule{static_cast<std::uint32_t>(ri),
                         static_cast<std::uint32_t>(r.rhs.size())},
              i))
        continue;
      ParseNode n;
      n.kind = ParseNode::Kind::Rule;
      n.rule = ri;
      n.start = i;
      n.end = j;
      if (rule_children(r, 0, i, j, n.children)) {
        out = std::move(n);
        break;  // lowest rule index wins
      }
    }
    in_progress.erase(key);
    return out;
  }

  // Fills children for rhs[pos..] over [cur, end); the leftmost child takes
  // the longest span that still admits a full split.
  bool rule_children(const Rule& r, std::size_t pos, std::uint32_t cur,
                     std::uint32_t end, std::vector<ParseNode>& acc) {
    if (pos == r.rhs.size()) return cur == end;
    std::size_t remaining = r.rhs.size() - pos - 1;
    // every nulling-free symbol spans at least one token
    if (end - cur < remaining + 1) return false;
    std::uint32_t max_mid = end - static_cast<std::uint32_t>(remaining);
    for (std::uint32_t mid = max_mid; mid > cur; --mid) {
      auto child = symbol_tree(r.rhs[pos], cur, mid);
      if (!child) continue;
      acc.push_back(std::move(*child));
      if (rule_children(r, pos + 1, mid, end, acc)) return true;
      acc.pop_back();
    }
    return false;
  }
};

}  // namespace

std::optional<ParseNode> build_tree(const Chart& chart) {
  if (!chart.accepted()) return std::nullopt;
  const RewrittenGrammar& rg = chart.grammar();
  if (chart.input().empty()) {
    ParseNode n;
    n.kind = ParseNode::Kind::Nulled;
    n.symbol = rg.pre.start();
    n.start = n.end = 0;
    return n;
  }
  TreeSearch search{chart, rg, {}};
  std::uint32_t n = static_cast<std::uint32_t>(chart.input().size());
  auto tree = search.symbol_tree(rg.grammar.accept(), 0, n);
  if (!tree)
    throw GrammarError("accepted chart yielded no tree; chart is inconsistent");
  return tree;
}

namespace {

struct TreeEnumerator {
  const RewrittenGrammar& rg;
  std::span<const Token> input;
  std::size_t cap;
  std::size_t produced = 0;
  std::map<std::tuple<SymbolId, std::uint32_t, std::uint32_t>,
           std::vector<ParseNode>> memo;
  std::set<std::tuple<SymbolId, std::uint32_t, std::uint32_t>> in_progress;

  void bump() {
    if (++produced > cap)
      throw GrammarError("enumerate_trees: tree count above cap");
  }

  std::vector<ParseNode> symbol_trees(SymbolId x, std::uint32_t i, std::uint32_t j) {
    const Grammar& g = rg.grammar;
    auto key = std::make_tuple(x, i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<ParseNode> out;
    if (g.is_terminal(x)) {
      if (j == i + 1 && input[i].symbol == x) {
        ParseNode n;
        n.kind = ParseNode::Kind::Token;
        n.symbol = x;
        n.token_value = input[i].value;
        n.start = i;
        n.end = j;
        out.push_back(std::move(n));
        bump();
      }
      memo.emplace(key, out);
      return out;
    }
    if (!in_progress.insert(key).second)
      throw GrammarError("enumerate_trees: cyclic derivation, infinitely many trees");
    for (std::size_t ri : g.rules_of(x)) {
      const Rule& r = g.rule(ri);
      std::vector<std::vector<ParseNode>> column;
      splits(r, 0, i, j, column, [&](const std::vector<std::vector<ParseNode>>& cols) {
        std::vector<std::size_t> pick(cols.size(), 0);
        while (true) {
          ParseNode n;
          n.kind = ParseNode::Kind::Rule;
          n.rule = ri;
          n.start = i;
          n.end = j;
          for (std::size_t c = 0; c < cols.size(); ++c)
            n.children.push_back(cols[c][pick[c]]);
          out.push_back(std::move(n));
          bump();
          std::size_t c = cols.size();
          while (true) {
            if (c == 0) return;
            --c;
            if (++pick[c] < cols[c].size()) break;
            pick[c] = 0;
          }
        }
      });
    }
    in_progress.erase(key);
    memo.emplace(key, out);
    return out;
  }

  template <typename Apply>
  void splits(const Rule& r, std::size_t pos, std::uint32_t cur, std::uint32_t end,
              std::vector<std::vector<ParseNode>>& column, Apply&& apply) {
    if (pos == r.rhs.size()) {
      if (cur == end && !column.empty()) apply(column);
      return;
    }
    std::size_t remaining = r.rhs.size() - pos - 1;
    if (end - cur < remaining + 1) return;
    std::uint32_t max_mid = end - static_cast<std::uint32_t>(remaining);
    std::uint32_t min_mid = cur + 1;
    bool last = remaining == 0;
    for (std::uint32_t mid = min_mid; mid <= max_mid; ++mid) {
      if (last && mid != end) continue;
      auto kids = symbol_trees(r.rhs[pos], cur, mid);
      if (kids.empty()) continue;
      column.push_back(std::move(kids));
      splits(r, pos + 1, mid, end, column, apply);
      column.pop_back();
    }
  }
};

}  // namespace

std::vector<ParseNode> enumerate_trees(const RewrittenGrammar& rg,
                                       std::span<const Token> input,
                                       std::size_t cap) {
  if (!rg.nulling_free)
    throw GrammarError("enumerate_trees requires a nulling-free grammar");
  if (input.empty()) {
    if (!rg.nullable_start) return {};
    ParseNode n;
    n.kind = ParseNode::Kind::Nulled;
    n.symbol = rg.pre.start();
    return {n};
  }
  const Grammar& g = rg.grammar;
  if (!g.augmented() || g.rules_of(g.accept()).empty()) return {};
  TreeEnumerator en{rg, input, cap, 0, {}, {}};
  return en.symbol_trees(g.accept(), 0, static_cast<std::uint32_t>(input.size()));
}

void ChildV::set(std::size_t slot, Value v) {
  if (slot >= values_.size())
    throw GrammarError("childV slot out of range (binding bug)");
  if (filled_.at(slot))
    throw GrammarError("childV slot " + std::to_string(slot) +
                       " doubly populated (binding bug)");
  values_[slot] = std::move(v);
  filled_[slot] = true;
}

bool ChildV::full() const {
  return std::all_of(filled_.begin(), filled_.end(), [](bool b) { return b; });
}

namespace {

// Slot contributions of one rule node: its own child values plus the nulled
// values of the symbols eliminated from it, filled right to left.
void fill_slots(const RewrittenGrammar& g, std::size_t rule,
                std::span<const Value> child_values, ChildV& cv,
                const Semantics& sem, EvalContext& ctx) {
  const RewriteBinding& b = g.bindings.at(rule);
  struct Contribution {
    std::int32_t slot;
    const Value* value;
    SymbolId nulled;
  };
  std::vector<Contribution> cs;
  std::size_t vi = 0;
  for (std::size_t p = 0; p < b.slots.size(); ++p) {
    if (b.slots[p] < 0) continue;  // the continuation position
    if (vi >= child_values.size())
      throw GrammarError("childV protocol: argument count mismatch");
    cs.push_back(Contribution{b.slots[p], &child_values[vi++], kNoSymbol});
  }
  if (const NullingMarkup* m = g.markup_of(rule))
    for (const auto& ins : m->insertions)
      cs.push_back(Contribution{ins.slot, nullptr, g.pre_symbol(ins.symbol)});
  std::sort(cs.begin(), cs.end(),
            [](const Contribution& a, const Contribution& b2) { return a.slot > b2.slot; });
  for (const Contribution& c : cs) {
    if (c.value)
      cv.set(static_cast<std::size_t>(c.slot), *c.value);
    else
      cv.set(static_cast<std::size_t>(c.slot), sem.nulled_value(ctx, c.nulled));
  }
}

Value apply_pre_rule(const RewrittenGrammar& g, std::size_t rule, const ChildV& cv,
                     const Semantics& sem, EvalContext& ctx) {
  const RewriteBinding& b = g.bindings.at(rule);
  if (!cv.full())
    throw GrammarError("childV not fully populated at the chain head (binding bug)");
  const RuleFn* fn = sem.find_rule(*b.pre_rule);
  if (!fn)
    throw GrammarError("semantics missing for rule: " +
                       g.pre.render_rule(*b.pre_rule));
  return (*fn)(ctx, cv.values());
}

}  // namespace

ChildV chaf_tail_step(const RewrittenGrammar& g, std::size_t rule,
                      std::span<const Value> child_values, const Semantics& sem,
                      EvalContext& ctx) {
  const RewriteBinding& b = g.bindings.at(rule);
  ChildV cv(b.childv_len);
  fill_slots(g, rule, child_values, cv, sem, ctx);
  return cv;
}

void chaf_inner_step(const RewrittenGrammar& g, std::size_t rule,
                     std::span<const Value> child_values, ChildV& cv,
                     const Semantics& sem, EvalContext& ctx) {
  fill_slots(g, rule, child_values, cv, sem, ctx);
}

Value chaf_head_step(const RewrittenGrammar& g, std::size_t rule,
                     std::span<const Value> child_values, ChildV* cv,
                     const Semantics& sem, EvalContext& ctx) {
  if (cv) {
    fill_slots(g, rule, child_values, *cv, sem, ctx);
    return apply_pre_rule(g, rule, *cv, sem, ctx);
  }
  // The head rule is also the tail: it creates childV itself.
  ChildV own = chaf_tail_step(g, rule, child_values, sem, ctx);
  return apply_pre_rule(g, rule, own, sem, ctx);
}

namespace {

using EvalResult = std::variant<Value, ChildV>;

struct Evaluator {
  const RewrittenGrammar& rg;
  const Semantics& sem;

  EvalResult eval(const ParseNode& node) {
    EvalContext ctx{&rg.pre, node.start, node.end};
    switch (node.kind) {
      case ParseNode::Kind::Token:
        if (!sem.terminal)
          throw GrammarError("semantics has no terminal function");
        return sem.terminal(ctx, node.symbol, node.token_value);
      case ParseNode::Kind::Nulled:
        return sem.nulled_value(ctx, node.symbol);
      case ParseNode::Kind::Rule:
        break;
    }
    const RewriteBinding& b = rg.bindings.at(node.rule);
    // Leftmost child first; a continuation child is always last.
    std::vector<EvalResult> kid_results;
    kid_results.reserve(node.children.size());
    for (const ParseNode& c : node.children) kid_results.push_back(eval(c));

    auto plain_values = [&](std::size_t count) {
      std::vector<Value> vals;
      vals.reserve(count);
      for (std::size_t i = 0; i < count; ++i) {
        if (!std::holds_alternative<Value>(kid_results[i]))
          throw GrammarError("childV escaped into a non-continuation position");
        vals.push_back(std::get<Value>(kid_results[i]));
      }
      return vals;
    };

    switch (b.role) {
      case RewriteRole::PassThrough:
        return plain_values(1)[0];
      case RewriteRole::Verbatim: {
        // Direct call on the pre-rewrite rule, nulled values restored in place.
        const NullingMarkup* m = rg.markup_of(node.rule);
        std::vector<Value> args;
        std::size_t next = 0;
        auto kids = plain_values(node.children.size());
        std::size_t np_len = kids.size() + (m ? m->insertions.size() : 0);
        for (std::uint32_t p = 0; p < np_len; ++p) {
          const NullingInsertion* ins = nullptr;
          if (m)
            for (const auto& e : m->insertions)
              if (e.position == p) { ins = &e; break; }
          if (ins)
            args.push_back(sem.nulled_value(ctx, rg.pre_symbol(ins->symbol)));
          else
            args.push_back(kids[next++]);
        }
        const RuleFn* fn = sem.find_rule(*b.pre_rule);
        if (!fn)
          throw GrammarError("semantics missing for rule: " +
                             rg.pre.render_rule(*b.pre_rule));
        return (*fn)(ctx, args);
      }
      case RewriteRole::ChafTail: {
        auto vals = plain_values(node.children.size());
        ChildV cv = chaf_tail_step(rg, node.rule, vals, sem, ctx);
        if (rg.grammar.rule(node.rule).lhs == rg.pre.rule(*b.pre_rule).lhs)
          return apply_pre_rule(rg, node.rule, cv, sem, ctx);  // single chunk
        return cv;
      }
      case RewriteRole::ChafInner: {
        auto vals = plain_values(node.children.size() - 1);
        if (!std::holds_alternative<ChildV>(kid_results.back()))
          throw GrammarError("chaf-inner continuation did not yield a childV");
        ChildV cv = std::get<ChildV>(std::move(kid_results.back()));
        chaf_inner_step(rg, node.rule, vals, cv, sem, ctx);
        return cv;
      }
      case RewriteRole::ChafHead: {
        auto vals = plain_values(node.children.size() - 1);
        if (!std::holds_alternative<ChildV>(kid_results.back()))
          throw GrammarError("chaf-head continuation did not yield a childV");
        ChildV cv = std::get<ChildV>(std::move(kid_results.back()));
        return chaf_head_step(rg, node.rule, vals, &cv, sem, ctx);
      }
      case RewriteRole::NullingAlias:
        throw GrammarError("nulling alias rule in a nulling-free tree");
    }
    throw GrammarError("unknown rewrite role");
  }
};

}  // namespace

Value evaluate(const ParseNode& tree, const Semantics& sem,
               const RewrittenGrammar& g) {
  Evaluator ev{g, sem};
  EvalResult r = ev.eval(tree);
  if (!std::holds_alternative<Value>(r))
    throw GrammarError("evaluation ended on an incomplete CHAF chain");
  return std::get<Value>(std::move(r));
}

namespace {

struct Reassembler {
  const RewrittenGrammar& rg;

  PreNode leaf(const ParseNode& node) {
    PreNode p;
    p.kind = node.kind;
    p.symbol = node.symbol;
    p.token_value = node.token_value;
    p.start = node.start;
    p.end = node.end;
    return p;
  }

  // Collects slot -> subtree over a CHAF chain.
  void chain(const ParseNode& node, std::vector<std::optional<PreNode>>& slots) {
    const RewriteBinding& b = rg.bindings.at(node.rule);
    std::size_t child = 0;
    for (std::size_t p = 0; p < b.slots.size(); ++p) {
      if (b.slots[p] < 0) continue;
      slots.at(b.slots[p]) = assemble(node.children.at(child));
      ++child;
    }
    if (const NullingMarkup* m = rg.markup_of(node.rule))
      for (const auto& ins : m->insertions) {
        PreNode n;
        n.kind = ParseNode::Kind::Nulled;
        n.symbol = rg.pre_symbol(ins.symbol);
        slots.at(ins.slot) = std::move(n);
      }
    if (child < node.children.size()) chain(node.children.back(), slots);
  }

  PreNode assemble(const ParseNode& node) {
    if (node.kind != ParseNode::Kind::Rule) return leaf(node);
    const RewriteBinding& b = rg.bindings.at(node.rule);
    PreNode out;
    out.kind = ParseNode::Kind::Rule;
    out.rule = *b.pre_rule;
    out.start = node.start;
    out.end = node.end;
    if (b.role == RewriteRole::PassThrough) {
      out.children.push_back(assemble(node.children.at(0)));
      return out;
    }
    std::vector<std::optional<PreNode>> slots(b.childv_len);
    chain(node, slots);
    std::uint32_t cursor = node.start;
    for (auto& s : slots) {
      if (!s) throw GrammarError("reassembly left a childV slot empty");
      if (s->kind == ParseNode::Kind::Nulled) {
        s->start = s->end = cursor;
      } else {
        cursor = s->end;
      }
      out.children.push_back(std::move(*s));
    }
    return out;
  }
};

void dump(const RewrittenGrammar& g, const PreNode& n, int depth,
          std::ostringstream& os) {
  for (int i = 0; i < depth; ++i) os << "  ";
  switch (n.kind) {
    case ParseNode::Kind::Rule:
      os << "rule <" << g.pre.render_rule(n.rule) << "> span=[" << n.start << ','
         << n.end << ")\n";
      for (const PreNode& c : n.children) dump(g, c, depth + 1, os);
      break;
    case ParseNode::Kind::Token:
      os << "token " << g.pre.name(n.symbol) << '=' << n.token_value << '\n';
      break;
    case ParseNode::Kind::Nulled:
      os << "nulled " << g.pre.name(n.symbol) << '\n';
      break;
  }
}

}  // namespace

PreNode reassemble(const RewrittenGrammar& g, const ParseNode& tree) {
  Reassembler r{g};
  return r.assemble(tree);
}

std::string dump_tree(const RewrittenGrammar& g, const ParseNode& tree) {
  std::ostringstream os;
  dump(g, reassemble(g, tree), 0, os);
  return os.str();
}

}  // namespace chaf
