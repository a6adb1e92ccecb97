#include "chaf/semantics.hpp"

namespace chaf {

std::string value_string(const Value& v) {
  if (!v.has_value()) return "()";
  if (const auto* s = std::any_cast<std::string>(&v)) return *s;
  return "<non-string value>";
}

Semantics collecting_semantics(const Grammar& pre) {
  Semantics sem;
  std::size_t accept_rule =
      pre.augmented() ? pre.accept_rule() : static_cast<std::size_t>(-1);
  for (std::size_t i = 0; i < pre.rule_count(); ++i) {
    if (i == accept_rule) {
      sem.rule_fns[i] = [](EvalContext&, std::span<const Value> kids) {
        return kids.empty() ? Value{} : kids[0];
      };
      continue;
    }
    sem.rule_fns[i] = [i](EvalContext&, std::span<const Value> kids) {
      std::string out = "(r" + std::to_string(i);
      for (const Value& k : kids) {
        out += ' ';
        out += value_string(k);
      }
      out += ')';
      return Value{out};
    };
  }
  sem.terminal = [](EvalContext& ctx, SymbolId s, const std::string& tok) {
    return Value{tok.empty() ? ctx.grammar->name(s) : tok};
  };
  sem.nulled = [](EvalContext& ctx, SymbolId s) {
    return Value{"(null " + ctx.grammar->name(s) + ")"};
  };
  return sem;
}

}  // namespace chaf
