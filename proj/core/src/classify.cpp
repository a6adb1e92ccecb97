#include "chaf/classify.hpp"

namespace chaf {

const char* to_string(NullClass c) {
  switch (c) {
    case NullClass::NonNullable: return "non-nullable";
    case NullClass::ProperNullable: return "proper-nullable";
    case NullClass::Nulling: return "nulling";
  }
  return "?";
}

bool SymbolClassification::any_nullable() const {
  for (NullClass c : symbol_class)
    if (c != NullClass::NonNullable) return true;
  return false;
}

SymbolClassification classify(const Grammar& g) {
  if (!g.augmented()) throw GrammarError("classify requires an augmented grammar");
  const std::size_t n = g.symbol_count();

  std::vector<bool> nullable(n, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Rule& r : g.rules()) {
      if (nullable[r.lhs]) continue;
      bool all = true;
      for (SymbolId s : r.rhs)
        if (!nullable[s]) { all = false; break; }
      if (all) {
        nullable[r.lhs] = true;
        changed = true;
      }
    }
  }

  // Nulling: start from the nullable symbols and drop any whose rules can
  // reach a non-kept symbol. Terminals drop out immediately (not nullable).
  std::vector<bool> kept = nullable;
  changed = true;
  while (changed) {
    changed = false;
    for (const Rule& r : g.rules()) {
      if (!kept[r.lhs]) continue;
      for (SymbolId s : r.rhs) {
        if (!kept[s]) {
          kept[r.lhs] = false;
          changed = true;
          break;
        }
      }
    }
  }

  SymbolClassification out;
  out.symbol_class.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (kept[i])
      out.symbol_class[i] = NullClass::Nulling;
    else if (nullable[i])
      out.symbol_class[i] = NullClass::ProperNullable;
    else
      out.symbol_class[i] = NullClass::NonNullable;
  }

  out.rule_class.reserve(g.rule_count());
  for (const Rule& r : g.rules()) {
    bool all_nullable = true, all_nulling = true;
    for (SymbolId s : r.rhs) {
      if (!nullable[s]) all_nullable = false;
      if (!kept[s]) all_nulling = false;
    }
    if (all_nulling)
      out.rule_class.push_back(NullClass::Nulling);
    else if (all_nullable)
      out.rule_class.push_back(NullClass::ProperNullable);
    else
      out.rule_class.push_back(NullClass::NonNullable);
  }
  return out;
}

}  // namespace chaf
