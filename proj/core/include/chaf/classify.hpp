#pragma once

#include <cstdint>
#include <vector>

#include "chaf/grammar.hpp"

namespace chaf {

enum class NullClass : std::uint8_t { NonNullable, ProperNullable, Nulling };

const char* to_string(NullClass c);

struct SymbolClassification {
  std::vector<NullClass> symbol_class;  // by symbol id
  std::vector<NullClass> rule_class;    // by rule index

  NullClass of(SymbolId s) const { return symbol_class.at(s); }
  bool nullable(SymbolId s) const { return of(s) != NullClass::NonNullable; }
  bool nulling(SymbolId s) const { return of(s) == NullClass::Nulling; }
  bool any_nullable() const;
};

// Fixed-point nullability classification of an augmented grammar.
// A symbol is nullable iff some rule with that LHS has an all-nullable RHS
// (least fixed point). A symbol is nulling iff every sentential form it can
// derive is itself nullable; computed as the greatest fixed point inside the
// nullable set: keep a nullable symbol while every rule with that LHS has an
// all-kept RHS. Terminals are non-nullable.
SymbolClassification classify(const Grammar& g);

}  // namespace chaf
