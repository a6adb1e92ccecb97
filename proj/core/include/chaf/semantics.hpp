#pragma once

#include <any>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>

#include "chaf/grammar.hpp"

namespace chaf {

// Semantic values are type-erased; the collecting semantics below stores
// std::string.
using Value = std::any;

// Handed to every semantic function; spans refer to input locations.
struct EvalContext {
  const Grammar* grammar = nullptr;  // the pre-rewrite grammar
  std::uint32_t start = 0;
  std::uint32_t end = 0;
};

using RuleFn = std::function<Value(EvalContext&, std::span<const Value>)>;
using TerminalFn = std::function<Value(EvalContext&, SymbolId, const std::string&)>;
using NulledFn = std::function<Value(EvalContext&, SymbolId)>;

// Per-rule functions are keyed by rule index in the pre-rewrite grammar.
// Rule functions may carry side effects; evaluation order is leftmost child
// first, bottom up. Unset nulled() yields an inert empty Value.
struct Semantics {
  std::unordered_map<std::size_t, RuleFn> rule_fns;
  TerminalFn terminal;
  NulledFn nulled;

  const RuleFn* find_rule(std::size_t rule) const {
    auto it = rule_fns.find(rule);
    return it == rule_fns.end() ? nullptr : &it->second;
  }
  Value nulled_value(EvalContext& ctx, SymbolId s) const {
    if (nulled) return nulled(ctx, s);
    return Value{};
  }
};

// Collecting semantics over a grammar: every rule builds
// "(r<index> <child> ...)", terminals yield their token value (or name),
// nulled symbols yield "(null <name>)". The accept rule passes through.
Semantics collecting_semantics(const Grammar& pre);

// Unwraps a string-typed Value; empty Values render as "()".
std::string value_string(const Value& v);

}  // namespace chaf
