#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "chaf/ahfa.hpp"
#include "chaf/classify.hpp"
#include "chaf/evaluator.hpp"
#include "chaf/recognizer.hpp"
#include "chaf/rewrite.hpp"

using namespace chaf;

namespace {

// A list grammar with optional elements, enough nullables to make the
// rewrite pipeline earn its keep.
const char* kListGrammar =
    "start: List\n"
    "List ::= Item List\n"
    "List ::=\n"
    "Item ::= a Opt b\n"
    "Opt ::= o\n"
    "Opt ::=\n";

Grammar optional_run(int pn) {
  std::string src = "start: R\nR ::=";
  for (int i = 0; i < pn; ++i) src += " A";
  src += "\nA ::= a\nA ::=\n";
  return augment(parse_grammar(src));
}

RewrittenGrammar pipeline(const Grammar& g) {
  auto cls = classify(g);
  RewrittenGrammar chaf = chaf_rewrite(g, cls);
  return eliminate_nulling(chaf, classify(chaf.grammar));
}

std::vector<Token> list_input(const Grammar& nf, std::size_t items) {
  SymbolId a = *nf.find_symbol("a");
  SymbolId b = *nf.find_symbol("b");
  SymbolId o = *nf.find_symbol("o");
  std::vector<Token> w;
  for (std::size_t i = 0; i < items; ++i) {
    w.push_back({a, ""});
    if (i % 3 == 0) w.push_back({o, ""});
    w.push_back({b, ""});
  }
  return w;
}

void BM_ChafRewrite(benchmark::State& state) {
  Grammar g = optional_run(static_cast<int>(state.range(0)));
  auto cls = classify(g);
  for (auto _ : state) {
    RewrittenGrammar rg = chaf_rewrite(g, cls);
    benchmark::DoNotOptimize(rg.grammar.rule_count());
  }
}
BENCHMARK(BM_ChafRewrite)->Arg(4)->Arg(12)->Arg(19);

void BM_PredictionClosure(benchmark::State& state) {
  Grammar g = augment(parse_grammar(kListGrammar));
  RewrittenGrammar nf = pipeline(g);
  for (auto _ : state) {
    PredictionClosure pc = precompute_prediction_closure(nf);
    benchmark::DoNotOptimize(pc.words());
  }
}
BENCHMARK(BM_PredictionClosure);

void BM_Recognize(benchmark::State& state) {
  Grammar g = augment(parse_grammar(kListGrammar));
  RewrittenGrammar nf = pipeline(g);
  PredictionClosure pc = precompute_prediction_closure(nf);
  std::vector<Token> w = list_input(nf.grammar, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto res = recognize(nf, pc, w);
    benchmark::DoNotOptimize(res.accepted);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.size()));
}
BENCHMARK(BM_Recognize)->Arg(16)->Arg(64)->Arg(256);

void BM_BuildTree(benchmark::State& state) {
  Grammar g = augment(parse_grammar(kListGrammar));
  RewrittenGrammar nf = pipeline(g);
  PredictionClosure pc = precompute_prediction_closure(nf);
  std::vector<Token> w = list_input(nf.grammar, 32);
  auto res = recognize(nf, pc, w);
  for (auto _ : state) {
    auto tree = build_tree(res.chart);
    benchmark::DoNotOptimize(tree->children.size());
  }
}
BENCHMARK(BM_BuildTree);

void BM_AhfaBuild(benchmark::State& state) {
  Grammar g = augment(parse_grammar(kListGrammar));
  auto cls = classify(g);
  RewrittenGrammar nnf = nnf_rewrite(g, cls);
  for (auto _ : state) {
    Ahfa a = build_ahfa(nnf);
    benchmark::DoNotOptimize(a.states().size());
  }
}
BENCHMARK(BM_AhfaBuild);

}  // namespace

BENCHMARK_MAIN();
