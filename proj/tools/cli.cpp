#include "cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "chaf/ahfa.hpp"
#include "chaf/classify.hpp"
#include "chaf/evaluator.hpp"
#include "chaf/grammar.hpp"
#include "chaf/recognizer.hpp"
#include "chaf/rewrite.hpp"
#include "chaf/semantics.hpp"

namespace chaf::cli {

namespace {

Grammar load_grammar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GrammarError("cannot read grammar file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grammar(buf.str());
}

std::vector<Token> parse_tokens(const Grammar& g, const std::string& text) {
  std::vector<Token> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    std::string name = tok, value;
    if (auto eq = tok.find('='); eq != std::string::npos) {
      name = tok.substr(0, eq);
      value = tok.substr(eq + 1);
    }
    auto sym = g.find_symbol(name);
    if (!sym) throw GrammarError("unknown token symbol: " + name);
    out.push_back(Token{*sym, value});
  }
  return out;
}

struct Pipeline {
  Grammar augmented;
  SymbolClassification cls;
};

Pipeline prepare(const std::string& path) {
  Pipeline p{augment(load_grammar(path)), {}};
  p.cls = classify(p.augmented);
  return p;
}

RewrittenGrammar null_free_pipeline(const Pipeline& p) {
  RewrittenGrammar chaf = chaf_rewrite(p.augmented, p.cls);
  return eliminate_nulling(chaf, classify(chaf.grammar));
}

int cmd_classify(const std::string& path, std::ostream& out) {
  Pipeline p = prepare(path);
  const Grammar& g = p.augmented;
  std::size_t width = 6;
  for (std::size_t i = 0; i < g.symbol_count(); ++i)
    width = std::max(width, g.name(static_cast<SymbolId>(i)).size());
  out << std::left << std::setw(static_cast<int>(width) + 2) << "symbol"
      << std::setw(13) << "kind" << "class\n";
  for (std::size_t i = 0; i < g.symbol_count(); ++i) {
    SymbolId s = static_cast<SymbolId>(i);
    out << std::left << std::setw(static_cast<int>(width) + 2) << g.name(s)
        << std::setw(13) << (g.is_terminal(s) ? "terminal" : "nonterminal")
        << to_string(p.cls.of(s)) << '\n';
  }
  return 0;
}

int cmd_rewrite(const std::string& path, const std::string& mode,
                std::ostream& out) {
  Pipeline p = prepare(path);
  RewrittenGrammar rg;
  if (mode == "nnf") {
    rg = nnf_rewrite(p.augmented, p.cls);
  } else if (mode == "chaf") {
    rg = chaf_rewrite(p.augmented, p.cls);
  } else if (mode == "null-free") {
    rg = null_free_pipeline(p);
  } else {
    throw GrammarError("unknown rewrite mode: " + mode);
  }
  out << dump_rules(rg);
  std::size_t by_role[6] = {0, 0, 0, 0, 0, 0};
  for (const RewriteBinding& b : rg.bindings) ++by_role[static_cast<int>(b.role)];
  out << "rules: " << rg.grammar.rule_count();
  for (int r = 0; r < 6; ++r) {
    out << ' ' << to_string(static_cast<RewriteRole>(r)) << '=' << by_role[r];
  }
  out << " nullable-start=" << (rg.nullable_start ? "yes" : "no") << '\n';
  return 0;
}

int cmd_parse(const std::string& path, const std::string& input, bool trace,
              bool internal, bool tree, bool eval, std::ostream& out) {
  Pipeline p = prepare(path);
  RewrittenGrammar rg = null_free_pipeline(p);
  std::vector<Token> tokens = parse_tokens(rg.grammar, input);
  PredictionClosure closure = precompute_prediction_closure(rg);
  RecognizeResult result = recognize(rg, closure, tokens);
  out << (result.accepted ? "accepted" : "rejected") << '\n';
  if (trace) out << (internal ? render_trace(result.chart) : render_progress(result.chart));
  if (result.accepted && (tree || eval)) {
    auto t = build_tree(result.chart);
    if (tree) out << dump_tree(rg, *t);
    if (eval) {
      Semantics sem = collecting_semantics(rg.pre);
      out << "value: " << value_string(evaluate(*t, sem, rg)) << '\n';
    }
  }
  return result.accepted ? 0 : 1;
}

int cmd_tokens(const std::string& path, const std::string& prefix,
               std::ostream& out) {
  Pipeline p = prepare(path);
  RewrittenGrammar rg = null_free_pipeline(p);
  std::vector<Token> tokens = parse_tokens(rg.grammar, prefix);
  PredictionClosure closure = precompute_prediction_closure(rg);
  Chart chart(rg, closure);
  for (const Token& t : tokens) chart.advance(t);
  bool first = true;
  for (SymbolId s : chart.acceptable_tokens()) {
    if (!first) out << ' ';
    out << rg.grammar.name(s);
    first = false;
  }
  out << '\n';
  return 0;
}

int cmd_ahfa(const std::string& path, bool dot, bool stats, std::ostream& out) {
  Pipeline p = prepare(path);
  RewrittenGrammar rg = nnf_rewrite(p.augmented, p.cls);
  Ahfa a = build_ahfa(rg);
  if (dot)
    out << render_dot(a, rg);
  else if (stats)
    out << render_stats(ahfa_statistics(a, rg), a, rg);
  else
    out << render_states(a, rg);
  return 0;
}

int cmd_stats(const std::string& path, const std::string& input, std::ostream& out) {
  Pipeline p = prepare(path);
  RewrittenGrammar rg = null_free_pipeline(p);
  std::vector<Token> tokens = parse_tokens(rg.grammar, input);
  PredictionClosure closure = precompute_prediction_closure(rg);
  RecognizeResult result = recognize(rg, closure, tokens);
  ChartStats s = result.chart.stats();
  out << "set  items\n";
  for (std::size_t i = 0; i < s.per_set.size(); ++i)
    out << std::left << std::setw(5) << i << s.per_set[i] << '\n';
  out << "total items:        " << s.total << '\n';
  out << "add attempts:       " << s.add_attempts << '\n';
  out << "duplicate attempts: " << s.duplicate_attempts << '\n';
  out << (result.accepted ? "accepted" : "rejected") << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Earley parsing toolkit with nullable-symbol rewrites"};
  app.require_subcommand(1);

  std::string grammar_path, mode = "chaf", input, prefix;
  bool trace = false, internal = false, tree = false, eval = false;
  bool dot = false, stats_flag = false;

  auto* classify_cmd = app.add_subcommand("classify", "per-symbol nullability classes");
  classify_cmd->add_option("grammar", grammar_path, "grammar file")->required();

  auto* rewrite_cmd = app.add_subcommand("rewrite", "dump a grammar rewrite");
  rewrite_cmd->add_option("grammar", grammar_path)->required();
  rewrite_cmd->add_option("--mode", mode, "nnf, chaf, or null-free")
      ->check(CLI::IsMember({"nnf", "chaf", "null-free"}));

  auto* parse_cmd = app.add_subcommand("parse", "recognize an input");
  parse_cmd->add_option("grammar", grammar_path)->required();
  parse_cmd->add_option("--input", input, "whitespace-separated tokens, name or name=value");
  parse_cmd->add_flag("--trace", trace, "per-set item listing");
  parse_cmd->add_flag("--internal", internal, "trace the rewritten grammar's items");
  parse_cmd->add_flag("--tree", tree, "dump the canonical parse tree");
  parse_cmd->add_flag("--eval", eval, "evaluate with the collecting semantics");

  auto* tokens_cmd = app.add_subcommand("tokens", "acceptable tokens after a prefix");
  tokens_cmd->add_option("grammar", grammar_path)->required();
  tokens_cmd->add_option("--prefix", prefix, "whitespace-separated tokens");

  auto* ahfa_cmd = app.add_subcommand("ahfa", "build the split LR(0) eps-DFA");
  ahfa_cmd->add_option("grammar", grammar_path)->required();
  ahfa_cmd->add_flag("--dot", dot, "graphviz output");
  ahfa_cmd->add_flag("--stats", stats_flag, "state statistics");

  auto* stats_cmd = app.add_subcommand("stats", "chart statistics for an input");
  stats_cmd->add_option("grammar", grammar_path)->required();
  stats_cmd->add_option("--input", input);

  std::vector<std::string> full = {"chaf"};
  full.insert(full.end(), args.begin(), args.end());
  std::vector<char*> argv;
  argv.reserve(full.size());
  for (auto& s : full) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (classify_cmd->parsed()) return cmd_classify(grammar_path, out);
    if (rewrite_cmd->parsed()) return cmd_rewrite(grammar_path, mode, out);
    if (parse_cmd->parsed())
      return cmd_parse(grammar_path, input, trace, internal, tree, eval, out);
    if (tokens_cmd->parsed()) return cmd_tokens(grammar_path, prefix, out);
    if (ahfa_cmd->parsed()) return cmd_ahfa(grammar_path, dot, stats_flag, out);
    if (stats_cmd->parsed()) return cmd_stats(grammar_path, input, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  err << "error: no command\n";
  return 2;
}

}  // namespace chaf::cli
