#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "chaf/rewrite.hpp"

namespace chaf {

struct DottedRule {
  std::uint32_t rule = 0;
  std::uint32_t pos = 0;

  bool operator==(const DottedRule&) const = default;
  auto operator<=>(const DottedRule&) const = default;
};

std::optional<SymbolId> postdot(const Grammar& g, DottedRule dr);
std::optional<DottedRule> next_dr(const Grammar& g, DottedRule dr);
bool is_completion(const Grammar& g, DottedRule dr);

enum class Phase : std::uint8_t { Seed, Scan, Reduce, Predict };
const char* to_string(Phase p);

struct EarleyItem {
  DottedRule dr;
  std::uint32_t origin = 0;
  std::uint32_t current = 0;
  Phase phase = Phase::Seed;

  bool same_entry(const EarleyItem& o) const {
    return dr == o.dr && origin == o.origin && current == o.current;
  }
};

// Per postdot symbol, the rules predicted (transitively) when that symbol is
// postdot, as a word-packed bit mask over rule indices. Nonterminals only.
class PredictionClosure {
 public:
  PredictionClosure(std::size_t symbols, std::size_t rules);

  bool contains(SymbolId postdot, std::size_t rule) const;
  const std::vector<std::uint64_t>& mask(SymbolId postdot) const;
  const std::vector<std::size_t>& rules_for(SymbolId postdot) const;
  std::size_t words() const { return words_; }

  void set(SymbolId postdot, std::size_t rule);
  void finalize();  // builds the per-symbol rule lists

 private:
  std::size_t words_;
  std::vector<std::vector<std::uint64_t>> masks_;
  std::vector<std::vector<std::size_t>> lists_;
};

// Fixed point of one-step prediction over dot-0 rules; g must be nulling-free.
PredictionClosure precompute_prediction_closure(const RewrittenGrammar& g);

// One-step Earley prediction: the dot-0 items for the postdot symbol of x,
// at x's current location. Ordered by rule index.
std::vector<EarleyItem> opred(const EarleyItem& x, const RewrittenGrammar& g);

// Transitive closure of opred, by levels: predN(0, s) = s and predN(n+1, s)
// is everything opred yields from level n; ahpred is the union over all
// levels applied to opred(x).
std::vector<EarleyItem> ahpred(const EarleyItem& x, const RewrittenGrammar& g);

class EarleySet {
 public:
  explicit EarleySet(std::uint32_t location) : location_(location) {}

  std::uint32_t location() const { return location_; }
  const std::vector<EarleyItem>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool contains(DottedRule dr, std::uint32_t origin) const;
  // Indices of items whose postdot symbol is s.
  const std::vector<std::uint32_t>& with_postdot(SymbolId s) const;

 private:
  friend class Chart;
  bool add(const Grammar& g, DottedRule dr, std::uint32_t origin, Phase phase);

  std::uint32_t location_;
  std::vector<EarleyItem> items_;
  std::unordered_set<std::uint64_t> index_;  // (rule, pos, origin) keys
  std::unordered_map<SymbolId, std::vector<std::uint32_t>> by_postdot_;
};

struct ChartStats {
  std::vector<std::size_t> per_set;
  std::size_t total = 0;
  std::size_t add_attempts = 0;
  std::size_t duplicate_attempts = 0;
};

// A dotted rule of the pre-rewrite grammar plus the origin of its instance.
struct ProgressEntry {
  std::size_t pre_rule = 0;
  std::uint32_t dot = 0;
  std::uint32_t origin = 0;

  auto operator<=>(const ProgressEntry&) const = default;
};

// The Earley chart: one set per input location, built one location at a time
// in scan/reduce/predict phases. Sets at or below the frontier are final.
// The grammar must be nulling-free (run it through the rewrite pipeline).
class Chart {
 public:
  Chart(const RewrittenGrammar& g, const PredictionClosure& closure);

  void advance(const Token& token);

  std::uint32_t frontier() const { return frontier_; }
  std::size_t set_count() const { return sets_.size(); }
  const EarleySet& set(std::uint32_t i) const { return sets_.at(i); }
  const std::vector<Token>& input() const { return input_; }
  const RewrittenGrammar& grammar() const { return *g_; }

  // Acceptance item in the frontier set with the whole input consumed, or
  // the trivial parse (empty input, nullable start).
  bool accepted() const;
  std::vector<SymbolId> acceptable_tokens() const;
  ChartStats stats() const;
  // Items of set i translated to pre-rewrite dotted rules, duplicates merged.
  std::vector<ProgressEntry> progress_report(std::uint32_t i) const;

 private:
  bool add(std::uint32_t set, DottedRule dr, std::uint32_t origin, Phase phase);
  void predict_phase(EarleySet& es);
  void collect_origins(std::uint32_t set, std::uint32_t item,
                       std::vector<std::uint32_t>& out,
                       std::unordered_set<std::uint64_t>& seen) const;

  const RewrittenGrammar* g_;
  const PredictionClosure* closure_;
  std::vector<EarleySet> sets_;
  std::vector<Token> input_;
  std::uint32_t frontier_ = 0;
  std::size_t attempts_ = 0;
  std::size_t duplicates_ = 0;
};

struct RecognizeResult {
  bool accepted = false;
  Chart chart;
};

RecognizeResult recognize(const RewrittenGrammar& g, const PredictionClosure& closure,
                          std::span<const Token> input);

std::string render_dotted(const Grammar& g, DottedRule dr);
std::string render_item(const Grammar& g, const EarleyItem& item);
// One line per item: set=<i> item=<...> origin=<j> phase=<...>
std::string render_trace(const Chart& chart);
// Progress reports for all built sets, in pre-rewrite terms.
std::string render_progress(const Chart& chart);

}  // namespace chaf
