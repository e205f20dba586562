#ifndef GVAS_REDUCTION_HPP_
#define GVAS_REDUCTION_HPP_

// Reduction of arbitrary grammars to thin ones that keep summaries of
// finite-ratio nonterminals, and the ratio / summary computation on top.

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gvas/grammar.hpp"
#include "gvas/semilinear.hpp"
#include "gvas/summary.hpp"
#include "gvas/thin.hpp"
#include "gvas/vas2.hpp"

namespace gvas {

class ExpansionTooLarge : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RatioResult {
  bool finite = false;
  // d <= lambda_num / lambda_den * c + b on the step relation; lambda >= 1.
  Int lambda_num = 1;
  Int lambda_den = 1;
  Int b = 0;

  static RatioResult infinite() { return {}; }
};

std::string to_string(const RatioResult& r);

enum class UnfoldMode {
  Full,     // one rule per i in [0, d^|V|] with sigma(i) > -inf
  Compact,  // only the i where sigma(i) - i increases
};

/// Replaces the rules of x (delta(x) finite) by X -> (-1)^i 1^sigma(i).
Gvas unfold(const NormalizedGvas& g, int x, UnfoldMode mode = UnfoldMode::Full);
/// Same, from a precomputed summary of x and the range bound d^|V|.
Gvas unfold_with(const Gvas& g, int x, const ClosedForm& sigma, Int bound, UnfoldMode mode);

/// Whether x has a finite language (no recursive nonterminal below it).
bool finite_language(const NormalizedGvas& g, int x);
/// Replaces every occurrence of y on other right-hand sides by each word of
/// L(y).  Throws ExpansionTooLarge past `max_rules` rules.
Gvas expand(const Gvas& g, int y, std::size_t max_rules = 100'000);
/// X -> 1 X | eps.
Gvas abstract(const Gvas& g, int x);

struct LogEntry {
  std::string kind;  // "unfold", "expand", "abstract"
  std::string target;
  std::vector<std::string> removed;  // rules as "X -> rhs"
  std::vector<std::string> added;
  // abstract: the rule X -> alpha that is not thin, the nonterminal of alpha
  // that derives X, and a nonterminal of alpha with infinite displacement.
  std::string pump_rule;
  std::string pump_via;
  std::string pump_witness;
};

struct EquivalenceLog {
  std::vector<LogEntry> entries;
};

std::string to_json(const EquivalenceLog& log);
EquivalenceLog equivalence_log_from_json(const std::string& text);

/// Applies the logged rule deltas to g and normalizes.
NormalizedGvas replay(const NormalizedGvas& g, const EquivalenceLog& log);

struct ReduceOptions {
  std::size_t max_rules = 100'000;
  SummaryOptions summary;
};

struct Reduction {
  NormalizedGvas grammar;  // thin; nonterminal names and indices kept
  EquivalenceLog log;
};

Reduction reduce_to_thin(const NormalizedGvas& g, const ReduceOptions& opt = {});

/// Ratio and summary of every nonterminal of one grammar, sharing the
/// reduction and the step-relation memo.
class RatioAnalyzer {
public:
  explicit RatioAnalyzer(const NormalizedGvas& g, vas2::AccelCaps caps = {}, const ReduceOptions& opt = {});

  const Reduction& reduction() const { return red_; }
  const NormalizedGvas& simple() const { return *simple_; }

  /// The step relation of x in the thin equivalent.
  const SemilinearSet& relation(int x);
  RatioResult ratio(int x);
  /// Relational summary when the ratio is finite.
  std::optional<SummaryFn> summary(int x);

private:
  Reduction red_;
  std::unique_ptr<NormalizedGvas> simple_;
  std::unique_ptr<thin::StepRelations> steps_;
};

struct RatioAndSummary {
  RatioResult ratio;
  std::optional<SummaryFn> summary;
};

RatioAndSummary ratio_and_summary(const NormalizedGvas& g, int x, const vas2::AccelCaps& caps = {});

/// Ratio certificate read off the periods of a step relation.
RatioResult ratio_of_relation(const SemilinearSet& r);

}  // namespace gvas

#endif  // GVAS_REDUCTION_HPP_
