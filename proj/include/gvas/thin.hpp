#ifndef GVAS_THIN_HPP_
#define GVAS_THIN_HPP_

// Step relations of thin grammars.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gvas/grammar.hpp"
#include "gvas/semilinear.hpp"
#include "gvas/vas2.hpp"

namespace gvas::thin {

class KernelCapExhausted : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Chains every recursive rule a1..ai Y bj..b1 through fresh nonterminals
/// X_1..X_{m-1} (m = max(i, j, 1), shorter side padded with 0) so that each
/// recursive rule lies in A V A.  Original nonterminals keep their names and
/// indices.  Throws std::invalid_argument when g is not thin.
NormalizedGvas to_simple(const NormalizedGvas& g);

/// Rules of each nonterminal whose right-hand side cannot derive it.
struct GammaSet {
  std::vector<std::vector<int>> per_nonterminal;  // rule indices
};
GammaSet gamma_set(const NormalizedGvas& g);

/// The 2-VAS of a simple grammar: one edge (a, -b) from X to Y per recursive
/// rule X -> a Y b, over the closure of `source` (state i is closure[i]).
struct SchemeGraph {
  vas2::ActionGraph graph;
  std::vector<int> states;
};
SchemeGraph action_graph(const NormalizedGvas& g, int source);

/// Memoized step relations of one simple grammar.  Relations have
/// dimension 2: (c, d) with c ->_X d.
class StepRelations {
public:
  explicit StepRelations(const NormalizedGvas& simple, vas2::AccelCaps caps = {});

  const SemilinearSet& of(int x);
  SemilinearSet of_string(const SymbolString& alpha);

  std::size_t kernel_calls() const { return kernel_calls_; }

private:
  const NormalizedGvas& g_;
  vas2::AccelCaps caps_;
  GammaSet gamma_;
  std::map<int, SemilinearSet> memo_;
  std::vector<int> active_;  // closure sizes along the recursion
  std::size_t kernel_calls_ = 0;
};

/// c ->_s d for a simple grammar; propagates KernelCapExhausted.
SemilinearSet step_relation(const NormalizedGvas& simple, int s, const vas2::AccelCaps& caps = {});

}  // namespace gvas::thin

#endif  // GVAS_THIN_HPP_
