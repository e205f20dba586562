#ifndef GVAS_ORACLE_HPP_
#define GVAS_ORACLE_HPP_

// Brute-force semantics.  Nothing here uses displacements, summaries or
// semilinear sets: this is the ground truth every analysis is tested against.

#include <stdexcept>
#include <vector>

#include "gvas/ext_value.hpp"
#include "gvas/grammar.hpp"

namespace gvas::oracle {

struct OracleBudget {
  Int max_word_len = 40;
  Int max_counter = 0;        // 0: 10 * (cMax + d^|V|)
  Int max_states = 20'000'000;  // table cells, |V| * (counter cap + 1)^2
};

class OracleBudgetExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Fin(d) when c reaches d through w without going negative, -inf otherwise.
ExtValue run_word(Int c, const Word& w);

/// Every word of L(x) of length <= max_len, ordered by length and then
/// lexicographically.  Throws OracleBudgetExceeded beyond `cap` words.
std::vector<Word> enumerate_words(const NormalizedGvas& g, int x, std::size_t max_len,
                                  std::size_t cap = 1'000'000);

struct ReachPair {
  Int c = 0;
  Int d = 0;
  Word witness;
  friend bool operator==(const ReachPair& a, const ReachPair& b) { return a.c == b.c && a.d == b.d; }
};

/// Pairs (c, d) with c <= c_max and c ->_x d witnessed by a word of length
/// at most max_word_len whose run stays within [0, counter cap].  Sorted by
/// (c, d).  An under-approximation of ->_x that grows with the budget.
std::vector<ReachPair> reach_pairs(const NormalizedGvas& g, int x, Int c_max, const OracleBudget& budget = {});

/// Same, for a sentential form over V u A.
std::vector<ReachPair> reach_pairs_form(const NormalizedGvas& g, const SymbolString& form, Int c_max,
                                        const OracleBudget& budget = {});

/// Largest d over the pairs with c <= n (the oracle's lower bound on sigma(n)).
ExtValue max_reached(const std::vector<ReachPair>& pairs, Int n);

}  // namespace gvas::oracle

#endif  // GVAS_ORACLE_HPP_
