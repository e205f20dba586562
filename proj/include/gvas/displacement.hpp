#ifndef GVAS_DISPLACEMENT_HPP_
#define GVAS_DISPLACEMENT_HPP_

#include <vector>

#include "gvas/ext_value.hpp"
#include "gvas/grammar.hpp"

namespace gvas {

/// delta(X) for every nonterminal: finite or +inf, never -inf.
struct DisplacementTable {
  std::vector<ExtInt> per_nonterminal;
  Int elementary_bound = 0;  // d^|V|, saturated

  const ExtInt& operator[](int x) const { return per_nonterminal[static_cast<std::size_t>(x)]; }
  bool finite(int x) const { return (*this)[x].is_finite(); }
};

DisplacementTable displacement_table(const NormalizedGvas& g);

/// delta of a sentential form: the saturating sum over its symbols.
ExtInt displacement(const DisplacementTable& t, const SymbolString& w);
ExtInt displacement(const NormalizedGvas& g, const SymbolString& w);

/// Largest yield sum over elementary parse trees rooted at x.  Requires
/// delta(x) finite, and then equals it.  Exponential in |V|; refuses more
/// than 24 nonterminals.
Int elementary_max_yield(const NormalizedGvas& g, int x);

}  // namespace gvas

#endif  // GVAS_DISPLACEMENT_HPP_
