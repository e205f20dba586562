#include "gvas/displacement.hpp"

#include <stdexcept>
#include <unordered_map>

namespace gvas {

namespace {

// One Jacobi round: max over rules of the sum of the previous values.
std::vector<ExtInt> round_of(const NormalizedGvas& g, const std::vector<ExtInt>& prev,
                             const std::vector<bool>& infinite) {
  std::vector<ExtInt> next(prev.size(), ExtInt::neg_inf());
  for (const Rule& r : g.grammar().rules) {
    auto lhs = static_cast<std::size_t>(r.lhs);
    if (infinite[lhs]) continue;
    ExtInt sum = 0;
    for (const Symbol& s : r.rhs) {
      sum += s.is_terminal() ? ExtInt(s.action()) : prev[static_cast<std::size_t>(s.index())];
      if (sum.is_neg_inf()) break;
    }
    next[lhs] = max(next[lhs], sum);
  }
  for (std::size_t x = 0; x < prev.size(); ++x)
    if (infinite[x]) next[x] = ExtInt::pos_inf();
  return next;
}

}  // namespace

// Value iteration from -inf.  A finite delta(X) is realised by an elementary
// tree, which has at most |V| nonterminal levels, so after |V| rounds every
// finite entry is exact.  Anything still moving afterwards is +inf; it and
// everything deriving it are fixed at +inf and the rounds are rerun on the
// rest, at most |V| times.
DisplacementTable displacement_table(const NormalizedGvas& g) {
  const std::size_t n = g.size();
  std::vector<bool> infinite(n, false);
  std::vector<ExtInt> cur;
  for (;;) {
    cur.assign(n, ExtInt::neg_inf());
    for (std::size_t h = 0; h < n + 1; ++h) cur = round_of(g, cur, infinite);
    auto next = round_of(g, cur, infinite);
    bool marked = false;
    for (std::size_t x = 0; x < n; ++x) {
      if (infinite[x] || next[x] == cur[x]) continue;
      for (std::size_t y = 0; y < n; ++y)
        if (g.in_closure(static_cast<int>(y), static_cast<int>(x))) infinite[y] = true;
      marked = true;
    }
    if (!marked) break;
  }
  DisplacementTable t;
  t.elementary_bound = g.elementary_bound();
  t.per_nonterminal = cur;
  for (std::size_t x = 0; x < n; ++x) {
    if (infinite[x]) t.per_nonterminal[x] = ExtInt::pos_inf();
    if (t.per_nonterminal[x].is_neg_inf()) throw std::logic_error("displacement: unproductive nonterminal");
  }
  return t;
}

ExtInt displacement(const DisplacementTable& t, const SymbolString& w) {
  ExtInt sum = 0;
  for (const Symbol& s : w) sum += s.is_terminal() ? ExtInt(s.action()) : t[s.index()];
  return sum;
}

ExtInt displacement(const NormalizedGvas& g, const SymbolString& w) { return displacement(displacement_table(g), w); }

Int elementary_max_yield(const NormalizedGvas& g, int x) {
  if (g.size() > 24) throw std::invalid_argument("elementary_max_yield: too many nonterminals");
  auto dt = displacement_table(g);
  if (!dt.finite(x)) throw std::invalid_argument("elementary_max_yield: displacement is infinite");

  std::unordered_map<std::uint64_t, ExtInt> memo;
  auto go = [&](auto&& self, int y, std::uint32_t forbidden) -> ExtInt {
    std::uint64_t key = (static_cast<std::uint64_t>(forbidden) << 5) | static_cast<std::uint64_t>(y);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::uint32_t below = forbidden | (1u << y);
    ExtInt best = ExtInt::neg_inf();
    for (int ri : g.rules_of(y)) {
      ExtInt sum = 0;
      for (const Symbol& s : g.rule(ri).rhs) {
        if (s.is_terminal()) {
          sum += s.action();
        } else if (below & (1u << s.index())) {
          sum = ExtInt::neg_inf();
        } else {
          sum += self(self, s.index(), below);
        }
        if (sum.is_neg_inf()) break;
      }
      best = max(best, sum);
    }
    memo[key] = best;
    return best;
  };
  return go(go, x, 0).value();
}

}  // namespace gvas
