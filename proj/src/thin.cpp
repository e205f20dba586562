#include "gvas/thin.hpp"

#include <algorithm>
#include <cassert>

namespace gvas::thin {

namespace {

std::string fresh_name(const Gvas& g, const std::string& base, int& counter) {
  for (;;) {
    std::string name = base + std::to_string(++counter);
    if (g.find(name) < 0) return name;
  }
}

SemilinearSet terminal_step(Int a) {
  Int lo = std::max<Int>(0, -a);
  return SemilinearSet::linear({{lo, lo + a}, {{1, 1}}});
}

}  // namespace

NormalizedGvas to_simple(const NormalizedGvas& g) {
  if (!structural_report(g).is_thin) throw std::invalid_argument("to_simple: grammar is not thin");
  const Gvas& src = g.grammar();
  Gvas out;
  out.nonterminals = src.nonterminals;
  out.start = src.start;
  std::vector<int> counters(src.size(), 0);
  for (const auto& r : src.rules) {
    if (!g.derivable_from(r.lhs, r.rhs) || is_ava(r.rhs)) {
      out.rules.push_back(r);
      continue;
    }
    auto it = std::find_if(r.rhs.begin(), r.rhs.end(), [](const Symbol& s) { return s.is_nonterminal(); });
    SymbolString before(r.rhs.begin(), it), after_rev(std::next(it), r.rhs.end());
    std::reverse(after_rev.begin(), after_rev.end());
    const std::size_t m = std::max<std::size_t>({before.size(), after_rev.size(), 1});
    before.resize(m, Symbol::t(0));
    after_rev.resize(m, Symbol::t(0));
    int from = r.lhs;
    for (std::size_t k = 0; k < m; ++k) {
      int to = k + 1 == m
                   ? it->index()
                   : out.intern(fresh_name(out, src.nonterminals[static_cast<std::size_t>(r.lhs)],
                                           counters[static_cast<std::size_t>(r.lhs)]));
      out.rules.push_back({from, {before[k], Symbol::nt(to), after_rev[k]}});
      from = to;
    }
  }
  return NormalizedGvas::from_normalized(std::move(out));
}

GammaSet gamma_set(const NormalizedGvas& g) {
  GammaSet out;
  out.per_nonterminal.resize(g.size());
  for (std::size_t i = 0; i < g.grammar().rules.size(); ++i) {
    const Rule& r = g.grammar().rules[i];
    if (!g.derivable_from(r.lhs, r.rhs)) out.per_nonterminal[static_cast<std::size_t>(r.lhs)].push_back(static_cast<int>(i));
  }
  return out;
}

SchemeGraph action_graph(const NormalizedGvas& g, int source) {
  SchemeGraph sg;
  sg.states = g.closure(source);
  std::vector<int> slot(g.size(), -1);
  for (std::size_t i = 0; i < sg.states.size(); ++i) slot[static_cast<std::size_t>(sg.states[i])] = static_cast<int>(i);
  sg.graph.states = static_cast<int>(sg.states.size());
  sg.graph.source = slot[static_cast<std::size_t>(source)];
  for (const auto& r : g.grammar().rules) {
    if (slot[static_cast<std::size_t>(r.lhs)] < 0 || !g.derivable_from(r.lhs, r.rhs)) continue;
    if (!is_ava(r.rhs)) throw std::invalid_argument("action_graph: grammar is not simple");
    sg.graph.edges.push_back({slot[static_cast<std::size_t>(r.lhs)],
                              {r.rhs[0].action(), -r.rhs[2].action()},
                              slot[static_cast<std::size_t>(r.rhs[1].index())]});
  }
  return sg;
}

StepRelations::StepRelations(const NormalizedGvas& simple, vas2::AccelCaps caps)
    : g_(simple), caps_(caps), gamma_(gamma_set(simple)) {}

SemilinearSet StepRelations::of_string(const SymbolString& alpha) {
  SemilinearSet r = SemilinearSet::identity(1);
  for (const auto& s : alpha) {
    r = simplify(compose(r, s.is_terminal() ? terminal_step(s.action()) : of(s.index())));
    if (r.is_empty()) break;
  }
  return r;
}

// c ->_s d iff the 2-VAS of the recursive rules goes from (c, d) to some
// (c', d') at X and c' ->_alpha d' for a non-recursive rule X -> alpha.
const SemilinearSet& StepRelations::of(int s) {
  if (auto it = memo_.find(s); it != memo_.end()) return it->second;
  const auto live = static_cast<int>(g_.closure(s).size());
  // Every nonterminal of a gamma rhs has a strictly smaller closure.
  assert(active_.empty() || live < active_.back());
  active_.push_back(live);

  SchemeGraph sg = action_graph(g_, s);
  ++kernel_calls_;
  vas2::ReachSolution reach = vas2::reach_relations(sg.graph, caps_);
  if (!reach.stable) {
    active_.pop_back();
    throw KernelCapExhausted("kernel cap exhausted for " + g_.name(s) + ": " + reach.diagnostics);
  }
  SemilinearSet out = SemilinearSet::empty(2);
  for (std::size_t i = 0; i < sg.states.size(); ++i) {
    const SemilinearSet& to_x = reach.per_state[i];
    if (to_x.is_empty()) continue;
    SemilinearSet leaves = SemilinearSet::empty(2);
    for (int ri : gamma_.per_nonterminal[static_cast<std::size_t>(sg.states[i])])
      leaves = unite(leaves, of_string(g_.rule(ri).rhs));
    if (leaves.is_empty()) continue;
    out = unite(out, join(to_x, leaves, {{{2, 0}, {3, 1}}, {{0, 0}, {0, 1}}}));
  }
  active_.pop_back();
  return memo_.emplace(s, simplify(out)).first->second;
}

SemilinearSet step_relation(const NormalizedGvas& simple, int s, const vas2::AccelCaps& caps) {
  if (!structural_report(simple).is_simple) throw std::invalid_argument("step_relation: grammar is not simple");
  StepRelations rel(simple, caps);
  return rel.of(s);
}

}  // namespace gvas::thin
