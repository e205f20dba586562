#include "gvas/vas2.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>

namespace gvas::vas2 {

namespace {

void validate(const Action& a) {
  for (Int x : a)
    if (x < -kMaxAction || x > kMaxAction) throw std::invalid_argument("vas2: action component out of range");
}

// Smallest enabling start and total effect of w.
std::pair<Action, Action> profile(const std::vector<Action>& w) {
  Action sum{0, 0}, need{0, 0};
  for (const auto& a : w) {
    validate(a);
    for (int j = 0; j < 2; ++j) {
      sum[j] += a[j];
      need[j] = std::max(need[j], -sum[j]);
    }
  }
  return {need, sum};
}

const Vec kDiag1{1, 0, 1, 0};
const Vec kDiag2{0, 1, 0, 1};

}  // namespace

SemilinearSet word_relation(const std::vector<Action>& w) {
  auto [m, s] = profile(w);
  return SemilinearSet::linear({{m[0], m[1], m[0] + s[0], m[1] + s[1]}, {kDiag1, kDiag2}});
}

// w^n is enabled at c iff c >= m on coordinates with a non-negative effect
// and c + (n-1) * sum >= m on the others.  Writing n = n' + 1 and c as m
// plus (n' times the deficit) plus slack gives one linear set.
SemilinearSet cycle_plus(const std::vector<Action>& w) {
  auto [m, s] = profile(w);
  Vec base{m[0], m[1], m[0] + s[0], m[1] + s[1]};
  Vec iter{std::max<Int>(-s[0], 0), std::max<Int>(-s[1], 0), std::max<Int>(s[0], 0), std::max<Int>(s[1], 0)};
  return simplify(SemilinearSet::linear({base, {kDiag1, kDiag2, iter}}));
}

SemilinearSet cycle_star(const std::vector<Action>& w) { return unite(SemilinearSet::identity(2), cycle_plus(w)); }

SemilinearSet step_image(const SemilinearSet& r, const Action& a) {
  validate(a);
  return translate(r, {0, 0, a[0], a[1]});
}

std::vector<Action> actions_of(const ActionGraph& g, const std::vector<int>& edges) {
  std::vector<Action> out;
  for (int e : edges) out.push_back(g.edges.at(static_cast<std::size_t>(e)).action);
  return out;
}

SemilinearSet scheme_relation(const ActionGraph& g, const PathScheme& s) {
  if (s.paths.size() != s.cycles.size() + 1) throw std::invalid_argument("scheme_relation: malformed scheme");
  SemilinearSet r = word_relation(actions_of(g, s.paths[0]));
  for (std::size_t i = 0; i < s.cycles.size(); ++i) {
    r = compose(r, cycle_star(actions_of(g, s.cycles[i])));
    r = compose(r, word_relation(actions_of(g, s.paths[i + 1])));
  }
  return r;
}

std::vector<std::vector<int>> simple_cycles(const ActionGraph& g, int q, std::size_t cap) {
  std::vector<std::vector<int>> out;
  std::vector<int> path;
  std::vector<bool> on(static_cast<std::size_t>(g.states), false);
  auto go = [&](auto&& self, int at) -> void {
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const Edge& ed = g.edges[e];
      if (ed.src != at) continue;
      path.push_back(static_cast<int>(e));
      if (ed.dst == q) {
        out.push_back(path);
      } else if (!on[static_cast<std::size_t>(ed.dst)]) {
        on[static_cast<std::size_t>(ed.dst)] = true;
        self(self, ed.dst);
        on[static_cast<std::size_t>(ed.dst)] = false;
      }
      path.pop_back();
    }
  };
  on[static_cast<std::size_t>(q)] = true;
  go(go, q);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  if (out.size() > cap) out.resize(cap);
  return out;
}

namespace {

// Inclusions the stability certificate needs, identity first.
std::vector<std::pair<std::size_t, SemilinearSet>> obligations(const ActionGraph& g,
                                                               const std::vector<SemilinearSet>& r) {
  std::vector<std::pair<std::size_t, SemilinearSet>> out;
  out.emplace_back(static_cast<std::size_t>(g.source), SemilinearSet::identity(2));
  for (const auto& e : g.edges)
    out.emplace_back(static_cast<std::size_t>(e.dst), step_image(r[static_cast<std::size_t>(e.src)], e.action));
  return out;
}

// Cheap checks first so a failing certificate rarely reaches Presburger.
std::optional<bool> certify(const ActionGraph& g, const std::vector<SemilinearSet>& r, const pres::Limits& lim) {
  auto obl = obligations(g, r);
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < obl.size(); ++i) {
    auto v = try_includes(r[obl[i].first], obl[i].second);
    if (v && !*v) return false;
    if (!v) open.push_back(i);
  }
  try {
    for (std::size_t i : open)
      if (!includes(r[obl[i].first], obl[i].second, lim)) return false;
  } catch (const pres::PresburgerResourceExceeded&) {
    return std::nullopt;
  }
  return true;
}

// Drops components the others already cover.
SemilinearSet prune(const SemilinearSet& s) {
  SemilinearSet out = simplify(s);
  for (std::size_t i = out.components.size(); i-- > 0;) {
    SemilinearSet rest{out.dim, {}};
    for (std::size_t j = 0; j < out.components.size(); ++j)
      if (j != i) rest.components.push_back(out.components[j]);
    if (try_includes(rest, SemilinearSet::linear(out.components[i])) == std::optional<bool>(true))
      out = std::move(rest);
  }
  return out;
}

}  // namespace

bool verify_stability(const ActionGraph& g, const std::vector<SemilinearSet>& r) {
  for (const auto& [q, s] : obligations(g, r))
    if (!includes(r[q], s)) return false;
  return true;
}

// Saturation over path schemes.  Round L admits schemes with at most L
// edges and at most L accelerated cycles.  A piece is extended by one more
// edge or one more cycle once its budget allows; pieces the relation at
// their state provably covers are dropped.  The stability certificate is
// checked after each round, since cheap inclusion tests can miss that the
// remaining pieces are covered.
ReachSolution reach_relations(const ActionGraph& g, const AccelCaps& caps) {
  for (const auto& e : g.edges) {
    validate(e.action);
    if (e.src < 0 || e.src >= g.states || e.dst < 0 || e.dst >= g.states)
      throw std::invalid_argument("vas2: edge endpoint out of range");
  }
  if (g.source < 0 || g.source >= g.states) throw std::invalid_argument("vas2: source out of range");
  const auto n = static_cast<std::size_t>(g.states);
  ReachSolution sol;
  sol.per_state.assign(n, SemilinearSet::empty(4));

  std::vector<std::vector<SemilinearSet>> accel(n);
  for (std::size_t q = 0; q < n; ++q) {
    std::set<std::vector<Action>> seen;  // parallel edges give equal cycles
    for (const auto& c : simple_cycles(g, static_cast<int>(q), caps.max_cycles))
      if (seen.insert(actions_of(g, c)).second) accel[q].push_back(cycle_plus(actions_of(g, c)));
  }

  struct Piece {
    int state;
    LinearSet rel;
    int last_cycle;  // -1: last extension was an edge
    int edges = 0, cycles = 0;
    bool edges_done = false, cycles_done = false;
  };
  std::vector<Piece> pieces;
  auto offer = [&](const Piece& from, int q, const SemilinearSet& s, int cyc) {
    auto& r = sol.per_state[static_cast<std::size_t>(q)];
    for (const auto& c : s.components) {
      if (try_includes(r, SemilinearSet::linear(c)) == std::optional<bool>(true)) continue;
      r.components.push_back(c);
      pieces.push_back({q, c, cyc, from.edges + (cyc < 0), from.cycles + (cyc >= 0)});
    }
  };
  offer(Piece{g.source, {}, -1, -1, 0}, g.source, SemilinearSet::identity(2), -1);

  const int limit = std::min(caps.max_rounds, caps.max_scheme_len);
  bool undecided = false;
  while (sol.rounds < limit) {
    const int budget = ++sol.rounds;
    for (bool progress = true; progress;) {
      progress = false;
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (!pieces[i].edges_done && pieces[i].edges < budget) {
          pieces[i].edges_done = progress = true;
          Piece p = pieces[i];
          SemilinearSet here = SemilinearSet::linear(p.rel);
          for (const auto& e : g.edges) {
            if (e.src != p.state) continue;
            ++sol.schemes_used;
            offer(p, e.dst, step_image(here, e.action), -1);
          }
        }
        if (!pieces[i].cycles_done && pieces[i].cycles < budget) {
          pieces[i].cycles_done = progress = true;
          Piece p = pieces[i];
          SemilinearSet here = SemilinearSet::linear(p.rel);
          const auto q = static_cast<std::size_t>(p.state);
          for (std::size_t c = 0; c < accel[q].size(); ++c) {
            if (static_cast<int>(c) == p.last_cycle) continue;
            ++sol.schemes_used;
            offer(p, p.state, compose(here, accel[q][c]), static_cast<int>(c));
          }
        }
      }
    }
    for (auto& r : sol.per_state) r = prune(r);
    auto cert = certify(g, sol.per_state, {caps.max_atoms});
    undecided = !cert;
    if (cert == std::optional<bool>(true)) {
      sol.stable = true;
      return sol;
    }
  }
  sol.diagnostics = "acceleration cap " + std::to_string(limit) + " exhausted";
  if (undecided) sol.diagnostics += " (stability check exceeded the Presburger limits)";
  sol.diagnostics += "; increase --accel-cap";
  return sol;
}

}  // namespace gvas::vas2
