#include "gvas/semilinear.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <unordered_set>

#include "json.hpp"

namespace gvas {

namespace {

bool is_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](Int x) { return x == 0; });
}

bool leq(const Vec& a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

Vec add(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = checked_add(a[i], b[i]);
  return a;
}

Vec sub(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = checked_add(a[i], -b[i]);
  return a;
}

// Contejean-Devie completion for A x = 0 over N^n, with optional upper
// bounds on single variables (-1: none).
std::vector<Vec> completion(const Matrix& a, std::size_t n, const Vec& upper, const HilbertCaps& caps) {
  const std::size_t m = a.size();
  auto image = [&](const Vec& x) {
    Vec r(m, 0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (x[j]) r[i] = checked_add(r[i], checked_mul(a[i][j], x[j]));
    return r;
  };
  std::vector<Vec> cols(n, Vec(m, 0));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) cols[j][i] = a[i][j];

  std::vector<Vec> basis;
  std::set<Vec> frontier;
  for (std::size_t j = 0; j < n; ++j) {
    if (upper[j] == 0) continue;
    Vec e(n, 0);
    e[j] = 1;
    frontier.insert(e);
  }
  while (!frontier.empty()) {
    std::vector<std::pair<Vec, Vec>> open;  // (x, A x)
    for (const auto& x : frontier) {
      Vec ax = image(x);
      if (is_zero(ax)) basis.push_back(x);
      else open.emplace_back(x, std::move(ax));
    }
    std::set<Vec> next;
    for (const auto& [x, ax] : open) {
      for (std::size_t j = 0; j < n; ++j) {
        if (upper[j] >= 0 && x[j] >= upper[j]) continue;
        Int dot = 0;
        for (std::size_t i = 0; i < m; ++i) dot = checked_add(dot, checked_mul(ax[i], cols[j][i]));
        if (dot >= 0) continue;
        Vec y = x;
        ++y[j];
        bool dominated = std::any_of(basis.begin(), basis.end(), [&](const Vec& b) { return leq(b, y); });
        if (!dominated) next.insert(std::move(y));
      }
      if (next.size() > caps.max_frontier)
        throw SemilinearExplosion("hilbert basis: frontier exceeds " + std::to_string(caps.max_frontier));
    }
    frontier = std::move(next);
  }
  return basis;
}

// Rewrites A x rel b as homogeneous equalities over (x, slack..., t).
struct Homogenized {
  Matrix a;
  std::size_t n = 0;
  std::size_t slack = 0;
};

Homogenized homogenize(const Matrix& a, const std::vector<Rel>& rel, const Vec* b, std::size_t nvars) {
  Homogenized h;
  h.slack = static_cast<std::size_t>(std::count(rel.begin(), rel.end(), Rel::Ge));
  h.n = nvars + h.slack + (b ? 1 : 0);
  std::size_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Vec row(h.n, 0);
    for (std::size_t j = 0; j < nvars; ++j) row[j] = a[i][j];
    if (rel[i] == Rel::Ge) row[nvars + s++] = -1;
    if (b) row[h.n - 1] = -(*b)[i];
    h.a.push_back(std::move(row));
  }
  return h;
}

std::size_t width(const Matrix& a, std::size_t fallback) { return a.empty() ? fallback : a.front().size(); }

}  // namespace

std::vector<Vec> hilbert_basis(const Matrix& a, const std::vector<Rel>& rel, const HilbertCaps& caps) {
  if (a.empty()) throw std::invalid_argument("hilbert_basis: empty system (dimension unknown)");
  std::size_t n = a.front().size();
  auto h = homogenize(a, rel, nullptr, n);
  auto raw = completion(h.a, h.n, Vec(h.n, -1), caps);
  std::set<Vec> out;
  for (auto& v : raw) {
    v.resize(n);
    if (!is_zero(v)) out.insert(v);
  }
  return {out.begin(), out.end()};
}

LinSolution lin_solve(const Matrix& a, const std::vector<Rel>& rel, const Vec& b, const HilbertCaps& caps) {
  std::size_t n = width(a, 0);
  LinSolution sol;
  if (a.empty()) {
    throw std::invalid_argument("lin_solve: empty system (dimension unknown)");
  }
  auto h = homogenize(a, rel, &b, n);
  Vec upper(h.n, -1);
  upper[h.n - 1] = 1;
  auto raw = completion(h.a, h.n, upper, caps);
  std::set<Vec> part, hom;
  for (auto& v : raw) {
    bool particular = v[h.n - 1] == 1;
    v.resize(n);
    if (particular) part.insert(v);
    else if (!is_zero(v)) hom.insert(v);
  }
  sol.particulars.assign(part.begin(), part.end());
  sol.homogeneous.assign(hom.begin(), hom.end());
  return sol;
}

SemilinearSet SemilinearSet::universe(std::size_t dim) {
  LinearSet l{Vec(dim, 0), {}};
  for (std::size_t i = 0; i < dim; ++i) {
    Vec e(dim, 0);
    e[i] = 1;
    l.periods.push_back(e);
  }
  return linear(std::move(l));
}

SemilinearSet SemilinearSet::identity(std::size_t k) {
  LinearSet l{Vec(2 * k, 0), {}};
  for (std::size_t i = 0; i < k; ++i) {
    Vec e(2 * k, 0);
    e[i] = e[k + i] = 1;
    l.periods.push_back(e);
  }
  return linear(std::move(l));
}

// ---- membership ------------------------------------------------------------

namespace {

struct SpanKey {
  std::uint64_t mask;
  Vec rest;
  bool operator==(const SpanKey&) const = default;
};

struct SpanKeyHash {
  std::size_t operator()(const SpanKey& k) const {
    std::size_t h = std::hash<std::uint64_t>{}(k.mask);
    for (Int x : k.rest) h = h * 1000003u ^ std::hash<Int>{}(x);
    return h;
  }
};

// target as a natural combination of periods (all natural vectors).  A
// coordinate touched by a single remaining period forces its multiplicity;
// otherwise the period with the fewest choices is branched on.
bool in_span(const std::vector<Vec>& periods, const Vec& target) {
  if (is_zero(target)) return true;
  const std::size_t np = periods.size();
  if (np > 64) throw std::invalid_argument("in_span: too many periods");
  std::unordered_set<SpanKey, SpanKeyHash> dead;
  auto go = [&](auto&& self, std::uint64_t mask, const Vec& r) -> bool {
    if (is_zero(r)) return true;
    if (!mask) return false;
    SpanKey key{mask, r};
    if (dead.count(key)) return false;
    std::size_t pick = np;
    Int pick_choices = std::numeric_limits<Int>::max();
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i] == 0) continue;
      std::size_t touching = 0, last = np;
      for (std::size_t j = 0; j < np; ++j)
        if ((mask >> j & 1u) && periods[j][i] > 0) ++touching, last = j;
      if (touching == 0) {
        dead.insert(std::move(key));
        return false;
      }
      if (touching == 1) {
        const Vec& p = periods[last];
        if (r[i] % p[i]) {
          dead.insert(std::move(key));
          return false;
        }
        Int k = r[i] / p[i];
        Vec next = r;
        bool ok = true;
        for (std::size_t t = 0; t < r.size() && ok; ++t) {
          next[t] -= k * p[t];
          ok = next[t] >= 0;
        }
        bool res = ok && self(self, mask & ~(std::uint64_t{1} << last), next);
        if (!res) dead.insert(std::move(key));
        return res;
      }
    }
    for (std::size_t j = 0; j < np; ++j) {
      if (!(mask >> j & 1u)) continue;
      Int most = std::numeric_limits<Int>::max();
      bool zero = true;
      for (std::size_t t = 0; t < r.size(); ++t)
        if (periods[j][t] > 0) most = std::min(most, r[t] / periods[j][t]), zero = false;
      if (zero) most = 0;
      if (most < pick_choices) pick_choices = most, pick = j;
    }
    const Vec& p = periods[pick];
    const std::uint64_t rest = mask & ~(std::uint64_t{1} << pick);
    Vec cur = r;
    for (Int k = 0; k <= pick_choices; ++k) {
      if (self(self, rest, cur)) return true;
      for (std::size_t t = 0; t < cur.size(); ++t) cur[t] -= p[t];
    }
    dead.insert(std::move(key));
    return false;
  };
  std::uint64_t all = np == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << np) - 1;
  return go(go, all, target);
}

}  // namespace

bool member(const LinearSet& l, const Vec& v) {
  if (!leq(l.base, v)) return false;
  return in_span(l.periods, sub(v, l.base));
}

bool member(const SemilinearSet& s, const Vec& v) {
  if (v.size() != s.dim) throw std::invalid_argument("member: dimension mismatch");
  return std::any_of(s.components.begin(), s.components.end(), [&](const LinearSet& l) { return member(l, v); });
}

bool is_empty(const SemilinearSet& s) { return s.components.empty(); }

// ---- simplification --------------------------------------------------------

namespace {

LinearSet tidy(LinearSet l) {
  std::set<Vec> ps;
  for (auto& p : l.periods)
    if (!is_zero(p)) ps.insert(p);
  std::vector<Vec> periods(ps.begin(), ps.end());
  // Drop periods generated by the others (largest first).
  std::sort(periods.begin(), periods.end(), [](const Vec& a, const Vec& b) {
    Int sa = std::accumulate(a.begin(), a.end(), Int{0}), sb = std::accumulate(b.begin(), b.end(), Int{0});
    return sa != sb ? sa > sb : a > b;
  });
  for (std::size_t i = 0; i < periods.size();) {
    std::vector<Vec> others;
    for (std::size_t j = 0; j < periods.size(); ++j)
      if (j != i) others.push_back(periods[j]);
    if (in_span(others, periods[i])) periods.erase(periods.begin() + static_cast<std::ptrdiff_t>(i));
    else ++i;
  }
  std::sort(periods.begin(), periods.end());
  l.periods = std::move(periods);
  return l;
}

// Syntactic inclusion: base and every period fit inside outer.
bool contains_syntactically(const LinearSet& outer, const LinearSet& inner) {
  if (!member(outer, inner.base)) return false;
  return std::all_of(inner.periods.begin(), inner.periods.end(),
                     [&](const Vec& p) { return in_span(outer.periods, p); });
}

// a + span(P) and (a + p) + span(P u {p}) merge into a + span(P u {p}).
bool try_merge(LinearSet& a, const LinearSet& b) {
  if (!leq(a.base, b.base)) return false;
  Vec p = sub(b.base, a.base);
  if (is_zero(p)) return false;
  std::set<Vec> pa(a.periods.begin(), a.periods.end()), pb(b.periods.begin(), b.periods.end());
  if (!pb.count(p)) return false;
  for (const auto& q : pa)
    if (!pb.count(q)) return false;
  for (const auto& q : pb)
    if (!pa.count(q) && q != p) return false;
  a.periods.assign(pb.begin(), pb.end());
  return true;
}

}  // namespace

SemilinearSet simplify(const SemilinearSet& s) {
  std::vector<LinearSet> comps;
  for (const auto& c : s.components) comps.push_back(tidy(c));
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < comps.size() && !changed; ++i)
      for (std::size_t j = 0; j < comps.size() && !changed; ++j) {
        if (i == j) continue;
        if (contains_syntactically(comps[i], comps[j])) {
          comps.erase(comps.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
        } else if (try_merge(comps[i], comps[j])) {
          comps[i] = tidy(comps[i]);
          comps.erase(comps.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
        }
      }
  }
  return {s.dim, std::move(comps)};
}

// ---- algebra ---------------------------------------------------------------

SemilinearSet unite(const SemilinearSet& s1, const SemilinearSet& s2) {
  if (s1.dim != s2.dim) throw std::invalid_argument("unite: dimension mismatch");
  SemilinearSet r = s1;
  r.components.insert(r.components.end(), s2.components.begin(), s2.components.end());
  return simplify(r);
}

SemilinearSet join(const SemilinearSet& s1, const SemilinearSet& s2, const JoinSpec& spec) {
  const std::size_t out_dim = spec.keep.size();
  SemilinearSet out{out_dim, {}};
  auto emit = [&](const Vec& x1, const Vec& x2) {
    Vec r(out_dim);
    for (std::size_t k = 0; k < out_dim; ++k) r[k] = spec.keep[k].first == 0 ? x1[spec.keep[k].second] : x2[spec.keep[k].second];
    return r;
  };
  const Vec zero1(s1.dim, 0), zero2(s2.dim, 0);
  for (const auto& a : s1.components) {
    for (const auto& b : s2.components) {
      // Periods that leave the equated coordinates alone are free.
      std::vector<Vec> free_periods, pa, pb;
      for (const auto& p : a.periods) {
        bool touches = std::any_of(spec.equal.begin(), spec.equal.end(), [&](auto e) { return p[e.first] != 0; });
        if (touches) pa.push_back(p);
        else free_periods.push_back(emit(p, zero2));
      }
      for (const auto& q : b.periods) {
        bool touches = std::any_of(spec.equal.begin(), spec.equal.end(), [&](auto e) { return q[e.second] != 0; });
        if (touches) pb.push_back(q);
        else free_periods.push_back(emit(zero1, q));
      }
      const std::size_t nv = pa.size() + pb.size();
      auto realise = [&](const Vec& lam, bool with_base) {
        Vec x1 = with_base ? a.base : zero1, x2 = with_base ? b.base : zero2;
        for (std::size_t i = 0; i < pa.size(); ++i)
          if (lam[i])
            for (std::size_t k = 0; k < s1.dim; ++k) x1[k] = checked_add(x1[k], checked_mul(lam[i], pa[i][k]));
        for (std::size_t i = 0; i < pb.size(); ++i)
          if (lam[pa.size() + i])
            for (std::size_t k = 0; k < s2.dim; ++k)
              x2[k] = checked_add(x2[k], checked_mul(lam[pa.size() + i], pb[i][k]));
        return emit(x1, x2);
      };
      if (nv == 0 || spec.equal.empty()) {
        bool ok = std::all_of(spec.equal.begin(), spec.equal.end(),
                              [&](auto e) { return a.base[e.first] == b.base[e.second]; });
        if (!ok) continue;
        LinearSet l{realise(Vec(nv, 0), true), free_periods};
        for (std::size_t i = 0; i < nv; ++i) {
          Vec e(nv, 0);
          e[i] = 1;
          l.periods.push_back(realise(e, false));
        }
        out.components.push_back(std::move(l));
        continue;
      }
      Matrix m;
      Vec rhs;
      for (auto [i, j] : spec.equal) {
        Vec row(nv, 0);
        for (std::size_t k = 0; k < pa.size(); ++k) row[k] = pa[k][i];
        for (std::size_t k = 0; k < pb.size(); ++k) row[pa.size() + k] = -pb[k][j];
        m.push_back(std::move(row));
        rhs.push_back(b.base[j] - a.base[i]);
      }
      auto sol = lin_solve(m, std::vector<Rel>(m.size(), Rel::Eq), rhs);
      std::vector<Vec> periods = free_periods;
      for (const auto& h : sol.homogeneous) periods.push_back(realise(h, false));
      for (const auto& p : sol.particulars) out.components.push_back({realise(p, true), periods});
    }
  }
  return simplify(out);
}

SemilinearSet intersect(const SemilinearSet& s1, const SemilinearSet& s2) {
  if (s1.dim != s2.dim) throw std::invalid_argument("intersect: dimension mismatch");
  JoinSpec spec;
  for (std::size_t i = 0; i < s1.dim; ++i) {
    spec.equal.emplace_back(i, i);
    spec.keep.emplace_back(0, i);
  }
  return join(s1, s2, spec);
}

SemilinearSet compose(const SemilinearSet& r1, const SemilinearSet& r2) {
  if (r1.dim != r2.dim || r1.dim % 2) throw std::invalid_argument("compose: dimension mismatch");
  std::size_t k = r1.dim / 2;
  JoinSpec spec;
  for (std::size_t i = 0; i < k; ++i) spec.equal.emplace_back(k + i, i);
  for (std::size_t i = 0; i < k; ++i) spec.keep.emplace_back(0, i);
  for (std::size_t i = 0; i < k; ++i) spec.keep.emplace_back(1, k + i);
  return join(r1, r2, spec);
}

SemilinearSet project(const SemilinearSet& s, const std::vector<std::size_t>& dims) {
  SemilinearSet out{dims.size(), {}};
  auto pick = [&](const Vec& v) {
    Vec r;
    for (auto d : dims) r.push_back(v.at(d));
    return r;
  };
  for (const auto& c : s.components) {
    LinearSet l{pick(c.base), {}};
    for (const auto& p : c.periods) l.periods.push_back(pick(p));
    out.components.push_back(std::move(l));
  }
  return simplify(out);
}

namespace {

// Minimal multisets of periods lifting coordinate j of the base to >= need.
void lift_coordinate(const LinearSet& l, std::size_t j, Int need, std::vector<LinearSet>& out) {
  if (l.base[j] >= need) {
    out.push_back(l);
    return;
  }
  std::vector<std::size_t> useful;
  for (std::size_t i = 0; i < l.periods.size(); ++i)
    if (l.periods[i][j] > 0) useful.push_back(i);
  std::set<Vec> bases;
  auto go = [&](auto&& self, std::size_t from, const Vec& cur) -> void {
    if (cur[j] >= need) {
      bases.insert(cur);
      return;
    }
    for (std::size_t u = from; u < useful.size(); ++u) self(self, u, add(cur, l.periods[useful[u]]));
  };
  go(go, 0, l.base);
  for (const auto& b : bases) out.push_back({b, l.periods});
}

}  // namespace

SemilinearSet guard(const SemilinearSet& s, const Vec& lower) {
  if (lower.size() != s.dim) throw std::invalid_argument("guard: dimension mismatch");
  std::vector<LinearSet> cur = s.components;
  for (std::size_t j = 0; j < s.dim; ++j) {
    if (lower[j] <= 0) continue;
    std::vector<LinearSet> next;
    for (const auto& l : cur) lift_coordinate(l, j, lower[j], next);
    cur = std::move(next);
  }
  return simplify({s.dim, std::move(cur)});
}

SemilinearSet translate(const SemilinearSet& s, const Vec& v) {
  if (v.size() != s.dim) throw std::invalid_argument("translate: dimension mismatch");
  Vec lower(s.dim, 0);
  for (std::size_t j = 0; j < s.dim; ++j) lower[j] = v[j] < 0 ? -v[j] : 0;
  SemilinearSet g = guard(s, lower);
  for (auto& c : g.components) c.base = add(c.base, v);
  return simplify(g);
}

SemilinearSet product(const SemilinearSet& s1, const SemilinearSet& s2) {
  SemilinearSet out{s1.dim + s2.dim, {}};
  for (const auto& a : s1.components)
    for (const auto& b : s2.components) {
      LinearSet l;
      l.base = a.base;
      l.base.insert(l.base.end(), b.base.begin(), b.base.end());
      for (const auto& p : a.periods) {
        Vec q = p;
        q.resize(out.dim, 0);
        l.periods.push_back(q);
      }
      for (const auto& p : b.periods) {
        Vec q(s1.dim, 0);
        q.insert(q.end(), p.begin(), p.end());
        l.periods.push_back(q);
      }
      out.components.push_back(std::move(l));
    }
  return simplify(out);
}

// ---- inclusion -------------------------------------------------------------

pres::Formula to_formula(const SemilinearSet& s, const std::vector<int>& vars) {
  using namespace pres;
  std::vector<Formula> alts;
  for (const auto& c : s.components) {
    std::vector<int> mu;
    for (std::size_t i = 0; i < c.periods.size(); ++i) mu.push_back(fresh_var("mu"));
    std::vector<Formula> eqs;
    for (std::size_t k = 0; k < s.dim; ++k) {
      LinTerm rhs(static_cast<long long>(c.base[k]));
      for (std::size_t i = 0; i < c.periods.size(); ++i)
        if (c.periods[i][k]) rhs = rhs + LinTerm::var(mu[i], c.periods[i][k]);
      eqs.push_back(eq(LinTerm::var(vars[k]), rhs));
    }
    alts.push_back(exists_nat(mu, and_(std::move(eqs))));
  }
  return or_(std::move(alts));
}

namespace {

// Decides c subset outer by covering the multiplier space N^k of c with
// cones n + sum_j s_j N e_j (s_j = 0 fixes coordinate j), where the point of
// n lies in some component whose period monoid contains s_j times period j.
// With L the lcm of the steps, a point maps to its representative in
// [0, B + L)^k (coordinates >= B reduced modulo L); cones whose apexes stay
// below B on fixed coordinates and at most B on stepped ones cover N^k as
// soon as they cover that box.  nullopt once the box exceeds `max_points`.
constexpr Int kMaxConeBound = 24;

// False when a coordinate rules out any common point.
bool may_intersect(const LinearSet& a, const LinearSet& b) {
  for (std::size_t i = 0; i < a.base.size(); ++i) {
    bool fa = std::all_of(a.periods.begin(), a.periods.end(), [&](const Vec& p) { return p[i] == 0; });
    bool fb = std::all_of(b.periods.begin(), b.periods.end(), [&](const Vec& p) { return p[i] == 0; });
    if (fa && a.base[i] < b.base[i]) return false;
    if (fb && b.base[i] < a.base[i]) return false;
  }
  return true;
}

std::optional<bool> cone_cover(const SemilinearSet& outer, const LinearSet& c, std::size_t max_points) {
  const std::size_t k = c.periods.size();
  constexpr Int kSteps[] = {1, 2, 3, 4, 6};
  std::vector<std::vector<Int>> steps;  // per outer component
  for (const auto& o : outer.components) {
    std::vector<Int> st(k, 0);
    for (std::size_t j = 0; j < k; ++j)
      for (Int t : kSteps) {
        Vec v = c.periods[j];
        for (auto& e : v) e = checked_mul(e, t);
        if (in_span(o.periods, v)) {
          st[j] = t;
          break;
        }
      }
    steps.push_back(std::move(st));
  }
  auto rank = [&](const std::vector<Int>& st) {
    std::pair<int, Int> r{0, 0};
    for (Int t : st)
      if (t) ++r.first, r.second -= t;
    return r;
  };
  struct Cone {
    std::vector<Int> apex, step;
  };
  std::vector<Cone> cones;
  auto covered = [&](const std::vector<Int>& n) {
    for (const auto& cone : cones) {
      bool in = true;
      for (std::size_t j = 0; j < k && in; ++j)
        in = cone.step[j] ? n[j] >= cone.apex[j] && (n[j] - cone.apex[j]) % cone.step[j] == 0
                          : n[j] == cone.apex[j];
      if (in) return true;
    }
    return false;
  };
  Int bound = 1, period = 1;
  for (;;) {
    const Int width = bound + period;
    // Cones along a slanted boundary never close; leave those to the caller.
    if (bound > kMaxConeBound ||
        std::pow(static_cast<double>(width), static_cast<double>(k)) > static_cast<double>(max_points))
      return std::nullopt;
    bool restart = false;
    std::vector<Int> n(k, 0);
    while (!restart) {
      if (!covered(n)) {
        Vec x = c.base;
        for (std::size_t j = 0; j < k; ++j)
          for (std::size_t i = 0; i < x.size() && n[j]; ++i)
            x[i] = checked_add(x[i], checked_mul(c.periods[j][i], n[j]));
        int best = -1;
        for (std::size_t i = 0; i < outer.components.size(); ++i)
          if ((best < 0 || rank(steps[i]) > rank(steps[static_cast<std::size_t>(best)])) &&
              member(outer.components[i], x))
            best = static_cast<int>(i);
        if (best < 0) return false;
        cones.push_back({n, steps[static_cast<std::size_t>(best)]});
        for (Int t : cones.back().step)
          if (t && period % t) period = std::lcm(period, t), restart = true;
      }
      std::size_t j = 0;
      while (j < k && n[j] == width - 1) n[j++] = 0;
      if (j == k) break;
      ++n[j];
    }
    if (restart) continue;
    Int need = bound;
    for (const auto& cone : cones)
      for (std::size_t j = 0; j < k; ++j)
        need = std::max(need, cone.step[j] ? cone.apex[j] : cone.apex[j] + 1);
    if (need == bound) return true;
    bound = need;
  }
}

}  // namespace

namespace {

// One component against outer.  Without `lim` only the cheap methods run and
// nullopt means undecided.
std::optional<bool> component_included(const SemilinearSet& outer, const LinearSet& c0, const pres::Limits* lim) {
  if (std::any_of(outer.components.begin(), outer.components.end(),
                  [&](const LinearSet& o) { return contains_syntactically(o, c0); }))
    return true;
  // Periods every outer component absorbs can be dropped: outer is closed
  // under adding them.
  LinearSet c{c0.base, {}};
  for (const auto& p : c0.periods)
    if (outer.components.empty() || !std::all_of(outer.components.begin(), outer.components.end(),
                                                   [&](const LinearSet& o) { return in_span(o.periods, p); }))
      c.periods.push_back(p);
  // Cheap refutation on small combinations.
  bool refuted = false;
  const std::size_t np = c.periods.size();
  auto probe = [&](auto&& self, std::size_t i, Vec cur, int budget) -> void {
    if (refuted) return;
    if (i == np) {
      if (!member(outer, cur)) refuted = true;
      return;
    }
    for (int k = 0; k <= budget && !refuted; ++k) {
      self(self, i + 1, cur, budget - k);
      cur = add(cur, c.periods[i]);
    }
  };
  probe(probe, 0, c.base, np <= 4 ? 3 : 2);
  if (refuted) return false;
  if (auto r = cone_cover(outer, c, 200'000)) return r;
  if (!lim) return std::nullopt;
  // Decide c subset outer exactly, over the components that can meet c.
  SemilinearSet near{outer.dim, {}};
  for (const auto& o : outer.components)
    if (may_intersect(o, c)) near.components.push_back(o);
  using namespace pres;
  std::vector<int> lam, xs;
  for (std::size_t i = 0; i < np; ++i) lam.push_back(fresh_var("lam"));
  for (std::size_t k = 0; k < outer.dim; ++k) xs.push_back(fresh_var("x"));
  Formula in_outer = to_formula(near, xs);
  for (std::size_t k = 0; k < outer.dim; ++k) {
    LinTerm v(static_cast<long long>(c.base[k]));
    for (std::size_t i = 0; i < np; ++i)
      if (c.periods[i][k]) v = v + LinTerm::var(lam[i], c.periods[i][k]);
    in_outer = substitute(in_outer, xs[k], v);
  }
  return is_valid(forall_nat(lam, in_outer), *lim);
}

}  // namespace

bool includes(const SemilinearSet& outer, const SemilinearSet& inner, const pres::Limits& lim) {
  if (outer.dim != inner.dim) throw std::invalid_argument("includes: dimension mismatch");
  for (const auto& c : inner.components)
    if (!*component_included(outer, c, &lim)) return false;
  return true;
}

std::optional<bool> try_includes(const SemilinearSet& outer, const SemilinearSet& inner) {
  if (outer.dim != inner.dim) throw std::invalid_argument("try_includes: dimension mismatch");
  bool all = true;
  for (const auto& c : inner.components) {
    auto r = component_included(outer, c, nullptr);
    if (r && !*r) return false;
    if (!r) all = false;
  }
  if (all) return true;
  return std::nullopt;
}

// ---- queries ---------------------------------------------------------------

ExtValue max_second_given_first_leq(const SemilinearSet& r, Int n) {
  if (r.dim != 2) throw std::invalid_argument("max_second_given_first_leq: relation must have dimension 2");
  ExtValue best = ExtValue::neg_inf();
  for (const auto& c : r.components) {
    if (c.base[0] > n) continue;
    std::vector<Vec> items;
    for (const auto& p : c.periods) {
      if (p[0] == 0 && p[1] > 0) return ExtValue::pos_inf();
      if (p[0] > 0 && p[1] > 0) items.push_back(p);
    }
    const Int budget = n - c.base[0];
    Int value = 0;
    if (!items.empty()) {
      // Unbounded knapsack.  Some optimum uses fewer than w* items other
      // than the best-ratio item (w*, v*), so a table up to w* * max weight
      // plus whole copies of the best item is exact.
      const Vec* star = &items.front();
      Int maxw = 0;
      for (const auto& p : items) {
        maxw = std::max(maxw, p[0]);
        // p2/p1 > s2/s1, ties by lighter weight
        __int128 lhs = static_cast<__int128>(p[1]) * (*star)[0], rhs = static_cast<__int128>((*star)[1]) * p[0];
        if (lhs > rhs || (lhs == rhs && p[0] < (*star)[0])) star = &p;
      }
      const Int ws = (*star)[0], vs = (*star)[1];
      const Int limit = std::min(budget, checked_add(checked_mul(ws, maxw), ws));
      std::vector<Int> dp(static_cast<std::size_t>(limit) + 1, 0);
      for (Int t = 1; t <= limit; ++t) {
        Int b = dp[static_cast<std::size_t>(t - 1)];
        for (const auto& p : items)
          if (p[0] <= t) b = std::max(b, checked_add(dp[static_cast<std::size_t>(t - p[0])], p[1]));
        dp[static_cast<std::size_t>(t)] = b;
      }
      for (Int t = 0; t <= limit; ++t)
        value = std::max(value, checked_add(dp[static_cast<std::size_t>(t)], checked_mul((budget - t) / ws, vs)));
    }
    best = max(best, ExtValue(checked_add(c.base[1], value)));
  }
  return best;
}

std::vector<Vec> points_in_box(const SemilinearSet& s, Int bound) {
  std::set<Vec> out;
  for (const auto& c : s.components) {
    auto fits = [&](const Vec& v) { return std::all_of(v.begin(), v.end(), [&](Int x) { return x <= bound; }); };
    if (!fits(c.base)) continue;
    auto go = [&](auto&& self, std::size_t i, const Vec& cur) -> void {
      if (i == c.periods.size()) {
        out.insert(cur);
        return;
      }
      Vec v = cur;
      while (fits(v)) {
        self(self, i + 1, v);
        if (is_zero(c.periods[i])) break;
        v = add(v, c.periods[i]);
      }
    };
    go(go, 0, c.base);
  }
  return {out.begin(), out.end()};
}

// ---- JSON ------------------------------------------------------------------

std::string to_json(const SemilinearSet& s) {
  nlohmann::json j;
  j["dim"] = s.dim;
  j["components"] = nlohmann::json::array();
  for (const auto& c : s.components) j["components"].push_back({{"base", c.base}, {"periods", c.periods}});
  return j.dump();
}

SemilinearSet semilinear_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  SemilinearSet s;
  s.dim = j.at("dim").get<std::size_t>();
  for (const auto& c : j.at("components")) {
    LinearSet l{c.at("base").get<Vec>(), c.at("periods").get<std::vector<Vec>>()};
    if (l.base.size() != s.dim) throw std::invalid_argument("semilinear json: base of wrong dimension");
    for (const auto& p : l.periods)
      if (p.size() != s.dim) throw std::invalid_argument("semilinear json: period of wrong dimension");
    for (Int x : l.base)
      if (x < 0) throw std::invalid_argument("semilinear json: negative coordinate");
    for (const auto& p : l.periods)
      for (Int x : p)
        if (x < 0) throw std::invalid_argument("semilinear json: negative coordinate");
    s.components.push_back(std::move(l));
  }
  return s;
}

}  // namespace gvas
