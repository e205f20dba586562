#include "gvas/presburger.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

namespace gvas::pres {

namespace {

std::atomic<int> next_var{0};
std::mutex names_mu;
std::unordered_map<int, std::string>& names() {
  static std::unordered_map<int, std::string> m;
  return m;
}

BigInt babs(const BigInt& a) { return a < 0 ? BigInt(-a) : a; }

BigInt gcd(BigInt a, BigInt b) {
  a = babs(a);
  b = babs(b);
  while (b != 0) {
    BigInt r = a % b;
    a = b;
    b = r;
  }
  return a;
}

BigInt lcm(const BigInt& a, const BigInt& b) { return babs(a) / gcd(a, b) * babs(b); }

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

BigInt mod_pos(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

using K = FormulaNode::Kind;
using AK = Atom::Kind;

Formula make(FormulaNode n) { return Formula(std::make_shared<const FormulaNode>(std::move(n))); }

}  // namespace

int fresh_var(const std::string& name) {
  int v = next_var++;
  if (!name.empty()) {
    std::lock_guard<std::mutex> lock(names_mu);
    names()[v] = name;
  }
  return v;
}

std::string var_name(int v) {
  std::lock_guard<std::mutex> lock(names_mu);
  auto it = names().find(v);
  return it == names().end() ? "v" + std::to_string(v) : it->second + "#" + std::to_string(v);
}

// ---- LinTerm ---------------------------------------------------------------

LinTerm LinTerm::var(int v, const BigInt& coeff) {
  LinTerm t;
  if (coeff != 0) t.coeffs[v] = coeff;
  return t;
}

BigInt LinTerm::coeff(int v) const {
  auto it = coeffs.find(v);
  return it == coeffs.end() ? BigInt(0) : it->second;
}

LinTerm LinTerm::substitute(int v, const LinTerm& by) const {
  auto it = coeffs.find(v);
  if (it == coeffs.end()) return *this;
  BigInt c = it->second;
  LinTerm rest = *this;
  rest.coeffs.erase(v);
  return rest + c * by;
}

LinTerm operator+(LinTerm a, const LinTerm& b) {
  for (const auto& [v, c] : b.coeffs) {
    BigInt& slot = a.coeffs[v];
    slot += c;
    if (slot == 0) a.coeffs.erase(v);
  }
  a.constant += b.constant;
  return a;
}

LinTerm operator-(LinTerm a) {
  for (auto& [v, c] : a.coeffs) c = -c;
  a.constant = -a.constant;
  return a;
}

LinTerm operator-(LinTerm a, const LinTerm& b) { return std::move(a) + (-b); }

LinTerm operator*(const BigInt& k, LinTerm a) {
  if (k == 0) return LinTerm{};
  for (auto& [v, c] : a.coeffs) c *= k;
  a.constant *= k;
  return a;
}

bool operator<(const LinTerm& a, const LinTerm& b) {
  if (a.coeffs != b.coeffs) return a.coeffs < b.coeffs;
  return a.constant < b.constant;
}

bool operator<(const Atom& a, const Atom& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.m != b.m) return a.m < b.m;
  return a.t < b.t;
}

std::string to_string(const LinTerm& t) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, c] : t.coeffs) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    BigInt a = babs(c);
    if (a != 1) os << a << "*";
    os << var_name(v);
  }
  if (first) {
    os << t.constant;
  } else if (t.constant != 0) {
    os << (t.constant < 0 ? " - " : " + ") << babs(t.constant);
  }
  return os.str();
}

// ---- construction ----------------------------------------------------------

Formula::Formula() : n_(std::make_shared<const FormulaNode>()) {}

Formula truth(bool b) {
  static const Formula t = make(FormulaNode{K::True, {}, {}, {}});
  static const Formula f = make(FormulaNode{K::False, {}, {}, {}});
  return b ? t : f;
}

Formula atom(Atom a) {
  LinTerm& t = a.t;
  switch (a.kind) {
    case AK::Le: {
      if (t.is_constant()) return truth(t.constant <= 0);
      BigInt g = 0;
      for (const auto& [v, c] : t.coeffs) g = gcd(g, c);
      if (g != 1) {
        for (auto& [v, c] : t.coeffs) c /= g;
        t.constant = -floor_div(-t.constant, g);  // ceil
      }
      break;
    }
    case AK::Eq:
    case AK::Ne: {
      bool eq = a.kind == AK::Eq;
      if (t.is_constant()) return truth((t.constant == 0) == eq);
      BigInt g = 0;
      for (const auto& [v, c] : t.coeffs) g = gcd(g, c);
      if (t.constant % g != 0) return truth(!eq);
      if (t.coeffs.begin()->second < 0) g = -g;
      if (g != 1) {
        for (auto& [v, c] : t.coeffs) c /= g;
        t.constant /= g;
      }
      break;
    }
    case AK::Dvd:
    case AK::NDvd: {
      bool pos = a.kind == AK::Dvd;
      a.m = babs(a.m);
      if (a.m == 0) throw std::invalid_argument("divisibility by zero");
      if (a.m == 1) return truth(pos);
      for (auto it = t.coeffs.begin(); it != t.coeffs.end();) {
        it->second = mod_pos(it->second, a.m);
        if (it->second == 0) it = t.coeffs.erase(it);
        else ++it;
      }
      t.constant = mod_pos(t.constant, a.m);
      if (t.is_constant()) return truth((t.constant == 0) == pos);
      BigInt g = a.m;
      for (const auto& [v, c] : t.coeffs) g = gcd(g, c);
      if (t.constant % g != 0) return truth(!pos);
      if (g != 1) {
        a.m /= g;
        for (auto& [v, c] : t.coeffs) c /= g;
        t.constant /= g;
        if (a.m == 1) return truth(pos);
      }
      break;
    }
  }
  return make(FormulaNode{K::Atom, std::move(a), {}, {}});
}

Formula le(const LinTerm& a, const LinTerm& b) { return atom({AK::Le, a - b, 0}); }
Formula lt(const LinTerm& a, const LinTerm& b) { return atom({AK::Le, a - b + LinTerm(1), 0}); }
Formula ge(const LinTerm& a, const LinTerm& b) { return le(b, a); }
Formula gt(const LinTerm& a, const LinTerm& b) { return lt(b, a); }
Formula eq(const LinTerm& a, const LinTerm& b) { return atom({AK::Eq, a - b, 0}); }
Formula ne(const LinTerm& a, const LinTerm& b) { return atom({AK::Ne, a - b, 0}); }
Formula dvd(const BigInt& m, const LinTerm& t) { return atom({AK::Dvd, t, m}); }
Formula mod_eq(const LinTerm& a, const LinTerm& b, const BigInt& m) { return dvd(m, a - b); }

namespace {

Formula junction(K kind, std::vector<Formula> fs) {
  const K unit = kind == K::And ? K::True : K::False;
  const K zero = kind == K::And ? K::False : K::True;
  std::vector<Formula> out;
  std::set<Atom> seen;
  auto add = [&](const Formula& f, auto&& self) -> bool {
    if (f.kind() == unit) return true;
    if (f.kind() == zero) return false;
    if (f.kind() == kind) {
      for (const auto& k : f.node().kids)
        if (!self(k, self)) return false;
      return true;
    }
    if (f.kind() == K::Atom && !seen.insert(f.node().atom).second) return true;
    out.push_back(f);
    return true;
  };
  for (const auto& f : fs)
    if (!add(f, add)) return truth(zero == K::True);
  if (out.empty()) return truth(unit == K::True);
  if (out.size() == 1) return out.front();
  return make(FormulaNode{kind, {}, std::move(out), {}});
}

Atom negate_atom(const Atom& a) {
  switch (a.kind) {
    case AK::Le: return {AK::Le, -a.t + LinTerm(1), 0};
    case AK::Eq: return {AK::Ne, a.t, 0};
    case AK::Ne: return {AK::Eq, a.t, 0};
    case AK::Dvd: return {AK::NDvd, a.t, a.m};
    case AK::NDvd: return {AK::Dvd, a.t, a.m};
  }
  return a;
}

}  // namespace

Formula and_(std::vector<Formula> fs) { return junction(K::And, std::move(fs)); }
Formula or_(std::vector<Formula> fs) { return junction(K::Or, std::move(fs)); }
Formula and_(const Formula& a, const Formula& b) { return and_(std::vector<Formula>{a, b}); }
Formula or_(const Formula& a, const Formula& b) { return or_(std::vector<Formula>{a, b}); }

Formula not_(const Formula& f) {
  const auto& n = f.node();
  switch (n.kind) {
    case K::True: return truth(false);
    case K::False: return truth(true);
    case K::Atom: return atom(negate_atom(n.atom));
    case K::And:
    case K::Or: {
      std::vector<Formula> kids;
      for (const auto& k : n.kids) kids.push_back(not_(k));
      return n.kind == K::And ? or_(std::move(kids)) : and_(std::move(kids));
    }
    case K::Exists: return forall(n.vars, not_(n.kids[0]));
    case K::Forall: return exists(n.vars, not_(n.kids[0]));
  }
  return f;
}

Formula implies(const Formula& a, const Formula& b) { return or_(not_(a), b); }

Formula exists(std::vector<int> vars, const Formula& body) {
  if (vars.empty() || body.is_true() || body.is_false()) return body;
  return make(FormulaNode{K::Exists, {}, {body}, std::move(vars)});
}

Formula forall(std::vector<int> vars, const Formula& body) {
  if (vars.empty() || body.is_true() || body.is_false()) return body;
  return make(FormulaNode{K::Forall, {}, {body}, std::move(vars)});
}

Formula exists_nat(const std::vector<int>& vars, const Formula& body) {
  std::vector<Formula> parts;
  for (int v : vars) parts.push_back(ge(LinTerm::var(v), 0));
  parts.push_back(body);
  return exists(vars, and_(std::move(parts)));
}

Formula forall_nat(const std::vector<int>& vars, const Formula& body) {
  std::vector<Formula> parts;
  for (int v : vars) parts.push_back(lt(LinTerm::var(v), 0));
  parts.push_back(body);
  return forall(vars, or_(std::move(parts)));
}

// ---- inspection ------------------------------------------------------------

std::string to_string(const Formula& f) {
  const auto& n = f.node();
  switch (n.kind) {
    case K::True: return "true";
    case K::False: return "false";
    case K::Atom: {
      const auto& a = n.atom;
      std::string t = to_string(a.t);
      switch (a.kind) {
        case AK::Le: return t + " <= 0";
        case AK::Eq: return t + " = 0";
        case AK::Ne: return t + " != 0";
        case AK::Dvd: return a.m.str() + " | " + t;
        case AK::NDvd: return "!(" + a.m.str() + " | " + t + ")";
      }
      return t;
    }
    case K::And:
    case K::Or: {
      std::string out = "(";
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (i) out += n.kind == K::And ? " & " : " | ";
        out += to_string(n.kids[i]);
      }
      return out + ")";
    }
    case K::Exists:
    case K::Forall: {
      std::string out = n.kind == K::Exists ? "E" : "A";
      for (int v : n.vars) out += " " + var_name(v);
      return out + ". " + to_string(n.kids[0]);
    }
  }
  return "?";
}

namespace {

void collect_free(const Formula& f, std::set<int>& bound, std::set<int>& out) {
  const auto& n = f.node();
  switch (n.kind) {
    case K::True:
    case K::False: return;
    case K::Atom:
      for (const auto& [v, c] : n.atom.t.coeffs)
        if (!bound.count(v)) out.insert(v);
      return;
    case K::And:
    case K::Or:
      for (const auto& k : n.kids) collect_free(k, bound, out);
      return;
    case K::Exists:
    case K::Forall: {
      std::set<int> inner = bound;
      inner.insert(n.vars.begin(), n.vars.end());
      collect_free(n.kids[0], inner, out);
      return;
    }
  }
}

bool mentions(const Formula& f, int v) {
  const auto& n = f.node();
  switch (n.kind) {
    case K::Atom: return n.atom.t.coeffs.count(v) > 0;
    case K::And:
    case K::Or:
    case K::Exists:
    case K::Forall:
      return std::any_of(n.kids.begin(), n.kids.end(), [&](const Formula& k) { return mentions(k, v); });
    default: return false;
  }
}

template <class Fn>
void for_each_atom(const Formula& f, Fn&& fn) {
  const auto& n = f.node();
  if (n.kind == K::Atom) fn(n.atom);
  for (const auto& k : n.kids) for_each_atom(k, fn);
}

// Rebuilds f with every atom mapped through fn (which returns a formula).
template <class Fn>
Formula map_atoms(const Formula& f, Fn&& fn) {
  const auto& n = f.node();
  switch (n.kind) {
    case K::True:
    case K::False: return f;
    case K::Atom: return fn(n.atom);
    case K::And:
    case K::Or: {
      std::vector<Formula> kids;
      kids.reserve(n.kids.size());
      for (const auto& k : n.kids) kids.push_back(map_atoms(k, fn));
      return n.kind == K::And ? and_(std::move(kids)) : or_(std::move(kids));
    }
    case K::Exists: return exists(n.vars, map_atoms(n.kids[0], fn));
    case K::Forall: return forall(n.vars, map_atoms(n.kids[0], fn));
  }
  return f;
}

}  // namespace

std::vector<int> free_vars(const Formula& f) {
  std::set<int> bound, out;
  collect_free(f, bound, out);
  return {out.begin(), out.end()};
}

std::size_t atom_count(const Formula& f) {
  std::size_t n = 0;
  for_each_atom(f, [&](const Atom&) { ++n; });
  return n;
}

Formula substitute(const Formula& f, int v, const LinTerm& by) {
  const auto& n = f.node();
  if ((n.kind == K::Exists || n.kind == K::Forall) &&
      std::find(n.vars.begin(), n.vars.end(), v) != n.vars.end())
    return f;  // shadowed
  if (n.kind == K::Exists) return exists(n.vars, substitute(n.kids[0], v, by));
  if (n.kind == K::Forall) return forall(n.vars, substitute(n.kids[0], v, by));
  return map_atoms(f, [&](const Atom& a) {
    if (!a.t.coeffs.count(v)) return atom(a);
    return atom(Atom{a.kind, a.t.substitute(v, by), a.m});
  });
}

// ---- Cooper ----------------------------------------------------------------

namespace {

struct Cooper {
  const Limits& lim;

  void check(const Formula& f) const {
    if (atom_count(f) > lim.max_atoms)
      throw PresburgerResourceExceeded("presburger: more than " + std::to_string(lim.max_atoms) + " atoms");
  }

  // The value e with x = e (resp. x != e), for an atom whose x coefficient is +-1.
  static LinTerm solve_for(int x, const LinTerm& t) {
    LinTerm rest = t;
    BigInt c = rest.coeff(x);
    rest.coeffs.erase(x);
    return c > 0 ? -rest : rest;  // x + r = 0 -> x = -r ; -x + r = 0 -> x = r
  }

  // exists x. f, for quantifier-free f.
  Formula elim(int x, const Formula& f) {
    const auto& n = f.node();
    if (!mentions(f, x)) return f;
    if (n.kind == K::Or) {
      std::vector<Formula> parts;
      for (const auto& k : n.kids) parts.push_back(elim(x, k));
      return or_(std::move(parts));
    }
    if (n.kind == K::And) {
      std::vector<Formula> with, without;
      for (const auto& k : n.kids) (mentions(k, x) ? with : without).push_back(k);
      if (!without.empty()) {
        without.push_back(elim(x, and_(std::move(with))));
        return and_(std::move(without));
      }
    }

    // Make every coefficient of x +-1 by scaling to the lcm l, then x stands
    // for l*x and l | x is added.
    BigInt l = 1;
    for_each_atom(f, [&](const Atom& a) {
      BigInt c = a.t.coeff(x);
      if (c != 0) l = lcm(l, c);
    });
    Formula g = map_atoms(f, [&](const Atom& a) {
      BigInt c = a.t.coeff(x);
      if (c == 0) return atom(a);
      BigInt k = l / babs(c);
      Atom b = a;
      b.t = k * a.t;
      if (a.kind == AK::Dvd || a.kind == AK::NDvd) b.m = a.m * k;
      b.t.coeffs[x] = c > 0 ? BigInt(1) : BigInt(-1);
      // atom() would divide the x coefficient away again only through a gcd
      // that includes it, which is 1 here.
      return make(FormulaNode{K::Atom, std::move(b), {}, {}});
    });
    if (l != 1) g = and_(g, dvd(l, LinTerm::var(x)));

    // An equation among the top-level conjuncts is solved directly.
    {
      const auto& gn = g.node();
      std::vector<Formula> conj = gn.kind == K::And ? gn.kids : std::vector<Formula>{g};
      for (const auto& c : conj) {
        if (c.kind() == K::Atom && c.node().atom.kind == AK::Eq && c.node().atom.t.coeffs.count(x)) {
          Formula r = substitute(g, x, solve_for(x, c.node().atom.t));
          check(r);
          return r;
        }
      }
    }

    BigInt delta = 1;
    std::set<LinTerm> lower, upper;  // B and A sets
    for_each_atom(g, [&](const Atom& a) {
      BigInt c = a.t.coeff(x);
      if (c == 0) return;
      switch (a.kind) {
        case AK::Le:
          if (c > 0) {
            upper.insert(solve_for(x, a.t) + LinTerm(1));  // x < -r + 1
          } else {
            LinTerm r = a.t;
            r.coeffs.erase(x);
            lower.insert(r - LinTerm(1));  // x > r - 1
          }
          break;
        case AK::Eq: {
          LinTerm e = solve_for(x, a.t);
          lower.insert(e - LinTerm(1));
          upper.insert(e + LinTerm(1));
          break;
        }
        case AK::Ne: {
          LinTerm e = solve_for(x, a.t);
          lower.insert(e);
          upper.insert(e);
          break;
        }
        case AK::Dvd:
        case AK::NDvd: delta = lcm(delta, a.m); break;
      }
    });

    bool use_lower = lower.size() <= upper.size();
    // f at -inf (or +inf): bounds collapse to constants.
    Formula inf = map_atoms(g, [&](const Atom& a) {
      BigInt c = a.t.coeff(x);
      if (c == 0) return atom(a);
      switch (a.kind) {
        case AK::Le: return truth(use_lower ? c > 0 : c < 0);
        case AK::Eq: return truth(false);
        case AK::Ne: return truth(true);
        default: return atom(a);
      }
    });
    std::vector<Formula> parts;
    const auto& pts = use_lower ? lower : upper;
    for (BigInt j = 1; j <= delta; ++j) {
      parts.push_back(substitute(inf, x, use_lower ? LinTerm(j) : LinTerm(BigInt(-j))));
      if (parts.back().is_true()) return truth(true);
    }
    for (const auto& p : pts)
      for (BigInt j = 1; j <= delta; ++j) {
        parts.push_back(substitute(g, x, use_lower ? p + LinTerm(j) : p - LinTerm(j)));
        if (parts.back().is_true()) return truth(true);
      }
    Formula r = or_(std::move(parts));
    check(r);
    return r;
  }

  Formula run(const Formula& f) {
    const auto& n = f.node();
    switch (n.kind) {
      case K::True:
      case K::False:
      case K::Atom: return f;
      case K::And:
      case K::Or: {
        std::vector<Formula> kids;
        for (const auto& k : n.kids) {
          kids.push_back(run(k));
          if (n.kind == K::And && kids.back().is_false()) return truth(false);
          if (n.kind == K::Or && kids.back().is_true()) return truth(true);
        }
        Formula r = n.kind == K::And ? and_(std::move(kids)) : or_(std::move(kids));
        check(r);
        return r;
      }
      case K::Exists: {
        Formula body = run(n.kids[0]);
        for (auto it = n.vars.rbegin(); it != n.vars.rend(); ++it) body = elim(*it, body);
        return body;
      }
      case K::Forall: {
        Formula body = not_(run(n.kids[0]));
        for (auto it = n.vars.rbegin(); it != n.vars.rend(); ++it) body = elim(*it, body);
        return not_(body);
      }
    }
    return f;
  }
};

BigInt eval_term(const LinTerm& t, const Assignment& env) {
  BigInt s = t.constant;
  for (const auto& [v, c] : t.coeffs) {
    auto it = env.find(v);
    if (it == env.end()) throw std::invalid_argument("evaluate: unassigned variable " + var_name(v));
    s += c * it->second;
  }
  return s;
}

}  // namespace

Formula eliminate(const Formula& f, const Limits& lim) {
  Cooper c{lim};
  return c.run(f);
}

bool evaluate(const Formula& f, const Assignment& env) {
  const auto& n = f.node();
  switch (n.kind) {
    case K::True: return true;
    case K::False: return false;
    case K::Atom: {
      BigInt v = eval_term(n.atom.t, env);
      switch (n.atom.kind) {
        case AK::Le: return v <= 0;
        case AK::Eq: return v == 0;
        case AK::Ne: return v != 0;
        case AK::Dvd: return mod_pos(v, n.atom.m) == 0;
        case AK::NDvd: return mod_pos(v, n.atom.m) != 0;
      }
      return false;
    }
    case K::And:
      return std::all_of(n.kids.begin(), n.kids.end(), [&](const Formula& k) { return evaluate(k, env); });
    case K::Or:
      return std::any_of(n.kids.begin(), n.kids.end(), [&](const Formula& k) { return evaluate(k, env); });
    default: throw std::invalid_argument("evaluate: formula has quantifiers");
  }
}

bool is_valid(const Formula& f, const Limits& lim) {
  Formula r = eliminate(forall(free_vars(f), f), lim);
  if (!r.is_true() && !r.is_false()) return evaluate(r, {});
  return r.is_true();
}

bool is_sat(const Formula& f, const Limits& lim) {
  Formula r = eliminate(exists(free_vars(f), f), lim);
  if (!r.is_true() && !r.is_false()) return evaluate(r, {});
  return r.is_true();
}

std::optional<Assignment> find_model(const Formula& f, const Limits& lim) {
  std::vector<int> vars = free_vars(f);
  Formula body = f;
  while (body.kind() == K::Exists) {
    vars.insert(vars.end(), body.node().vars.begin(), body.node().vars.end());
    body = body.node().kids[0];
  }
  if (!is_sat(exists(vars, body), lim)) return std::nullopt;

  Assignment model;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    int x = vars[i];
    std::vector<int> rest(vars.begin() + static_cast<std::ptrdiff_t>(i) + 1, vars.end());
    Formula phi = eliminate(exists(rest, body), lim);  // mentions only x now
    // Candidates: every bound point plus j in [1, delta], and a run of values
    // below all of them for the -inf case.
    BigInt delta = 1, lowest = 0;
    std::set<BigInt> cands;
    for_each_atom(phi, [&](const Atom& a) {
      BigInt c = a.t.coeff(x);
      if (a.kind == AK::Dvd || a.kind == AK::NDvd) delta = lcm(delta, a.m);
      if (c == 0) return;
      BigInt r = a.t.constant;  // c*x + r
      BigInt q = floor_div(-r, c);
      for (BigInt d = -1; d <= 1; ++d) cands.insert(q + d);
      lowest = std::min(lowest, BigInt(q - 1));
    });
    std::set<BigInt> all;
    for (const auto& p : cands)
      for (BigInt j = 0; j <= delta; ++j) all.insert(p + j);
    for (BigInt j = 0; j <= delta; ++j) all.insert(lowest - j);
    for (BigInt j = 0; j <= delta; ++j) all.insert(j);
    bool found = false;
    for (const auto& v : all) {
      if (evaluate(substitute(phi, x, LinTerm(v)), {})) {
        model[x] = v;
        body = substitute(body, x, LinTerm(v));
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("find_model: no candidate satisfied a satisfiable formula");
  }
  return model;
}

}  // namespace gvas::pres
