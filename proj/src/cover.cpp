#include "gvas/cover.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <iomanip>
#include <limits>
#include <sstream>

#include "gvas/oracle.hpp"
#include "json.hpp"

namespace gvas {

namespace {

constexpr Int kNone = std::numeric_limits<Int>::max();  // no ancestor, or an input of +inf

Int as_key(const ExtValue& v) { return v.is_pos_inf() ? kNone : v.value(); }

// Per nonterminal, the least input among the ancestors (kNone when absent).
using Frontier = std::vector<Int>;

bool check_node(Analyses& an, const CertNode& t, Frontier& anc) {
  const auto& g = an.grammar();
  if (t.in < 0 || t.out < 0) return false;
  switch (t.kind) {
    case CertNode::Kind::Terminal:
      if (t.rule || !t.children.empty()) throw MalformedCertificate("terminal node with children");
      return t.out <= t.in + t.value;
    case CertNode::Kind::Epsilon:
      if (t.rule || !t.children.empty()) throw MalformedCertificate("eps node with children");
      return t.out <= t.in;
    case CertNode::Kind::NonTerminal: break;
  }
  if (t.value < 0 || t.value >= static_cast<Int>(g.size())) throw MalformedCertificate("unknown nonterminal");
  const int x = static_cast<int>(t.value);
  if (!t.rule) {
    if (!t.children.empty()) throw MalformedCertificate("leaf with children and no rule");
    if (an.finite_ratio(x)) return ExtValue(t.out) <= an.sigma(x, t.in);
    return anc[static_cast<std::size_t>(x)] != kNone && anc[static_cast<std::size_t>(x)] < t.in;
  }
  const int ri = *t.rule;
  if (ri < 0 || ri >= static_cast<int>(g.grammar().rules.size())) throw MalformedCertificate("unknown rule");
  const Rule& r = g.rule(ri);
  if (r.lhs != x) throw MalformedCertificate("rule " + std::to_string(ri) + " does not rewrite " + g.name(x));
  if (r.rhs.size() != t.children.size()) throw MalformedCertificate("children do not match rule " + std::to_string(ri));
  for (std::size_t i = 0; i < r.rhs.size(); ++i) {
    const auto& s = r.rhs[i];
    const auto& ch = t.children[i];
    bool ok = s.is_terminal() ? ch.kind == CertNode::Kind::Terminal && ch.value == s.action()
                              : ch.kind == CertNode::Kind::NonTerminal && ch.value == s.index();
    if (!ok) throw MalformedCertificate("children do not match rule " + std::to_string(ri));
  }
  if (t.children.empty()) return t.out <= t.in;
  if (t.children.front().in > t.in || t.out > t.children.back().out) return false;
  for (std::size_t i = 0; i + 1 < t.children.size(); ++i)
    if (t.children[i + 1].in > t.children[i].out) return false;
  Int& slot = anc[static_cast<std::size_t>(x)];
  const Int saved = slot;
  slot = std::min(slot, t.in);
  bool ok = true;
  for (const auto& ch : t.children)
    if (!(ok = check_node(an, ch, anc))) break;
  slot = saved;
  return ok;
}

// Bounded AND-OR search.  leaf_value: output of condition-(iii) leaves;
// nullopt means symbolic +inf.
class Search {
public:
  Search(Analyses& an, std::optional<Int> leaf_value, Int cap) : an_(an), leaf_(leaf_value), cap_(cap) {}

  ExtValue best(int x, const ExtValue& c, const Frontier& f, int h) {
    auto key = std::make_tuple(x, as_key(c), f, h);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second.first;
    Frontier f2 = f;
    auto& slot = f2[static_cast<std::size_t>(x)];
    if (c.is_finite()) slot = std::min(slot, c.value());
    ExtValue top = ExtValue::neg_inf();
    int arg = -1;
    for (int ri : an_.grammar().rules_of(x)) {
      ExtValue v = c;
      for (const auto& s : an_.grammar().rule(ri).rhs) {
        v = step(s, v, f2, h).first;
        if (v.is_neg_inf()) break;
      }
      if (v > top) {
        top = v;
        arg = ri;
      }
    }
    memo_[key] = {top, arg};
    return top;
  }

  // Output of one child symbol from input v, and whether it expands.
  std::pair<ExtValue, bool> step(const Symbol& s, const ExtValue& v, const Frontier& f, int h) {
    if (s.is_terminal()) {
      if (v.is_pos_inf()) return {v, false};
      Int n = v.value() + s.action();
      if (n < 0 || n > cap_) return {ExtValue::neg_inf(), false};
      return {n, false};
    }
    const int y = s.index();
    if (an_.finite_ratio(y)) {
      ExtValue r = an_.sigma(y, v);
      if (r.is_finite() && r.value() > cap_) return {ExtValue::neg_inf(), false};
      return {r, false};
    }
    const Int a = f[static_cast<std::size_t>(y)];
    const bool closes = a != kNone && (v.is_pos_inf() || a < v.value());
    if (closes && !leaf_) return {ExtValue::pos_inf(), false};
    ExtValue leaf = closes ? ExtValue(*leaf_) : ExtValue::neg_inf();
    ExtValue inner = h > 1 ? best(y, v, f, h - 1) : ExtValue::neg_inf();
    if (inner > leaf) return {inner, true};
    return {leaf, false};
  }

  CertNode build(int x, const ExtValue& c, const Frontier& f, int h) {
    best(x, c, f, h);
    const auto& [value, ri] = memo_.at(std::make_tuple(x, as_key(c), f, h));
    CertNode t;
    t.kind = CertNode::Kind::NonTerminal;
    t.value = x;
    t.in = c.value();
    t.out = value.value();
    t.rule = ri;
    Frontier f2 = f;
    auto& slot = f2[static_cast<std::size_t>(x)];
    slot = std::min(slot, c.value());
    ExtValue v = c;
    for (const auto& s : an_.grammar().rule(ri).rhs) {
      auto [out, expands] = step(s, v, f2, h);
      if (expands) {
        t.children.push_back(build(s.index(), v, f2, h - 1));
      } else {
        CertNode leaf;
        leaf.kind = s.is_terminal() ? CertNode::Kind::Terminal : CertNode::Kind::NonTerminal;
        leaf.value = s.value;
        leaf.in = v.value();
        leaf.out = out.value();
        t.children.push_back(std::move(leaf));
      }
      v = out;
    }
    return t;
  }

private:
  Analyses& an_;
  std::optional<Int> leaf_;
  Int cap_;
  std::map<std::tuple<int, Int, Frontier, int>, std::pair<ExtValue, int>> memo_;
};

std::optional<NormalizedGvas> normalized_or_empty(const Gvas& g) {
  auto r = normalize(g);
  if (std::holds_alternative<EmptyLanguage>(r)) return std::nullopt;
  return std::get<NormalizedGvas>(std::move(r));
}

int index_of(const NormalizedGvas& g, const std::string& s) {
  int x = g.grammar().find(s);
  if (x < 0) throw std::invalid_argument("unknown nonterminal " + s);
  return x;
}

std::optional<Word> oracle_word(const NormalizedGvas& g, int s, Int c, Int d) {
  const Int len = 2 * (c + d + g.elementary_bound(1 << 20));
  auto pairs = oracle::reach_pairs(g, s, c, {std::min<Int>(len, 400), 0, 20'000'000});
  for (const auto& p : pairs)
    if (p.d >= d) return p.witness;
  return std::nullopt;
}

}  // namespace

std::size_t CertNode::size() const {
  std::size_t n = 1;
  for (const auto& ch : children) n += ch.size();
  return n;
}

std::size_t CertNode::height() const {
  std::size_t h = 0;
  for (const auto& ch : children) h = std::max(h, ch.height());
  return h + 1;
}

Analyses::Analyses(const NormalizedGvas& g, vas2::AccelCaps caps) : g_(g), caps_(caps) {}

RatioResult Analyses::ratio(int x) {
  if (auto it = ratio_.find(x); it != ratio_.end()) return it->second;
  if (!an_) an_ = std::make_unique<RatioAnalyzer>(g_, caps_);
  RatioResult r = an_->ratio(x);
  ratio_[x] = r;
  if (r.finite) summary_.emplace(x, *an_->summary(x));
  return r;
}

bool Analyses::finite_ratio(int x) { return ratio(x).finite; }

ExtValue Analyses::sigma(int x, const ExtValue& n) {
  if (!finite_ratio(x)) throw std::logic_error("sigma of an infinite-ratio nonterminal");
  if (!n.is_finite()) return eval_summary(summary_.at(x), n);
  auto key = std::make_pair(x, n.value());
  if (auto it = eval_.find(key); it != eval_.end()) return it->second;
  return eval_[key] = eval_summary(summary_.at(x), n);
}

bool check_certificate(Analyses& an, const Certificate& cert) {
  Frontier anc(an.grammar().size(), kNone);
  return check_node(an, cert.root, anc);
}

bool certifies(Analyses& an, const Certificate& cert, int s, Int c, Int d) {
  const auto& r = cert.root;
  return r.kind == CertNode::Kind::NonTerminal && r.value == s && r.in <= c && r.out >= d && check_certificate(an, cert);
}

std::optional<Certificate> find_certificate(Analyses& an, int s, Int c, Int d, const CoverBounds& bounds) {
  const Frontier none(an.grammar().size(), kNone);
  for (int h = 1; h <= bounds.max_height; ++h) {
    Search symbolic(an, std::nullopt, bounds.max_value);
    if (symbolic.best(s, c, none, h) < ExtValue(d)) continue;
    // Leaves closed by (iii) output k; raise k until the root reaches d.
    for (Int k = std::max<Int>(d, 1); k <= bounds.max_value; k *= 2) {
      Search concrete(an, k, bounds.max_value);
      if (concrete.best(s, c, none, h) >= ExtValue(d)) return Certificate{concrete.build(s, c, none, h)};
      if (k > bounds.max_value / 2) break;
    }
  }
  return std::nullopt;
}

bool unbounded_from(Analyses& an, int s, Int c, int max_height) {
  const Frontier none(an.grammar().size(), kNone);
  Search symbolic(an, std::nullopt, std::numeric_limits<Int>::max() / 4);
  for (int h = 1; h <= max_height; ++h)
    if (symbolic.best(s, c, none, h).is_pos_inf()) return true;
  return false;
}

std::optional<ExtValue> fixpoint_summary(Analyses& an, int s, Int c, Int cap) {
  // Kleene iteration from -inf over the demanded points (x, n) of
  // infinite-ratio nonterminals; finite-ratio ones use their summary.  At a
  // fixpoint every derivation tree is dominated by the table, so the values
  // are exact.
  const auto& g = an.grammar();
  std::map<std::pair<int, Int>, std::size_t> index;
  std::vector<std::pair<int, Int>> points;
  std::vector<ExtValue> table;
  auto demand = [&](int x, Int n) -> ExtValue {
    auto [it, fresh] = index.emplace(std::make_pair(x, n), points.size());
    if (fresh) {
      points.emplace_back(x, n);
      table.push_back(ExtValue::neg_inf());
    }
    return table[it->second];
  };
  auto point_value = [&](int x, Int n) -> ExtValue {
    if (an.finite_ratio(x)) return an.sigma(x, n);
    return demand(x, n);
  };
  point_value(s, c);
  bool changed = true;
  while (changed) {
    changed = false;
    const std::size_t before = points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto [x, n] = points[i];
      ExtValue top = ExtValue::neg_inf();
      for (int ri : g.rules_of(x)) {
        ExtValue v = n;
        for (const auto& sym : g.rule(ri).rhs) {
          if (sym.is_terminal()) {
            Int m = v.value() + sym.action();
            v = m < 0 ? ExtValue::neg_inf() : ExtValue(m);
          } else {
            v = point_value(sym.index(), v.value());
          }
          if (v.is_neg_inf()) break;
          if (v.is_pos_inf() || v.value() > cap) return std::nullopt;
        }
        top = max(top, v);
      }
      if (top > table[i]) {
        table[i] = top;
        changed = true;
      }
    }
    if (points.size() != before) changed = true;
    if (points.size() > static_cast<std::size_t>(cap + 1) * g.size()) return std::nullopt;
  }
  if (an.finite_ratio(s)) return an.sigma(s, c);
  return table[index.at({s, c})];
}

std::string to_string(CoverVerdict::Kind k) {
  switch (k) {
    case CoverVerdict::Kind::Covered: return "covered";
    case CoverVerdict::Kind::NotCovered: return "not-covered";
    default: return "unknown";
  }
}

CoverVerdict decide_cover(const Gvas& input, const std::string& name, Int c, Int d, const CoverBounds& bounds,
                          const vas2::AccelCaps& caps) {
  CoverVerdict v;
  v.bound_used = bounds;
  if (input.find(name) < 0) throw std::invalid_argument("unknown nonterminal " + name);
  auto ng = normalized_or_empty(input);
  const bool empty_lang = !ng || ng->grammar().find(name) < 0;
  if (empty_lang) {
    v.kind = CoverVerdict::Kind::NotCovered;
    v.method = "summary";
    v.detail = "empty language";
    return v;
  }
  const NormalizedGvas& g = *ng;
  const int s = index_of(g, name);
  Analyses an(g, caps);
  try {
    if (an.finite_ratio(s)) {
      ExtValue sig = an.sigma(s, c);
      v.method = "summary";
      v.detail = "sigma(" + std::to_string(c) + ") = " + sig.to_string();
      if (sig < ExtValue(d)) {
        v.kind = CoverVerdict::Kind::NotCovered;
        return v;
      }
      v.kind = CoverVerdict::Kind::Covered;
      v.certificate = find_certificate(an, s, c, d, bounds);
      if (!v.certificate) v.word = oracle_word(g, s, c, d);
      return v;
    }
    if (auto cert = find_certificate(an, s, c, d, bounds)) {
      v.kind = CoverVerdict::Kind::Covered;
      v.method = "certificate";
      v.certificate = std::move(cert);
      return v;
    }
    auto fp = fixpoint_summary(an, s, c, bounds.fixpoint_cap);
    if (!fp) {
      v.detail = "no certificate of height <= " + std::to_string(bounds.max_height) +
                 " and the fixpoint exceeded the counter cap " + std::to_string(bounds.fixpoint_cap);
      return v;
    }
    v.detail = "least fixpoint sigma(" + std::to_string(c) + ") = " + fp->to_string();
    if (*fp < ExtValue(d)) {
      v.kind = CoverVerdict::Kind::NotCovered;
      v.method = "bounded-exhaustion";
      return v;
    }
    if (auto w = oracle_word(g, s, c, d)) {
      v.kind = CoverVerdict::Kind::Covered;
      v.method = "oracle";
      v.word = std::move(w);
    }
    return v;
  } catch (const thin::KernelCapExhausted& e) {
    v.kind = CoverVerdict::Kind::Unknown;
    v.detail = e.what();
    return v;
  } catch (const ExpansionTooLarge& e) {
    v.kind = CoverVerdict::Kind::Unknown;
    v.detail = e.what();
    return v;
  }
}

MaxCoverResult max_cover(const Gvas& input, const std::string& name, Int c, const CoverBounds& bounds,
                         const vas2::AccelCaps& caps) {
  MaxCoverResult res;
  if (input.find(name) < 0) throw std::invalid_argument("unknown nonterminal " + name);
  auto ng = normalized_or_empty(input);
  if (!ng || ng->grammar().find(name) < 0) {
    res.value = ExtValue::neg_inf();
    res.method = "summary";
    return res;
  }
  const NormalizedGvas& g = *ng;
  const int s = index_of(g, name);
  Analyses an(g, caps);
  try {
    if (an.finite_ratio(s)) {
      res.value = an.sigma(s, c);
      res.method = "summary";
      return res;
    }
    if (unbounded_from(an, s, c, bounds.max_height)) {
      res.value = ExtValue::pos_inf();
      res.method = "certificate";
      return res;
    }
    if (auto fp = fixpoint_summary(an, s, c, bounds.fixpoint_cap)) {
      res.value = *fp;
      res.method = "bounded-exhaustion";
      return res;
    }
    res.detail = "undecided within the bounds";
  } catch (const thin::KernelCapExhausted& e) {
    res.detail = e.what();
  } catch (const ExpansionTooLarge& e) {
    res.detail = e.what();
  }
  return res;
}

std::string grammar_hash(const NormalizedGvas& g) {
  const std::string text = to_text(g.grammar());
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

namespace {

nlohmann::ordered_json node_json(const NormalizedGvas& g, const CertNode& t) {
  nlohmann::ordered_json j;
  switch (t.kind) {
    case CertNode::Kind::Terminal: j["sym"] = {{"t", t.value}}; break;
    case CertNode::Kind::Epsilon: j["sym"] = "eps"; break;
    case CertNode::Kind::NonTerminal: j["sym"] = g.name(static_cast<int>(t.value)); break;
  }
  j["in"] = t.in;
  j["out"] = t.out;
  j["rule"] = t.rule ? nlohmann::ordered_json(*t.rule) : nlohmann::ordered_json(nullptr);
  j["children"] = nlohmann::ordered_json::array();
  for (const auto& ch : t.children) j["children"].push_back(node_json(g, ch));
  return j;
}

CertNode node_from_json(const NormalizedGvas& g, const nlohmann::ordered_json& j) {
  CertNode t;
  const auto& sym = j.at("sym");
  if (sym.is_object()) {
    t.kind = CertNode::Kind::Terminal;
    t.value = sym.at("t").get<Int>();
  } else if (sym.get<std::string>() == "eps") {
    t.kind = CertNode::Kind::Epsilon;
  } else {
    t.kind = CertNode::Kind::NonTerminal;
    t.value = g.grammar().find(sym.get<std::string>());
    if (t.value < 0) throw MalformedCertificate("unknown nonterminal " + sym.get<std::string>());
  }
  t.in = j.at("in").get<Int>();
  t.out = j.at("out").get<Int>();
  if (j.contains("rule") && !j["rule"].is_null()) t.rule = j["rule"].get<int>();
  if (j.contains("children"))
    for (const auto& ch : j["children"]) t.children.push_back(node_from_json(g, ch));
  return t;
}

void dot_node(const NormalizedGvas& g, const CertNode& t, std::ostream& os, int& next) {
  const int id = next++;
  std::string label;
  switch (t.kind) {
    case CertNode::Kind::Terminal: label = std::to_string(t.value); break;
    case CertNode::Kind::Epsilon: label = "eps"; break;
    case CertNode::Kind::NonTerminal: label = g.name(static_cast<int>(t.value)); break;
  }
  os << "  n" << id << " [label=\"" << label << "\\n" << t.in << " -> " << t.out << "\"";
  if (t.kind != CertNode::Kind::NonTerminal) os << ", shape=plaintext";
  else if (!t.rule) os << ", shape=box";
  os << "];\n";
  for (const auto& ch : t.children) {
    const int cid = next;
    dot_node(g, ch, os, next);
    os << "  n" << id << " -> n" << cid << ";\n";
  }
}

}  // namespace

std::string to_json(const NormalizedGvas& g, const Certificate& cert) {
  nlohmann::ordered_json j{{"grammar", grammar_hash(g)}, {"root", node_json(g, cert.root)}};
  return j.dump(2);
}

Certificate certificate_from_json(const NormalizedGvas& g, const std::string& text) {
  auto j = nlohmann::ordered_json::parse(text);
  if (j.at("grammar").get<std::string>() != grammar_hash(g))
    throw std::invalid_argument("certificate was issued for a different grammar");
  return Certificate{node_from_json(g, j.at("root"))};
}

std::string to_dot(const NormalizedGvas& g, const Certificate& cert) {
  std::ostringstream os;
  os << "digraph certificate {\n  node [shape=ellipse];\n";
  int next = 0;
  dot_node(g, cert.root, os, next);
  os << "}\n";
  return os.str();
}

}  // namespace gvas
