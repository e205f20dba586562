#include "gvas/reduction.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <set>
#include <sstream>

#include "gvas/displacement.hpp"
#include "json.hpp"

namespace gvas {

namespace {

using Words = std::vector<SymbolString>;

std::string rule_text(const Gvas& g, const Rule& r) {
  return g.nonterminals[static_cast<std::size_t>(r.lhs)] + " -> " + rhs_text(g, r.rhs);
}

Rule parse_rule(Gvas& g, const std::string& text) {
  std::istringstream is(text);
  std::string lhs, arrow, tok;
  if (!(is >> lhs >> arrow) || arrow != "->") throw std::invalid_argument("bad rule text: " + text);
  Rule r;
  r.lhs = g.intern(lhs);
  while (is >> tok) {
    if (tok == "eps") continue;
    Int v = 0;
    const char* b = tok.data();
    const char* e = b + tok.size();
    if (*b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec == std::errc() && ptr == e)
      r.rhs.push_back(Symbol::t(v));
    else
      r.rhs.push_back(Symbol::nt(g.intern(tok)));
  }
  return r;
}

void apply_entry(Gvas& g, const LogEntry& e) {
  for (const auto& t : e.removed) {
    Rule r = parse_rule(g, t);
    auto it = std::find(g.rules.begin(), g.rules.end(), r);
    if (it == g.rules.end()) throw std::invalid_argument("log removes a missing rule: " + t);
    g.rules.erase(it);
  }
  for (const auto& t : e.added) {
    Rule r = parse_rule(g, t);
    if (std::find(g.rules.begin(), g.rules.end(), r) == g.rules.end()) g.rules.push_back(std::move(r));
  }
}

// reach[x][y]: y occurs in a sentential form derived from x in >= 1 step.
std::vector<std::vector<bool>> reach_matrix(const Gvas& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (const auto& rule : g.rules)
    for (const auto& s : rule.rhs)
      if (s.is_nonterminal()) r[static_cast<std::size_t>(rule.lhs)][static_cast<std::size_t>(s.index())] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
  return r;
}

bool finite_language_in(const Gvas& g, int y) {
  auto r = reach_matrix(g);
  const auto yi = static_cast<std::size_t>(y);
  if (r[yi][yi]) return false;
  for (std::size_t z = 0; z < g.size(); ++z)
    if (r[yi][z] && r[z][z]) return false;
  return true;
}

ExtValue sigma_at(const ClosedForm& cf, Int i) {
  if (i >= cf.cutoff) return checked_add(i, cf.delta);
  return cf.table[static_cast<std::size_t>(i)];
}

LogEntry unfold_entry(const Gvas& g, int x, const ClosedForm& sigma, Int bound, UnfoldMode mode) {
  LogEntry e;
  e.kind = "unfold";
  e.target = g.nonterminals[static_cast<std::size_t>(x)];
  for (const auto& r : g.rules)
    if (r.lhs == x) e.removed.push_back(rule_text(g, r));
  if (mode == UnfoldMode::Full && bound > 100'000)
    throw ExpansionTooLarge("unfold: d^|V| = " + std::to_string(bound) + " rules; use the compact mode");
  // sigma(i) - i is nondecreasing; past the cutoff it is constant.
  const Int last = mode == UnfoldMode::Full ? bound : std::min(bound, sigma.cutoff);
  std::optional<Int> best;
  for (Int i = 0; i <= last; ++i) {
    ExtValue s = sigma_at(sigma, i);
    if (!s.is_finite()) continue;
    const Int gain = s.value() - i;
    if (mode == UnfoldMode::Compact && best && gain <= *best) continue;
    best = gain;
    Rule r{x, {}};
    r.rhs.assign(static_cast<std::size_t>(i), Symbol::t(-1));
    r.rhs.insert(r.rhs.end(), static_cast<std::size_t>(s.value()), Symbol::t(1));
    e.added.push_back(rule_text(g, r));
  }
  if (e.added.empty()) throw std::invalid_argument("unfold: " + e.target + " has no finite summary value");
  return e;
}

const Words& words_of(const Gvas& g, const std::vector<std::vector<int>>& by_lhs, int y, std::map<int, Words>& memo,
                      std::size_t cap) {
  if (auto it = memo.find(y); it != memo.end()) return it->second;
  std::set<SymbolString> out;
  for (int ri : by_lhs[static_cast<std::size_t>(y)]) {
    std::set<SymbolString> acc{{}};
    for (const auto& s : g.rules[static_cast<std::size_t>(ri)].rhs) {
      std::set<SymbolString> next;
      if (s.is_terminal()) {
        for (auto w : acc) {
          w.push_back(s);
          next.insert(std::move(w));
        }
      } else {
        const Words& sub = words_of(g, by_lhs, s.index(), memo, cap);
        for (const auto& w : acc)
          for (const auto& z : sub) {
            auto c = w;
            c.insert(c.end(), z.begin(), z.end());
            next.insert(std::move(c));
            if (next.size() > cap) throw ExpansionTooLarge("expand: language exceeds " + std::to_string(cap) + " words");
          }
      }
      acc = std::move(next);
    }
    out.insert(acc.begin(), acc.end());
    if (out.size() > cap) throw ExpansionTooLarge("expand: language exceeds " + std::to_string(cap) + " words");
  }
  return memo[y] = Words(out.begin(), out.end());
}

LogEntry expand_entry(const Gvas& g, int y, std::size_t max_rules) {
  LogEntry e;
  e.kind = "expand";
  e.target = g.nonterminals[static_cast<std::size_t>(y)];
  std::map<int, Words> memo;
  const Words& lang = words_of(g, g.rules_by_lhs(), y, memo, max_rules);
  std::size_t total = g.rules.size();
  std::set<std::string> added;
  for (const auto& r : g.rules) {
    if (r.lhs == y) continue;
    if (std::none_of(r.rhs.begin(), r.rhs.end(), [&](const Symbol& s) { return s == Symbol::nt(y); })) continue;
    e.removed.push_back(rule_text(g, r));
    --total;
    std::vector<SymbolString> acc{{}};
    for (const auto& s : r.rhs) {
      std::vector<SymbolString> next;
      if (s != Symbol::nt(y)) {
        for (auto& w : acc) w.push_back(s);
        continue;
      }
      for (const auto& w : acc)
        for (const auto& z : lang) {
          auto c = w;
          c.insert(c.end(), z.begin(), z.end());
          next.push_back(std::move(c));
        }
      if (total + next.size() > max_rules)
        throw ExpansionTooLarge("expand " + e.target + ": more than " + std::to_string(max_rules) +
                                " rules; the grammar is too large for exact reduction");
      acc = std::move(next);
    }
    for (auto& w : acc) {
      std::string t = rule_text(g, Rule{r.lhs, std::move(w)});
      if (added.insert(t).second) {
        e.added.push_back(std::move(t));
        ++total;
      }
    }
  }
  return e;
}

LogEntry abstract_entry(const Gvas& g, int x) {
  LogEntry e;
  e.kind = "abstract";
  e.target = g.nonterminals[static_cast<std::size_t>(x)];
  for (const auto& r : g.rules)
    if (r.lhs == x) e.removed.push_back(rule_text(g, r));
  e.added.push_back(rule_text(g, Rule{x, {Symbol::t(1), Symbol::nt(x)}}));
  e.added.push_back(rule_text(g, Rule{x, {}}));
  return e;
}

NormalizedGvas must_normalize(const Gvas& g) {
  auto res = normalize(g);
  if (std::holds_alternative<EmptyLanguage>(res)) throw std::logic_error("reduction produced an empty language");
  return std::get<NormalizedGvas>(std::move(res));
}

Int gcd_int(Int a, Int b) { return std::gcd(a, b); }

}  // namespace

std::string to_string(const RatioResult& r) {
  if (!r.finite) return "+inf";
  std::string lam = std::to_string(r.lambda_num);
  if (r.lambda_den != 1) lam += "/" + std::to_string(r.lambda_den);
  return "finite lambda=" + lam + " b=" + std::to_string(r.b);
}

Gvas unfold_with(const Gvas& g, int x, const ClosedForm& sigma, Int bound, UnfoldMode mode) {
  Gvas out = g;
  apply_entry(out, unfold_entry(g, x, sigma, bound, mode));
  return out;
}

Gvas unfold(const NormalizedGvas& g, int x, UnfoldMode mode) {
  auto dt = displacement_table(g);
  if (!dt.finite(x)) throw std::invalid_argument("unfold: displacement of " + g.name(x) + " is not finite");
  auto sums = finite_displacement_summaries(g, dt);
  return unfold_with(g.grammar(), x, *sums[static_cast<std::size_t>(x)], g.elementary_bound(), mode);
}

bool finite_language(const NormalizedGvas& g, int x) { return finite_language_in(g.grammar(), x); }

Gvas expand(const Gvas& g, int y, std::size_t max_rules) {
  if (!finite_language_in(g, y))
    throw std::invalid_argument("expand: " + g.nonterminals[static_cast<std::size_t>(y)] + " has an infinite language");
  Gvas out = g;
  apply_entry(out, expand_entry(g, y, max_rules));
  return out;
}

Gvas abstract(const Gvas& g, int x) {
  Gvas out = g;
  apply_entry(out, abstract_entry(g, x));
  return out;
}

std::string to_json(const EquivalenceLog& log) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : log.entries) {
    nlohmann::json j{{"kind", e.kind}, {"target", e.target}, {"removed", e.removed}, {"added", e.added}};
    if (e.kind == "abstract")
      j["pump"] = {{"rule", e.pump_rule}, {"via", e.pump_via}, {"infinite_displacement", e.pump_witness}};
    arr.push_back(std::move(j));
  }
  return nlohmann::json{{"entries", arr}}.dump(2);
}

EquivalenceLog equivalence_log_from_json(const std::string& text) {
  EquivalenceLog log;
  auto j = nlohmann::json::parse(text);
  for (const auto& je : j.at("entries")) {
    LogEntry e;
    e.kind = je.at("kind").get<std::string>();
    e.target = je.at("target").get<std::string>();
    e.removed = je.at("removed").get<std::vector<std::string>>();
    e.added = je.at("added").get<std::vector<std::string>>();
    if (je.contains("pump")) {
      e.pump_rule = je["pump"].at("rule").get<std::string>();
      e.pump_via = je["pump"].at("via").get<std::string>();
      e.pump_witness = je["pump"].at("infinite_displacement").get<std::string>();
    }
    log.entries.push_back(std::move(e));
  }
  return log;
}

NormalizedGvas replay(const NormalizedGvas& g, const EquivalenceLog& log) {
  Gvas cur = g.grammar();
  for (const auto& e : log.entries) apply_entry(cur, e);
  return must_normalize(cur);
}

Reduction reduce_to_thin(const NormalizedGvas& g, const ReduceOptions& opt) {
  Gvas cur = g.grammar();
  EquivalenceLog log;
  auto record = [&](LogEntry e) {
    if (e.removed.empty() && e.added.empty()) return;
    apply_entry(cur, e);
    log.entries.push_back(std::move(e));
  };

  auto dt = displacement_table(g);
  std::vector<int> fin;
  for (int x = 0; x < static_cast<int>(g.size()); ++x)
    if (dt.finite(x)) fin.push_back(x);
  if (!fin.empty()) {
    auto sums = finite_displacement_summaries(g, dt, opt.summary);
    std::stable_sort(fin.begin(), fin.end(),
                     [&](int a, int b) { return g.closure(a).size() < g.closure(b).size(); });
    const Int bound = g.elementary_bound();
    for (int x : fin) record(unfold_entry(cur, x, *sums[static_cast<std::size_t>(x)], bound, UnfoldMode::Compact));
    for (int x : fin) record(expand_entry(cur, x, opt.max_rules));
  }

  for (;;) {
    auto reach = reach_matrix(cur);
    auto closes = [&](int from, int to) { return from == to || reach[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)]; };
    const Rule* bad = nullptr;
    std::size_t via_pos = 0;
    for (const auto& r : cur.rules) {
      for (std::size_t i = 0; i < r.rhs.size(); ++i)
        if (r.rhs[i].is_nonterminal() && closes(r.rhs[i].index(), r.lhs)) {
          if (!is_terminal_wrapped(r.rhs)) {
            bad = &r;
            via_pos = i;
          }
          break;
        }
      if (bad) break;
    }
    if (!bad) break;

    // X -> alpha with X derivable from alpha[via_pos]; any other nonterminal
    // of alpha lands in the pump words, and must have infinite displacement.
    const int x = bad->lhs;
    auto ng = must_normalize(cur);
    auto cdt = displacement_table(ng);
    std::optional<int> witness;
    for (std::size_t i = 0; i < bad->rhs.size() && !witness; ++i)
      if (i != via_pos && bad->rhs[i].is_nonterminal()) witness = bad->rhs[i].index();
    if (!witness) throw std::logic_error("reduce_to_thin: violating rule without a second nonterminal");
    const auto& wname = cur.nonterminals[static_cast<std::size_t>(*witness)];
    if (!cdt[ng.grammar().find(wname)].is_pos_inf())
      throw std::logic_error("reduce_to_thin: pump nonterminal " + wname + " has finite displacement");
    LogEntry e = abstract_entry(cur, x);
    e.pump_rule = rule_text(cur, *bad);
    e.pump_via = cur.nonterminals[static_cast<std::size_t>(bad->rhs[via_pos].index())];
    e.pump_witness = wname;
    record(std::move(e));
  }

  Reduction out{must_normalize(cur), std::move(log)};
  if (!structural_report(out.grammar).is_thin) throw std::logic_error("reduce_to_thin: output is not thin");
  return out;
}

RatioResult ratio_of_relation(const SemilinearSet& r) {
  RatioResult res;
  res.finite = true;
  for (const auto& c : r.components) {
    res.b = std::max(res.b, c.base[1]);
    for (const auto& p : c.periods) {
      if (p[0] == 0) {
        if (p[1] > 0) return RatioResult::infinite();
        continue;
      }
      // p1 / p0 > num / den
      if (static_cast<__int128>(p[1]) * res.lambda_den > static_cast<__int128>(res.lambda_num) * p[0]) {
        Int gd = gcd_int(p[1], p[0]);
        res.lambda_num = p[1] / gd;
        res.lambda_den = p[0] / gd;
      }
    }
  }
  return res;
}

RatioAnalyzer::RatioAnalyzer(const NormalizedGvas& g, vas2::AccelCaps caps, const ReduceOptions& opt)
    : red_(reduce_to_thin(g, opt)) {
  simple_ = std::make_unique<NormalizedGvas>(thin::to_simple(red_.grammar));
  steps_ = std::make_unique<thin::StepRelations>(*simple_, caps);
}

const SemilinearSet& RatioAnalyzer::relation(int x) {
  const auto& name = red_.grammar.name(x);
  return steps_->of(simple_->grammar().find(name));
}

RatioResult RatioAnalyzer::ratio(int x) { return ratio_of_relation(relation(x)); }

std::optional<SummaryFn> RatioAnalyzer::summary(int x) {
  RatioResult r = ratio(x);
  if (!r.finite) return std::nullopt;
  return SummaryFn{Relational{relation(x), r.lambda_num, r.lambda_den, r.b}};
}

RatioAndSummary ratio_and_summary(const NormalizedGvas& g, int x, const vas2::AccelCaps& caps) {
  RatioAnalyzer an(g, caps);
  const int rx = an.reduction().grammar.grammar().find(g.name(x));
  return {an.ratio(rx), an.summary(rx)};
}

}  // namespace gvas
