#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "corpus.hpp"
#include "doctest.h"
#include "gvas/grammar.hpp"
#include "gvas/oracle.hpp"

using namespace gvas;

namespace {

// Zero-free unit words (terminal a expanded to sign(a)^|a|, zeros dropped) of
// length <= n, per nonterminal, by fixpoint on the raw grammar.
std::vector<std::set<Word>> reduced_words(const Gvas& g, std::size_t n) {
  std::vector<std::set<Word>> sets(g.size());
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : g.rules) {
      std::set<Word> partial{Word{}};
      for (const auto& s : r.rhs) {
        std::set<Word> next;
        for (const auto& p : partial) {
          if (s.is_terminal()) {
            Word w = p;
            for (Int k = 0; k < std::abs(s.action()); ++k) w.push_back(s.action() > 0 ? 1 : -1);
            if (w.size() <= n) next.insert(w);
          } else {
            for (const auto& q : sets[static_cast<std::size_t>(s.index())]) {
              if (p.size() + q.size() > n) continue;
              Word w = p;
              w.insert(w.end(), q.begin(), q.end());
              next.insert(w);
            }
          }
        }
        partial = std::move(next);
      }
      for (const auto& w : partial)
        if (sets[static_cast<std::size_t>(r.lhs)].insert(w).second) changed = true;
    }
  }
  return sets;
}

}  // namespace

TEST_CASE("parse_text: rule expansion and order") {
  Gvas g = parse_text("S -> -1 S 1 1 | eps");
  REQUIRE(g.rules.size() == 2);
  CHECK(g.rules[0].rhs == SymbolString{Symbol::t(-1), Symbol::nt(0), Symbol::t(1), Symbol::t(1)});
  CHECK(g.rules[1].rhs.empty());

  Gvas e = parse_text("S -> eps");
  CHECK(e.rules.size() == 1);
  CHECK(e.rules[0].rhs.empty());

  Gvas a = parse_text(corpus::kAck1);
  CHECK(a.rules.size() == 3);
  CHECK(a.size() == 2);
  CHECK(a.nonterminals[0] == "X0");
}

TEST_CASE("parse_text: directives, comments and errors") {
  Gvas g = parse_text("# c\nstart: T\nS -> T 1 ; T -> eps # trailing\n");
  CHECK(g.nonterminals[static_cast<std::size_t>(g.start)] == "T");
  CHECK_THROWS_AS(parse_text("start: S\nstart: S\nS -> eps"), ParseError);
  CHECK_THROWS_AS(parse_text("S -> 1 |"), ParseError);
  CHECK_THROWS_AS(parse_text("S 1"), ParseError);
  CHECK_THROWS_AS(parse_text("S -> eps 1"), ParseError);
  try {
    parse_text("S -> 1\nT -> $");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  // Undeclared nonterminals are fine.
  Gvas u = parse_text("S -> Y 1");
  CHECK(u.size() == 2);
}

TEST_CASE("to_text round trip") {
  for (const auto& src : corpus::all()) {
    Gvas g = parse_text(src);
    Gvas h = parse_text(to_text(g));
    CHECK(h.nonterminals == g.nonterminals);
    CHECK(h.rules == g.rules);
    CHECK(h.start == g.start);
  }
}

TEST_CASE("normalize examples") {
  auto n3 = normalized("S -> 3");
  CHECK(n3.grammar().rules[0].rhs == SymbolString{Symbol::t(1), Symbol::t(1), Symbol::t(1)});
  CHECK(n3.degree() == 3);

  auto mul = normalized(corpus::kMul);
  CHECK(mul.grammar().rules == parse_text(corpus::kMul).rules);
  CHECK(mul.degree() == 4);

  CHECK(std::holds_alternative<EmptyLanguage>(normalize(parse_text("S -> X 1 ; X -> X"))));

  auto p = normalized("S -> 1 | X 1 ; X -> X");
  REQUIRE(p.grammar().rules.size() == 1);
  CHECK(p.grammar().rules[0].rhs == SymbolString{Symbol::t(1), Symbol::t(0)});
  CHECK(p.size() == 1);
}

TEST_CASE("structural_report examples") {
  auto mul = structural_report(normalized(corpus::kMul));
  CHECK(mul.is_thin);
  CHECK_FALSE(mul.is_simple);
  auto exp = structural_report(normalized(corpus::kExp));
  CHECK_FALSE(exp.is_thin);
  auto id = structural_report(normalized(corpus::kIdent));
  CHECK(id.is_thin);
  CHECK(id.is_simple);
}

TEST_CASE("property: normalize preserves languages and is idempotent") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> big(-3, 3);
  int checked = 0;
  for (int iter = 0; iter < 150; ++iter) {
    std::string src = corpus::random_grammar(rng, 1 + iter % 3, 3, 3);
    Gvas g = parse_text(src);
    // Sprinkle some non-unit terminals.
    for (auto& r : g.rules)
      for (auto& s : r.rhs)
        if (s.is_terminal() && rng() % 3 == 0) s.value = big(rng);
    auto res = normalize(g);
    if (std::holds_alternative<EmptyLanguage>(res)) {
      CHECK_FALSE(productive_nonterminals(g)[static_cast<std::size_t>(g.start)]);
      continue;
    }
    const auto& ng = std::get<NormalizedGvas>(res);
    auto before = reduced_words(g, 8);
    auto after = reduced_words(ng.grammar(), 8);
    for (std::size_t x = 0; x < ng.size(); ++x) {
      int ox = g.find(ng.name(static_cast<int>(x)));
      CHECK(after[x] == before[static_cast<std::size_t>(ox)]);
    }
    auto again = normalize(ng.grammar());
    REQUIRE(std::holds_alternative<NormalizedGvas>(again));
    CHECK(std::get<NormalizedGvas>(again).grammar().rules == ng.grammar().rules);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("property: derivability is the least transitive relation over rhs occurrence") {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 100; ++iter) {
    auto res = normalize(parse_text(corpus::random_grammar(rng, 2 + iter % 7, 3, 4)));
    if (!std::holds_alternative<NormalizedGvas>(res)) continue;
    const auto& g = std::get<NormalizedGvas>(res);
    std::size_t n = g.size();
    std::vector<std::vector<bool>> occ(n, std::vector<bool>(n, false));
    for (const auto& r : g.grammar().rules)
      for (const auto& s : r.rhs)
        if (s.is_nonterminal()) occ[static_cast<std::size_t>(r.lhs)][static_cast<std::size_t>(s.index())] = true;
    // Brute force: reachability by BFS from each node.
    for (std::size_t x = 0; x < n; ++x) {
      std::vector<bool> seen(n, false);
      std::vector<std::size_t> stack;
      for (std::size_t y = 0; y < n; ++y)
        if (occ[x][y] && !seen[y]) seen[y] = true, stack.push_back(y);
      while (!stack.empty()) {
        auto y = stack.back();
        stack.pop_back();
        for (std::size_t z = 0; z < n; ++z)
          if (occ[y][z] && !seen[z]) seen[z] = true, stack.push_back(z);
      }
      for (std::size_t y = 0; y < n; ++y) CHECK(g.derives(static_cast<int>(x), static_cast<int>(y)) == seen[y]);
    }
  }
}

TEST_CASE("property: ExtValue arithmetic") {
  std::mt19937_64 rng(3);
  auto sample = [&]() -> ExtValue {
    switch (rng() % 6) {
      case 0: return ExtValue::pos_inf();
      case 1: return ExtValue::neg_inf();
      default: return ExtValue(static_cast<Int>(rng() % 41) - 20);
    }
  };
  for (int i = 0; i < 2000; ++i) {
    ExtValue a = sample(), b = sample(), c = sample();
    int lt = (a < b) + (a == b) + (a > b);
    CHECK(lt == 1);
    bool mixed = [&] {
      std::vector<ExtValue> v{a, b, c};
      return std::any_of(v.begin(), v.end(), [](auto x) { return x.is_pos_inf(); }) &&
             std::any_of(v.begin(), v.end(), [](auto x) { return x.is_neg_inf(); });
    }();
    if (mixed) continue;
    CHECK(a + b == b + a);
    CHECK((a + b) + c == a + (b + c));
  }
  CHECK_THROWS(ExtValue::pos_inf() + ExtValue::neg_inf());
  CHECK(ExtValue::parse("+inf").is_pos_inf());
  CHECK(ExtValue(3).to_string() == "3");
}
