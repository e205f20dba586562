#include <doctest.h>

#include <algorithm>
#include <set>

#include "corpus.hpp"
#include "gvas/oracle.hpp"
#include "gvas/thin.hpp"

using namespace gvas;

namespace {

std::set<std::pair<Int, Int>> box_of(const SemilinearSet& s, Int n) {
  std::set<std::pair<Int, Int>> out;
  for (const auto& p : points_in_box(s, n)) out.insert({p[0], p[1]});
  return out;
}

std::set<std::pair<Int, Int>> oracle_box(const NormalizedGvas& g, int x, Int n, std::size_t max_len) {
  std::set<std::pair<Int, Int>> out;
  for (const auto& p : oracle::reach_pairs(g, x, n, {static_cast<Int>(max_len), 0, 50'000'000}))
    if (p.d <= n) out.insert({p.c, p.d});
  return out;
}

std::set<Word> stripped(const std::vector<Word>& words) {
  std::set<Word> out;
  for (auto w : words) {
    std::erase(w, 0);
    out.insert(w);
  }
  return out;
}

std::string rules_text(const NormalizedGvas& g) { return to_text(g.grammar()); }

}  // namespace

TEST_CASE("to_simple examples") {
  auto mul = thin::to_simple(normalized(corpus::kMul));
  CHECK(rules_text(mul) == "start: S\nS -> -1 S1 1\nS1 -> 0 S 1\nS -> eps\n");
  auto id = normalized(corpus::kIdent);
  CHECK(rules_text(thin::to_simple(id)) == rules_text(id));
  CHECK(rules_text(thin::to_simple(normalized("S -> 1 1 S | eps"))) == "start: S\nS -> 1 S1 0\nS1 -> 1 S 0\nS -> eps\n");
  CHECK_THROWS_AS(thin::to_simple(normalized(corpus::kExp)), std::invalid_argument);
}

TEST_CASE("to_simple preserves languages") {
  for (const auto& c : corpus::thin()) {
    INFO(c.text);
    auto g = normalized(c.text);
    auto s = thin::to_simple(g);
    CHECK(structural_report(s).is_simple);
    // Padding only inserts 0 actions and at most doubles lengths.
    for (std::size_t x = 0; x < g.size(); ++x) {
      auto orig = stripped(oracle::enumerate_words(g, static_cast<int>(x), 9));
      auto wide = stripped(oracle::enumerate_words(s, static_cast<int>(x), 18));
      auto narrow = stripped(oracle::enumerate_words(s, static_cast<int>(x), 9));
      CHECK(std::includes(wide.begin(), wide.end(), orig.begin(), orig.end()));
      CHECK(std::includes(orig.begin(), orig.end(), narrow.begin(), narrow.end()));
    }
  }
}

TEST_CASE("gamma sets and action graph") {
  auto s = thin::to_simple(normalized(corpus::kMul));
  auto gamma = thin::gamma_set(s);
  CHECK(gamma.per_nonterminal[0].size() == 1);
  CHECK(gamma.per_nonterminal[1].empty());
  auto sg = thin::action_graph(s, 0);
  REQUIRE(sg.graph.edges.size() == 2);
  CHECK(sg.graph.edges[0].action == vas2::Action{-1, -1});
  CHECK(sg.graph.edges[1].action == vas2::Action{0, -1});
}

TEST_CASE("step_relation examples") {
  std::set<std::pair<Int, Int>> ident, mul;
  for (Int c = 0; c <= 10; ++c) {
    ident.insert({c, c});
    for (Int d = c; d <= std::min<Int>(10, 2 * c); ++d) mul.insert({c, d});
  }
  auto id = thin::to_simple(normalized(corpus::kIdent));
  CHECK(box_of(thin::step_relation(id, 0), 10) == ident);
  auto m = thin::to_simple(normalized(corpus::kMul));
  CHECK(box_of(thin::step_relation(m, 0), 10) == mul);
  CHECK(box_of(thin::step_relation(normalized(corpus::kEps), 0), 10) == ident);
  CHECK_THROWS_AS(thin::step_relation(normalized(corpus::kMul), 0), std::invalid_argument);
}

TEST_CASE("step_relation matches the oracle on the thin corpus") {
  for (const auto& c : corpus::thin()) {
    INFO(c.text);
    auto g = normalized(c.text);
    auto s = thin::to_simple(g);
    thin::StepRelations rel(s);
    for (std::size_t x = 0; x < g.size(); ++x) {
      INFO(g.name(static_cast<int>(x)));
      CHECK(box_of(rel.of(static_cast<int>(x)), 10) == oracle_box(g, static_cast<int>(x), 10, c.max_len));
    }
  }
}

TEST_CASE("memo shares sub-relations") {
  auto s = thin::to_simple(normalized("S -> A A ; A -> -1 A 1 | 0"));
  thin::StepRelations rel(s);
  rel.of(s.grammar().find("S"));
  CHECK(rel.kernel_calls() == 2);
}
