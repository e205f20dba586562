#include <algorithm>
#include <random>
#include <set>

#include "corpus.hpp"
#include "doctest.h"
#include "gvas/oracle.hpp"

using namespace gvas;
using namespace gvas::oracle;

namespace {

std::vector<std::pair<Int, Int>> plain(const std::vector<ReachPair>& ps) {
  std::vector<std::pair<Int, Int>> out;
  for (const auto& p : ps) out.emplace_back(p.c, p.d);
  return out;
}

}  // namespace

TEST_CASE("run_word") {
  CHECK(run_word(2, {-1, -1, 1, 1, 1}) == ExtValue(3));
  CHECK(run_word(0, {-1}).is_neg_inf());
  CHECK(run_word(5, {}) == ExtValue(5));
}

TEST_CASE("enumerate_words") {
  auto mul = normalized(corpus::kMul);
  auto w = enumerate_words(mul, 0, 3);
  REQUIRE(w.size() == 2);
  CHECK(w[0].empty());
  CHECK(w[1] == Word{-1, 1, 1});

  auto ack = normalized(corpus::kAck1);
  CHECK(enumerate_words(ack, ack.grammar().find("X0"), 1) == std::vector<Word>{{1}});

  auto neg = normalized("S -> -1");
  auto wn = enumerate_words(neg, 0, 5);
  // Normalization pads to degree 2.
  REQUIRE(wn.size() == 1);
  CHECK(run_word(1, wn[0]) == ExtValue(0));

  auto blow = normalized("S -> S S | 1 | 0");
  CHECK_THROWS_AS(enumerate_words(blow, 0, 30, 1000), OracleBudgetExceeded);
}

TEST_CASE("reach_pairs examples") {
  auto mul = normalized(corpus::kMul);
  CHECK(plain(reach_pairs(mul, 0, 2)) ==
        std::vector<std::pair<Int, Int>>{{0, 0}, {1, 1}, {1, 2}, {2, 2}, {2, 3}, {2, 4}});
  auto eps = normalized(corpus::kEps);
  CHECK(plain(reach_pairs(eps, 0, 1)) == std::vector<std::pair<Int, Int>>{{0, 0}, {1, 1}});
  auto ack = normalized(corpus::kAck1);
  CHECK(plain(reach_pairs(ack, ack.grammar().find("X1"), 1)) == std::vector<std::pair<Int, Int>>{{0, 2}, {1, 3}});
}

TEST_CASE("property: word runs compose and are monotone") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    Word u, v;
    for (int k = static_cast<int>(rng() % 7); k > 0; --k) u.push_back(static_cast<Int>(rng() % 3) - 1);
    for (int k = static_cast<int>(rng() % 7); k > 0; --k) v.push_back(static_cast<Int>(rng() % 3) - 1);
    Int c = static_cast<Int>(rng() % 5);
    Word uv = u;
    uv.insert(uv.end(), v.begin(), v.end());
    ExtValue mid = run_word(c, u);
    ExtValue expect = mid.is_finite() ? run_word(mid.value(), v) : ExtValue::neg_inf();
    CHECK(run_word(c, uv) == expect);
    ExtValue d = run_word(c, uv);
    if (d.is_finite()) {
      Int e = static_cast<Int>(rng() % 5);
      CHECK(run_word(c + e, uv) == ExtValue(d.value() + e));
    }
  }
}

TEST_CASE("property: reach_pairs witnesses re-validate and match finite languages") {
  for (const auto& src : corpus::all()) {
    auto g = normalized(src);
    for (std::size_t x = 0; x < g.size(); ++x) {
      auto pairs = reach_pairs(g, static_cast<int>(x), 4, {14, 0, 2'000'000});
      for (const auto& p : pairs) CHECK(run_word(p.c, p.witness) == ExtValue(p.d));
      // Words up to length 14 give exactly the same pairs.
      auto words = enumerate_words(g, static_cast<int>(x), 14);
      std::set<std::pair<Int, Int>> brute;
      for (Int c = 0; c <= 4; ++c)
        for (const auto& w : words) {
          auto d = run_word(c, w);
          if (d.is_finite()) brute.insert({c, d.value()});
        }
      auto got = plain(pairs);
      CHECK(std::set<std::pair<Int, Int>>(got.begin(), got.end()) == brute);
    }
  }
}

TEST_CASE("property: reach_pairs is monotone in the budget") {
  auto g = normalized(corpus::kExp);
  auto small = plain(reach_pairs(g, g.grammar().start, 3, {8, 0, 1'000'000}));
  auto large = plain(reach_pairs(g, g.grammar().start, 3, {16, 0, 1'000'000}));
  for (const auto& p : small) CHECK(std::find(large.begin(), large.end(), p) != large.end());
  CHECK(large.size() > small.size());
}
