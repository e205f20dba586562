#include <random>

#include "doctest.h"
#include "presburger_oracle.hpp"

using namespace gvas::pres;

TEST_CASE("eliminate examples") {
  int x = fresh_var("x"), y = fresh_var("y");
  auto X = LinTerm::var(x), Y = LinTerm::var(y);
  Formula parity = eliminate(exists({x}, and_(eq(Y, 2 * X), ge(X, 0))));
  CHECK(free_vars(parity) == std::vector<int>{y});
  for (long v = -6; v <= 6; ++v) CHECK(evaluate(parity, {{y, v}}) == (v >= 0 && v % 2 == 0));
  CHECK(eliminate(exists({x}, and_(ge(X, Y), le(X, Y)))).is_true());
  CHECK(eliminate(exists({x}, eq(2 * X, 5))).is_false());
}

TEST_CASE("validity, satisfiability and models") {
  int x = fresh_var("x"), y = fresh_var("y");
  auto X = LinTerm::var(x), Y = LinTerm::var(y);
  CHECK(is_valid(forall({y}, exists({x}, ge(X, Y)))));
  CHECK_FALSE(is_sat(exists({x}, and_(ge(X, 0), le(X, -1)))));
  auto m = find_model(exists({x, y}, and_({eq(X + Y, 3), ge(X, 2), ge(Y, 0)})));
  REQUIRE(m);
  CHECK((*m)[x] + (*m)[y] == 3);
  CHECK((*m)[x] >= 2);
  CHECK((*m)[y] >= 0);
  CHECK_FALSE(find_model(exists({x}, and_(ge(X, 1), le(X, 0)))));
  CHECK(is_valid(forall_nat({x}, exists_nat({y}, eq(Y, X + 1)))));
  CHECK_FALSE(is_valid(forall_nat({x}, exists_nat({y}, eq(Y + 1, X)))));
}

TEST_CASE("resource cap is reported") {
  int x = fresh_var(), y = fresh_var(), z = fresh_var();
  auto X = LinTerm::var(x), Y = LinTerm::var(y), Z = LinTerm::var(z);
  Formula f = exists({x}, and_({le(Y, 3 * X), le(3 * X, Z), dvd(7, X + Y), dvd(5, X - Z)}));
  CHECK_THROWS_AS(eliminate(f, Limits{3}), PresburgerResourceExceeded);
}

TEST_CASE("property: elimination agrees with boxed brute force") {
  std::mt19937_64 rng(2024);
  int frees[4] = {fresh_var("a"), fresh_var("b"), fresh_var("c"), fresh_var("d")};
  for (int iter = 0; iter < 200; ++iter) {
    int nfree = 1 + iter % 3;
    pres_oracle::Gen gen{rng, std::vector<int>(frees, frees + nfree), 6};
    Formula f = gen.gen(3, 2);
    Formula q = eliminate(f);
    CHECK(free_vars(q).size() <= static_cast<std::size_t>(nfree));
    Assignment env;
    for (long a = -3; a <= 3; a += 2)
      for (long b = -3; b <= 3; b += 3) {
        env[frees[0]] = a;
        env[frees[1]] = b;
        env[frees[2]] = a - b;
        bool want = pres_oracle::eval_boxed(f, env, -6, 6);
        CHECK(evaluate(q, env) == want);
      }
  }
}

TEST_CASE("property: models substitute to true; negation laws") {
  std::mt19937_64 rng(77);
  for (int iter = 0; iter < 100; ++iter) {
    int a = fresh_var("a"), b = fresh_var("b");
    pres_oracle::Gen gen{rng, {a, b}, 5};
    Formula f = gen.gen(2, 1);
    auto m = find_model(f);
    CHECK(m.has_value() == is_sat(f));
    if (m) {
      Assignment env = *m;
      CHECK(pres_oracle::eval_boxed(f, env, -5, 5));
    }
    CHECK(is_valid(f) == is_valid(not_(not_(f))));
    CHECK(is_valid(f) == !is_sat(not_(f)));
  }
}
