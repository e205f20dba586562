#ifndef GVAS_TESTS_HILBERT_ORACLE_HPP_
#define GVAS_TESTS_HILBERT_ORACLE_HPP_

#include <algorithm>
#include <cstdlib>
#include <set>
#include <vector>

#include "gvas/semilinear.hpp"

namespace hilbert_oracle {

using gvas::Int;
using gvas::Matrix;
using gvas::Rel;
using gvas::Vec;

// Every vector of N^n with entries <= b, in lexicographic order.
inline std::vector<Vec> all_vectors(std::size_t n, Int b) {
  std::vector<Vec> out;
  Vec v(n, 0);
  for (;;) {
    out.push_back(v);
    std::size_t i = 0;
    while (i < n && v[i] == b) v[i++] = 0;
    if (i == n) break;
    ++v[i];
  }
  return out;
}

inline bool satisfies(const Matrix& a, const std::vector<Rel>& rel, const Vec& x) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    Int s = 0;
    for (std::size_t j = 0; j < x.size(); ++j) s += a[i][j] * x[j];
    if (rel[i] == Rel::Eq ? s != 0 : s < 0) return false;
  }
  return true;
}

inline bool dominates(const Vec& a, const Vec& b) {  // a >= b, a != b
  if (a == b) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] < b[i]) return false;
  return true;
}

// Brute-force minimal nonzero solutions of an equality system among vectors
// with l1 norm <= n1.
inline std::set<Vec> brute_minimal(const Matrix& a, std::size_t n, Int n1) {
  std::vector<Vec> sols;
  for (const auto& x : all_vectors(n, n1)) {
    Int s = 0;
    for (Int c : x) s += c;
    if (s == 0 || s > n1) continue;
    if (satisfies(a, std::vector<Rel>(a.size(), Rel::Eq), x)) sols.push_back(x);
  }
  std::set<Vec> out;
  for (const auto& x : sols)
    if (std::none_of(sols.begin(), sols.end(), [&](const Vec& y) { return dominates(x, y); })) out.insert(x);
  return out;
}

// Minimal nonzero solutions of A x = 0 by enumeration.  Search box: entries
// up to max |a| for one equation, l1 norm up to (1 + max row l1)^rows
// otherwise.
inline std::set<Vec> brute_hilbert(const Matrix& a) {
  const std::size_t n = a.front().size();
  Int coef = 0, row_l1 = 0;
  for (const auto& row : a) {
    Int l1 = 0;
    for (Int x : row) {
      coef = std::max(coef, std::abs(x));
      l1 += std::abs(x);
    }
    row_l1 = std::max(row_l1, l1);
  }
  if (a.size() > 1) {
    Int bound = 1;
    for (std::size_t i = 0; i < a.size(); ++i) bound *= 1 + row_l1;
    return brute_minimal(a, n, bound);
  }
  std::vector<Vec> sols;
  for (const auto& x : all_vectors(n, std::max<Int>(coef, 1)))
    if (std::any_of(x.begin(), x.end(), [](Int v) { return v != 0; }) && satisfies(a, {Rel::Eq}, x))
      sols.push_back(x);
  std::set<Vec> out;
  for (const auto& x : sols)
    if (std::none_of(sols.begin(), sols.end(), [&](const Vec& y) { return dominates(x, y); })) out.insert(x);
  return out;
}

}  // namespace hilbert_oracle

#endif  // GVAS_TESTS_HILBERT_ORACLE_HPP_
