#ifndef GVAS_SEMILINEAR_HPP_
#define GVAS_SEMILINEAR_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gvas/ext_value.hpp"
#include "gvas/presburger.hpp"

namespace gvas {

using Vec = std::vector<Int>;
using Matrix = std::vector<Vec>;

/// base + N-span(periods), all vectors natural.
struct LinearSet {
  Vec base;
  std::vector<Vec> periods;

  friend bool operator==(const LinearSet&, const LinearSet&) = default;
};

struct SemilinearSet {
  std::size_t dim = 0;
  std::vector<LinearSet> components;  // empty list: the empty set

  static SemilinearSet empty(std::size_t dim) { return {dim, {}}; }
  static SemilinearSet point(const Vec& v) { return {v.size(), {{v, {}}}}; }
  static SemilinearSet linear(LinearSet l) {
    std::size_t d = l.base.size();
    return {d, {std::move(l)}};
  }
  /// All of N^dim.
  static SemilinearSet universe(std::size_t dim);
  /// {(c, c) : c in N^k}, a relation of dimension 2k.
  static SemilinearSet identity(std::size_t k);

  bool is_empty() const { return components.empty(); }
  friend bool operator==(const SemilinearSet&, const SemilinearSet&) = default;
};

class SemilinearExplosion : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Rel { Eq, Ge };

struct HilbertCaps {
  std::size_t max_frontier = 200'000;
};

/// Generators of the natural solutions of A x rel 0.  For pure equality
/// systems these are exactly the minimal nonzero solutions; with >= rows the
/// result is the irreducible generating set of the solution monoid, which
/// may contain comparable vectors (x1 - x2 >= 0 gives (1,0) and (1,1)).
std::vector<Vec> hilbert_basis(const Matrix& a, const std::vector<Rel>& rel, const HilbertCaps& caps = {});

struct LinSolution {
  std::vector<Vec> particulars;
  std::vector<Vec> homogeneous;
};

/// Natural solutions of A x rel b, as the union over particulars p of
/// p + N-span(homogeneous).
LinSolution lin_solve(const Matrix& a, const std::vector<Rel>& rel, const Vec& b, const HilbertCaps& caps = {});

/// Coordinates of two sets that must agree, and the coordinates to keep:
/// (0, i) is coordinate i of the first set, (1, j) coordinate j of the second.
struct JoinSpec {
  std::vector<std::pair<std::size_t, std::size_t>> equal;
  std::vector<std::pair<int, std::size_t>> keep;
};

SemilinearSet join(const SemilinearSet& s1, const SemilinearSet& s2, const JoinSpec& spec);

SemilinearSet unite(const SemilinearSet& s1, const SemilinearSet& s2);
SemilinearSet intersect(const SemilinearSet& s1, const SemilinearSet& s2);
/// {(c, e) : exists d, (c, d) in r1 and (d, e) in r2}; both of dimension 2k.
SemilinearSet compose(const SemilinearSet& r1, const SemilinearSet& r2);
/// Keeps the listed coordinates, in order.
SemilinearSet project(const SemilinearSet& s, const std::vector<std::size_t>& dims);
/// {x + v : x in s, x + v >= 0}.
SemilinearSet translate(const SemilinearSet& s, const Vec& v);
/// {x in s : x_j >= lower_j for all j}.
SemilinearSet guard(const SemilinearSet& s, const Vec& lower);
/// Cartesian product.
SemilinearSet product(const SemilinearSet& s1, const SemilinearSet& s2);

/// Drops zero and redundant periods and components contained in others.
SemilinearSet simplify(const SemilinearSet& s);

bool member(const LinearSet& l, const Vec& v);
bool member(const SemilinearSet& s, const Vec& v);
/// denotation(inner) is a subset of denotation(outer).
bool includes(const SemilinearSet& outer, const SemilinearSet& inner, const pres::Limits& lim = {});
/// Same question without the Presburger fallback; nullopt when undecided.
std::optional<bool> try_includes(const SemilinearSet& outer, const SemilinearSet& inner);
bool is_empty(const SemilinearSet& s);

/// sup{d : exists c <= n, (c, d) in r} for a relation of dimension 2.
ExtValue max_second_given_first_leq(const SemilinearSet& r, Int n);

/// Membership formula over the given variables (one per coordinate).
pres::Formula to_formula(const SemilinearSet& s, const std::vector<int>& vars);

/// Every point of s inside [0, bound]^dim.
std::vector<Vec> points_in_box(const SemilinearSet& s, Int bound);

std::string to_json(const SemilinearSet& s);
SemilinearSet semilinear_from_json(const std::string& text);

}  // namespace gvas

#endif  // GVAS_SEMILINEAR_HPP_
