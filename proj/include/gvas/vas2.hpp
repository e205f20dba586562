#ifndef GVAS_VAS2_HPP_
#define GVAS_VAS2_HPP_

// Reachability relations of 2-dimensional VAS restricted by a finite
// automaton, computed by accelerating cycles along path schemes.
// Relations are 4-dimensional: (c1, c2, d1, d2).

#include <array>
#include <string>
#include <vector>

#include "gvas/semilinear.hpp"

namespace gvas::vas2 {

using Action = std::array<Int, 2>;

// Grammar-derived graphs carry summed actions such as (-1, -2); anything
// beyond this magnitude is rejected.
inline constexpr Int kMaxAction = 1 << 20;

struct Edge {
  int src = 0;
  Action action{0, 0};
  int dst = 0;
};

struct ActionGraph {
  int states = 1;
  std::vector<Edge> edges;
  int source = 0;
};

/// sigma_0 theta_1 sigma_1 ... theta_k sigma_k; edge indices.
struct PathScheme {
  std::vector<std::vector<int>> paths;   // k + 1 entries
  std::vector<std::vector<int>> cycles;  // k entries
};

struct AccelCaps {
  int max_scheme_len = 6;  // pieces (edges or accelerated cycles) per scheme
  int max_rounds = 6;
  std::size_t max_cycles = 256;  // simple cycles per state
  // Presburger budget per stability check; an exhausted check counts as
  // "not yet stable" and saturation continues.
  std::size_t max_atoms = 20'000;
};

struct ReachSolution {
  std::vector<SemilinearSet> per_state;
  std::size_t schemes_used = 0;
  int rounds = 0;
  bool stable = false;
  std::string diagnostics;
};

/// {(c, c + sum w) : c >= m}, m the smallest start that keeps w enabled.
SemilinearSet word_relation(const std::vector<Action>& w);
/// Union over n >= 1 of the relations of w^n.
SemilinearSet cycle_plus(const std::vector<Action>& w);
/// Union over n >= 0.
SemilinearSet cycle_star(const std::vector<Action>& w);
/// Adds a to the target part, keeping it natural.
SemilinearSet step_image(const SemilinearSet& r, const Action& a);

std::vector<Action> actions_of(const ActionGraph& g, const std::vector<int>& edges);
SemilinearSet scheme_relation(const ActionGraph& g, const PathScheme& s);

/// Simple cycles through q, by length and then edge order.
std::vector<std::vector<int>> simple_cycles(const ActionGraph& g, int q, std::size_t cap);

ReachSolution reach_relations(const ActionGraph& g, const AccelCaps& caps = {});

/// identity is in R[source] and every edge maps R[src] into R[dst].
bool verify_stability(const ActionGraph& g, const std::vector<SemilinearSet>& r);

}  // namespace gvas::vas2

#endif  // GVAS_VAS2_HPP_
