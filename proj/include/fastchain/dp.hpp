#pragma once

#include <cstdint>
#include <vector>

#include "fastchain/graph.hpp"

namespace fastchain {

using Mask = std::uint32_t;

inline constexpr int kMaxDpVertices = 20;
inline constexpr int kNoSuccessor = -1;
/// Budget-search objective averaged over every start i0 with A = V \ {i0}.
inline constexpr int kAllStarts = -1;

/// Cost-to-go over states (vertex i, still-unvisited set A), for every A.
/// Moving i -> j pays the current cost of state (i, A) and removes j from A.
struct ValueTable {
  int n = 0;
  int start = 0;
  Mask initial = 0;
  std::vector<double> values;   // index: mask * n + i
  std::vector<std::int8_t> policy;

  double at(int i, Mask a) const { return values[static_cast<std::size_t>(a) * n + i]; }
  int successor(int i, Mask a) const { return policy[static_cast<std::size_t>(a) * n + i]; }
  /// Value of the queried state (start, initial).
  double value() const { return at(start, initial); }
};

inline Mask full_mask(int n) { return n >= 32 ? ~Mask{0} : (Mask{1} << n) - 1; }

/// Discrete-time DP: V(i, A) = |A| + min_j V(j, A \ {j}) over successors j.
/// Throws StateSpaceTooLarge beyond kMaxDpVertices, NotIrreducible on a
/// graph that is not strongly connected.
ValueTable discrete_value_function(const DirectedGraph& g, int start, Mask target_set);

/// Continuous-time DP with per-vertex total rates a_i (positive, sum N):
/// V(i, A) = |A| / a_i + min_j V(j, A \ {j}). Throws BudgetInvalid.
ValueTable continuous_value_function(const DirectedGraph& g, int start, Mask target_set,
                                     const std::vector<double>& budgets);

struct BudgetSearchResult {
  std::vector<double> best_budgets;
  double best_value = 0.0;
  /// Objective at a_i = 1 for comparison.
  double unit_value = 0.0;
};

/// Objective used by the budget search: the continuous value from `start`
/// with A = V \ {start}, or its average over all starts for kAllStarts.
double budget_objective(const DirectedGraph& g, int start, const std::vector<double>& budgets);

/// Grid over the budget simplex followed by a shrinking pairwise pattern
/// search. N <= 6.
BudgetSearchResult optimal_budget_search(const DirectedGraph& g, int start = kAllStarts, int grid = 20);

/// Follows the policy from (table.start, table.initial) until A is empty.
std::vector<Vertex> extract_policy_path(const ValueTable& table);

}  // namespace fastchain
