#include "fastchain/dp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "fastchain/error.hpp"

namespace fastchain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const DirectedGraph& g, int start, Mask target_set) {
  const int n = g.size();
  if (n < 1) throw Error(ErrorCode::InvalidInput, "dp: empty graph");
  if (n > kMaxDpVertices)
    throw Error(ErrorCode::StateSpaceTooLarge, "dp: " + std::to_string(n) + " vertices exceed the limit of " +
                                                   std::to_string(kMaxDpVertices));
  if (start < 0 || start >= n) throw Error(ErrorCode::InvalidInput, "dp: start vertex out of range");
  if ((target_set & ~full_mask(n)) != 0) throw Error(ErrorCode::InvalidInput, "dp: target set has foreign bits");
  if (!is_strongly_connected(g)) throw Error(ErrorCode::NotIrreducible, "dp: graph is not strongly connected");
}

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

// Solves every mask in order of increasing popcount. Within one mask, moves
// to already-visited vertices keep the mask, so the layer is a shortest-path
// problem with node cost cost(i, |A|) and exits into smaller masks.
template <class Cost>
ValueTable solve(const DirectedGraph& g, int start, Mask target_set, Cost cost) {
  const int n = g.size();
  ValueTable t;
  t.n = n;
  t.start = start;
  t.initial = target_set;
  const std::size_t masks = std::size_t{1} << n;
  t.values.assign(masks * static_cast<std::size_t>(n), 0.0);
  t.policy.assign(masks * static_cast<std::size_t>(n), static_cast<std::int8_t>(kNoSuccessor));

  std::vector<Mask> order(masks);
  for (std::size_t m = 0; m < masks; ++m) order[m] = static_cast<Mask>(m);
  std::stable_sort(order.begin(), order.end(),
                   [](Mask a, Mask b) { return std::popcount(a) < std::popcount(b); });

  std::vector<double> d(static_cast<std::size_t>(n));
  std::vector<char> done(static_cast<std::size_t>(n));
  auto idx = [n](Mask a, int i) { return static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i); };

  for (Mask a : order) {
    if (a == 0) continue;
    const int size = std::popcount(a);
    auto in = [a](int v) { return (a >> v) & 1U; };
    auto exit_value = [&](int j) { return t.values[idx(a & ~(Mask{1} << j), j)]; };

    for (int i = 0; i < n; ++i) {
      done[static_cast<std::size_t>(i)] = 0;
      d[static_cast<std::size_t>(i)] = kInf;
      if (in(i)) continue;
      double best = kInf;
      for (Vertex j : g.successors(i))
        if (j != i && in(j)) best = std::min(best, exit_value(j));
      d[static_cast<std::size_t>(i)] = cost(i, size) + best;
    }
    // Dijkstra over the vertices outside A.
    for (;;) {
      int u = -1;
      for (int i = 0; i < n; ++i)
        if (!in(i) && !done[static_cast<std::size_t>(i)] &&
            (u < 0 || d[static_cast<std::size_t>(i)] < d[static_cast<std::size_t>(u)]))
          u = i;
      if (u < 0 || d[static_cast<std::size_t>(u)] == kInf) break;
      done[static_cast<std::size_t>(u)] = 1;
      for (int p = 0; p < n; ++p) {
        if (in(p) || done[static_cast<std::size_t>(p)] || p == u || !g.has_arc(p, u)) continue;
        d[static_cast<std::size_t>(p)] = std::min(d[static_cast<std::size_t>(p)], cost(p, size) + d[static_cast<std::size_t>(u)]);
      }
    }

    auto target_of = [&](int j) { return in(j) ? exit_value(j) : d[static_cast<std::size_t>(j)]; };
    for (int i = 0; i < n; ++i) {
      double best = kInf;
      for (Vertex j : g.successors(i))
        if (j != i) best = std::min(best, target_of(j));
      const double value = in(i) ? cost(i, size) + best : d[static_cast<std::size_t>(i)];
      int choice = kNoSuccessor;
      for (Vertex j : g.successors(i))
        if (j != i && nearly_equal(target_of(j), best)) {
          choice = j;
          break;
        }
      t.values[idx(a, i)] = value;
      t.policy[idx(a, i)] = static_cast<std::int8_t>(choice);
    }
  }
  return t;
}

}  // namespace

ValueTable discrete_value_function(const DirectedGraph& g, int start, Mask target_set) {
  validate(g, start, target_set);
  return solve(g, start, target_set, [](int, int size) { return static_cast<double>(size); });
}

ValueTable continuous_value_function(const DirectedGraph& g, int start, Mask target_set,
                                     const std::vector<double>& budgets) {
  validate(g, start, target_set);
  const int n = g.size();
  if (static_cast<int>(budgets.size()) != n)
    throw Error(ErrorCode::BudgetInvalid, "budgets: expected " + std::to_string(n) + " entries");
  double total = 0.0;
  for (double b : budgets) {
    if (!(b > 0.0) || !std::isfinite(b)) throw Error(ErrorCode::BudgetInvalid, "budgets must be positive and finite");
    total += b;
  }
  if (std::abs(total - n) > 1e-9)
    throw Error(ErrorCode::BudgetInvalid, "budgets must sum to N, got " + std::to_string(total));
  return solve(g, start, target_set,
               [&budgets](int i, int size) { return size / budgets[static_cast<std::size_t>(i)]; });
}

double budget_objective(const DirectedGraph& g, int start, const std::vector<double>& budgets) {
  const int n = g.size();
  const Mask all = full_mask(n);
  if (start != kAllStarts) return continuous_value_function(g, start, all & ~(Mask{1} << start), budgets).value();
  const auto table = continuous_value_function(g, 0, all & ~Mask{1}, budgets);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += table.at(i, all & ~(Mask{1} << i));
  return sum / n;
}

BudgetSearchResult optimal_budget_search(const DirectedGraph& g, int start, int grid) {
  const int n = g.size();
  if (n > 6) throw Error(ErrorCode::StateSpaceTooLarge, "budget search supports at most 6 vertices");
  if (start != kAllStarts && (start < 0 || start >= n)) throw Error(ErrorCode::InvalidInput, "start out of range");
  if (grid < n) throw Error(ErrorCode::InvalidInput, "grid must be at least the number of vertices");

  BudgetSearchResult res;
  res.unit_value = budget_objective(g, start, std::vector<double>(static_cast<std::size_t>(n), 1.0));
  res.best_value = kInf;

  // Compositions of `grid` into n positive parts.
  std::vector<int> parts(static_cast<std::size_t>(n), 1);
  std::vector<double> a(static_cast<std::size_t>(n));
  auto visit = [&](auto&& self, int k, int left) -> void {
    if (k == n - 1) {
      parts[static_cast<std::size_t>(k)] = left;
      for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = static_cast<double>(n) * parts[static_cast<std::size_t>(i)] / grid;
      const double v = budget_objective(g, start, a);
      if (v < res.best_value) {
        res.best_value = v;
        res.best_budgets = a;
      }
      return;
    }
    for (int p = 1; p <= left - (n - 1 - k); ++p) {
      parts[static_cast<std::size_t>(k)] = p;
      self(self, k + 1, left - p);
    }
  };
  visit(visit, 0, grid);

  // Pairwise transfers of budget with a shrinking step.
  std::vector<double> best = res.best_budgets;
  for (double step = static_cast<double>(n) / grid; step > 1e-9; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          if (p == q || best[static_cast<std::size_t>(q)] - step <= 0.0) continue;
          auto trial = best;
          trial[static_cast<std::size_t>(p)] += step;
          trial[static_cast<std::size_t>(q)] -= step;
          double total = 0.0;
          for (double x : trial) total += x;
          trial[static_cast<std::size_t>(p)] += n - total;
          const double v = budget_objective(g, start, trial);
          if (v < res.best_value - 1e-15) {
            res.best_value = v;
            best = trial;
            improved = true;
          }
        }
    }
  }
  res.best_budgets = best;
  return res;
}

std::vector<Vertex> extract_policy_path(const ValueTable& table) {
  std::vector<Vertex> path{table.start};
  int i = table.start;
  Mask a = table.initial;
  const std::size_t limit = static_cast<std::size_t>(table.n) * static_cast<std::size_t>(table.n) + 1;
  while (a != 0 && path.size() <= limit) {
    const int j = table.successor(i, a);
    if (j == kNoSuccessor) break;
    path.push_back(j);
    a &= ~(Mask{1} << j);
    i = j;
  }
  return path;
}

}  // namespace fastchain
