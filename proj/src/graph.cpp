#include "fastchain/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <string>

#include "fastchain/error.hpp"

namespace fastchain {

DirectedGraph::DirectedGraph(int n, const std::vector<Arc>& arcs) : n_(n) {
  if (n <= 0) throw Error(ErrorCode::InvalidInput, "graph needs at least one vertex");
  const auto un = static_cast<std::size_t>(n);
  adjacency_.assign(un * un, 0);
  succ_.assign(un, {});
  for (const auto& [from, to] : arcs) {
    if (from < 0 || to < 0 || from >= n || to >= n) {
      throw Error(ErrorCode::InvalidInput,
                  "arc (" + std::to_string(from) + "," + std::to_string(to) + ") out of range");
    }
    if (from == to) continue;  // self-loops are implicit
    auto& cell = adjacency_[static_cast<std::size_t>(from) * un + static_cast<std::size_t>(to)];
    if (cell == 0) {
      cell = 1;
      ++arc_count_;
      succ_[static_cast<std::size_t>(from)].push_back(to);
    }
  }
  for (auto& s : succ_) std::sort(s.begin(), s.end());
}

bool DirectedGraph::has_arc(Vertex from, Vertex to) const {
  if (from < 0 || to < 0 || from >= n_ || to >= n_) return false;
  return adjacency_[static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) +
                    static_cast<std::size_t>(to)] != 0;
}

std::vector<Arc> DirectedGraph::arcs() const {
  std::vector<Arc> out;
  out.reserve(arc_count_);
  for (Vertex v = 0; v < n_; ++v)
    for (Vertex w : successors(v)) out.emplace_back(v, w);
  return out;
}

DirectedGraph complete_graph(int n) {
  std::vector<Arc> arcs;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) arcs.emplace_back(i, j);
  return DirectedGraph(n, arcs);
}

DirectedGraph cycle_graph(const std::vector<Vertex>& order) {
  const int n = static_cast<int>(order.size());
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < order.size(); ++i)
    arcs.emplace_back(order[i], order[(i + 1) % order.size()]);
  return DirectedGraph(n, arcs);
}

Cycle::Cycle(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) throw Error(ErrorCode::InvalidInput, "a cycle needs at least 2 vertices");
  std::vector<Vertex> sorted = vertices_;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0) throw Error(ErrorCode::InvalidInput, "negative vertex id in cycle");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(ErrorCode::InvalidInput, "cycle vertices must be distinct");
  auto first = std::min_element(vertices_.begin(), vertices_.end());
  std::rotate(vertices_.begin(), first, vertices_.end());
}

bool Cycle::contains(Vertex v) const {
  return std::find(vertices_.begin(), vertices_.end(), v) != vertices_.end();
}

bool Cycle::admissible_for(const DirectedGraph& g) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (!g.has_arc(vertices_[i], next(i))) return false;
  return true;
}

namespace {

std::vector<char> reachable_from(const DirectedGraph& g, Vertex root, bool reverse) {
  const int n = g.size();
  std::vector<std::vector<Vertex>> adj(static_cast<std::size_t>(n));
  for (Vertex v = 0; v < n; ++v)
    for (Vertex w : g.successors(v)) {
      if (reverse)
        adj[static_cast<std::size_t>(w)].push_back(v);
      else
        adj[static_cast<std::size_t>(v)].push_back(w);
    }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<Vertex> q;
  q.push(root);
  seen[static_cast<std::size_t>(root)] = 1;
  while (!q.empty()) {
    Vertex v = q.front();
    q.pop();
    for (Vertex w : adj[static_cast<std::size_t>(v)])
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        q.push(w);
      }
  }
  return seen;
}

}  // namespace

bool is_strongly_connected(const DirectedGraph& g) {
  if (g.size() <= 1) return true;
  auto fwd = reachable_from(g, 0, false);
  auto bwd = reachable_from(g, 0, true);
  return std::all_of(fwd.begin(), fwd.end(), [](char c) { return c != 0; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](char c) { return c != 0; });
}

// Johnson's circuit enumeration: for each start s, circuits through s in the
// subgraph induced by vertices >= s, with the blocked / B-list bookkeeping.
std::vector<Cycle> enumerate_simple_cycles(const DirectedGraph& g, std::size_t max_count) {
  if (max_count == 0) throw Error(ErrorCode::InvalidInput, "max_count must be positive");
  const int n = g.size();
  const auto un = static_cast<std::size_t>(n);
  std::vector<Cycle> out;
  std::vector<char> blocked(un, 0);
  std::vector<std::vector<Vertex>> b_lists(un);
  std::vector<Vertex> stack;

  std::function<void(Vertex)> unblock = [&](Vertex u) {
    blocked[static_cast<std::size_t>(u)] = 0;
    auto& bl = b_lists[static_cast<std::size_t>(u)];
    while (!bl.empty()) {
      Vertex w = bl.back();
      bl.pop_back();
      if (blocked[static_cast<std::size_t>(w)]) unblock(w);
    }
  };

  for (Vertex s = 0; s < n; ++s) {
    for (Vertex v = s; v < n; ++v) {
      blocked[static_cast<std::size_t>(v)] = 0;
      b_lists[static_cast<std::size_t>(v)].clear();
    }
    std::function<bool(Vertex)> circuit = [&](Vertex v) -> bool {
      bool found = false;
      stack.push_back(v);
      blocked[static_cast<std::size_t>(v)] = 1;
      for (Vertex w : g.successors(v)) {
        if (w < s) continue;
        if (w == s) {
          if (out.size() >= max_count)
            throw Error(ErrorCode::CycleBudgetExceeded,
                        "more than " + std::to_string(max_count) + " simple cycles");
          out.emplace_back(stack);
          found = true;
        } else if (!blocked[static_cast<std::size_t>(w)]) {
          if (circuit(w)) found = true;
        }
      }
      if (found) {
        unblock(v);
      } else {
        for (Vertex w : g.successors(v)) {
          if (w < s) continue;
          auto& bl = b_lists[static_cast<std::size_t>(w)];
          if (std::find(bl.begin(), bl.end(), v) == bl.end()) bl.push_back(v);
        }
      }
      stack.pop_back();
      return found;
    };
    circuit(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Cycle> enumerate_hamiltonian_cycles(const DirectedGraph& g) {
  const int n = g.size();
  std::vector<Cycle> out;
  if (n < 2) return out;
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  std::vector<Vertex> path{0};
  used[0] = 1;
  std::function<void(Vertex)> extend = [&](Vertex v) {
    if (static_cast<int>(path.size()) == n) {
      if (g.has_arc(v, 0)) out.emplace_back(path);
      return;
    }
    for (Vertex w : g.successors(v)) {
      if (used[static_cast<std::size_t>(w)]) continue;
      used[static_cast<std::size_t>(w)] = 1;
      path.push_back(w);
      extend(w);
      path.pop_back();
      used[static_cast<std::size_t>(w)] = 0;
    }
  };
  extend(0);
  std::sort(out.begin(), out.end());
  return out;
}

DirectedGraph hypercube_graph(int dim) {
  if (dim < 1 || dim > 16) throw Error(ErrorCode::DomainError, "hypercube dimension must be in [1,16]");
  const int n = 1 << dim;
  std::vector<Arc> arcs;
  for (int v = 0; v < n; ++v)
    for (int b = 0; b < dim; ++b) arcs.emplace_back(v, v ^ (1 << b));
  return DirectedGraph(n, arcs);
}

Cycle gray_code_cycle(int dim) {
  if (dim < 1 || dim > 16) throw Error(ErrorCode::DomainError, "hypercube dimension must be in [1,16]");
  const int n = 1 << dim;
  std::vector<Vertex> order(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k ^ (k >> 1);
  return Cycle(std::move(order));
}

std::size_t cyclic_distance(const Cycle& cycle, Vertex x, Vertex y) {
  const auto& vs = cycle.vertices();
  auto ix = std::find(vs.begin(), vs.end(), x);
  auto iy = std::find(vs.begin(), vs.end(), y);
  if (ix == vs.end() || iy == vs.end()) throw Error(ErrorCode::InvalidInput, "vertex not on cycle");
  const auto n = static_cast<std::ptrdiff_t>(vs.size());
  return static_cast<std::size_t>(((iy - ix) % n + n) % n);
}

}  // namespace fastchain
