#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace fastchain {

using Vertex = int;
using Arc = std::pair<Vertex, Vertex>;

/// Directed graph on vertices 0..n-1 without self-loops. Discrete-time
/// holding (self-loops) is always implicit and never stored.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  DirectedGraph(int n, const std::vector<Arc>& arcs);

  int size() const noexcept { return n_; }
  bool has_arc(Vertex from, Vertex to) const;
  const std::vector<Vertex>& successors(Vertex v) const { return succ_[static_cast<std::size_t>(v)]; }
  /// Arcs in lexicographic order.
  std::vector<Arc> arcs() const;
  std::size_t arc_count() const noexcept { return arc_count_; }

  friend bool operator==(const DirectedGraph& a, const DirectedGraph& b) {
    return a.n_ == b.n_ && a.adjacency_ == b.adjacency_;
  }

 private:
  int n_ = 0;
  std::size_t arc_count_ = 0;
  std::vector<std::uint8_t> adjacency_;
  std::vector<std::vector<Vertex>> succ_;
};

/// Complete directed graph K_n.
DirectedGraph complete_graph(int n);
/// The graph whose only arcs are those of the given vertex order read cyclically.
DirectedGraph cycle_graph(const std::vector<Vertex>& order);

/// A simple directed cycle, stored rotated so that it starts at its smallest vertex.
class Cycle {
 public:
  Cycle() = default;
  explicit Cycle(std::vector<Vertex> vertices);

  std::size_t length() const noexcept { return vertices_.size(); }
  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  Vertex operator[](std::size_t i) const { return vertices_[i % vertices_.size()]; }
  /// Successor of position i, indices read modulo the length.
  Vertex next(std::size_t i) const { return vertices_[(i + 1) % vertices_.size()]; }
  bool contains(Vertex v) const;
  bool admissible_for(const DirectedGraph& g) const;

  friend bool operator==(const Cycle& a, const Cycle& b) { return a.vertices_ == b.vertices_; }
  friend bool operator<(const Cycle& a, const Cycle& b) { return a.vertices_ < b.vertices_; }

 private:
  std::vector<Vertex> vertices_;
};

inline constexpr std::size_t kDefaultCycleBudget = 100000;

bool is_strongly_connected(const DirectedGraph& g);

/// All simple directed cycles of length >= 2, canonical rotation, lexicographic
/// order. Throws CycleBudgetExceeded when more than `max_count` exist.
std::vector<Cycle> enumerate_simple_cycles(const DirectedGraph& g,
                                           std::size_t max_count = kDefaultCycleBudget);

/// All admissible Hamiltonian cycles, lexicographic order. Empty iff g is not Hamiltonian.
std::vector<Cycle> enumerate_hamiltonian_cycles(const DirectedGraph& g);

/// Bidirected discrete cube {0,1}^dim, vertex ids read as bit strings.
DirectedGraph hypercube_graph(int dim);
/// Reflected Gray code k -> k ^ (k >> 1), a Hamiltonian cycle of the cube.
Cycle gray_code_cycle(int dim);

/// Forward steps along the cycle from x to y.
std::size_t cyclic_distance(const Cycle& cycle, Vertex x, Vertex y);

}  // namespace fastchain
