// Shared fixtures and independent oracles for the test binaries.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "fastchain/generator.hpp"
#include "fastchain/graph.hpp"
#include "fastchain/random.hpp"

namespace testsupport {

using fastchain::Cycle;
using fastchain::DirectedGraph;
using fastchain::Generator;
using fastchain::Matrix;
using fastchain::ProbabilityVector;
using fastchain::Rng;
using fastchain::Vector;

inline std::vector<int> random_permutation(Rng& rng, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(p[static_cast<std::size_t>(i)], p[rng.below(static_cast<std::uint64_t>(i + 1))]);
  return p;
}

/// Dirichlet draw mixed with uniform so no entry is tiny.
inline ProbabilityVector random_pi(Rng& rng, int n, double floor_mix = 0.1) {
  auto w = rng.dirichlet(static_cast<std::size_t>(n));
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = (1.0 - floor_mix) * w[static_cast<std::size_t>(i)] + floor_mix / n;
  return ProbabilityVector::from_unnormalized(v);
}

/// Random irreducible generator: a random Hamiltonian backbone plus random arcs.
inline Generator random_irreducible(Rng& rng, int n, double density = 0.5) {
  Matrix r = Matrix::Zero(n, n);
  const auto perm = random_permutation(rng, n);
  for (int i = 0; i < n; ++i)
    r(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>((i + 1) % n)]) = rng.uniform(0.2, 2.0);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (x != y && r(x, y) == 0.0 && rng.uniform() < density) r(x, y) = rng.uniform(0.05, 2.0);
  return Generator::from_off_diagonal(r);
}

struct Instance {
  Generator L;
  ProbabilityVector pi;
};

/// Random irreducible generator rescaled to unit equilibrium jump rate.
inline Instance random_normalized(Rng& rng, int n, double density = 0.5) {
  const Generator raw = random_irreducible(rng, n, density);
  const ProbabilityVector pi = fastchain::invariant_measure(raw);
  return {fastchain::normalize(raw, pi), pi};
}

/// Random Hamiltonian cycle through all of 0..n-1.
inline Cycle random_hamiltonian(Rng& rng, int n) { return Cycle(random_permutation(rng, n)); }

/// Random simple cycle of length >= 2 on 0..n-1.
inline Cycle random_cycle(Rng& rng, int n) {
  const int len = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
  auto p = random_permutation(rng, n);
  p.resize(static_cast<std::size_t>(len));
  return Cycle(p);
}

/// Random member of the normalized pi-invariant set: convex mix of cycle
/// generators, always including one Hamiltonian cycle.
inline Generator random_in_polytope(Rng& rng, const ProbabilityVector& pi, int extra_cycles = 3) {
  const int n = pi.size();
  std::vector<Cycle> cycles{random_hamiltonian(rng, n)};
  for (int k = 0; k < extra_cycles; ++k) cycles.push_back(random_cycle(rng, n));
  const auto w = rng.dirichlet(cycles.size());
  fastchain::CycleDecomposition d;
  for (std::size_t k = 0; k < cycles.size(); ++k) d.terms.push_back({cycles[k], w[k]});
  return fastchain::combine(d, pi);
}

/// E_x[tau_y] from the fundamental matrix Z = (Pi - L)^{-1}.
inline Matrix fundamental_hitting(const Generator& L, const ProbabilityVector& pi) {
  const int n = L.size();
  Matrix big_pi(n, n);
  for (int x = 0; x < n; ++x) big_pi.row(x) = pi.weights().transpose();
  const Matrix z = (big_pi - L.rates()).inverse();
  Matrix m(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) m(x, y) = (z(y, y) - z(x, y)) / pi[y];
  return m;
}

/// E_x[tau_y^2] from the killed sub-generator: m2 = 2 (-Q)^{-1} (-Q)^{-1} 1.
inline Matrix killed_second_moments(const Generator& L) {
  const int n = L.size();
  Matrix out = Matrix::Zero(n, n);
  for (int y = 0; y < n; ++y) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (i != y) idx.push_back(i);
    const int k = n - 1;
    Matrix q(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) q(a, b) = -L(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    const auto lu = q.partialPivLu();
    const Vector m1 = lu.solve(Vector::Ones(k));
    const Vector m2 = 2.0 * lu.solve(m1);
    for (int a = 0; a < k; ++a) out(idx[static_cast<std::size_t>(a)], y) = m2[a];
  }
  return out;
}

/// All simple cycles by brute force over vertex sequences starting at their minimum.
inline std::vector<Cycle> brute_force_cycles(const DirectedGraph& g) {
  const int n = g.size();
  std::set<Cycle> found;
  std::vector<int> path;
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int v) -> void {
    if (path.size() >= 2 && g.has_arc(v, path.front())) found.insert(Cycle(path));
    for (int w = path.front() + 1; w < n; ++w) {
      if (used[static_cast<std::size_t>(w)] || !g.has_arc(v, w)) continue;
      used[static_cast<std::size_t>(w)] = 1;
      path.push_back(w);
      self(self, w);
      path.pop_back();
      used[static_cast<std::size_t>(w)] = 0;
    }
  };
  for (int s = 0; s < n; ++s) {
    path = {s};
    used[static_cast<std::size_t>(s)] = 1;
    rec(rec, s);
    used[static_cast<std::size_t>(s)] = 0;
  }
  return {found.begin(), found.end()};
}

/// Random digraph with independent arc probability p.
inline DirectedGraph random_digraph(Rng& rng, int n, double p) {
  std::vector<fastchain::Arc> arcs;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (x != y && rng.uniform() < p) arcs.emplace_back(x, y);
  return DirectedGraph(n, arcs);
}

/// Brute-force search for a path from `start` visiting every vertex once.
inline bool has_hamiltonian_path_from(const DirectedGraph& g, int start, bool close_cycle = false) {
  const int n = g.size();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  auto go = [&](auto&& self, int v, int count) -> bool {
    if (count == n) return !close_cycle || g.has_arc(v, start);
    for (int w : g.successors(v)) {
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = 1;
      if (self(self, w, count + 1)) return true;
      seen[static_cast<std::size_t>(w)] = 0;
    }
    return false;
  };
  seen[static_cast<std::size_t>(start)] = 1;
  return go(go, start, 1);
}

/// Random strongly connected digraph without a Hamiltonian cycle.
inline DirectedGraph random_non_hamiltonian(Rng& rng, int n, double p) {
  for (;;) {
    auto g = random_digraph(rng, n, p);
    if (fastchain::is_strongly_connected(g) && !has_hamiltonian_path_from(g, 0, true)) return g;
  }
}

/// Uniform 3-cycle generator 0 -> 1 -> 2 -> 0.
inline Generator uniform_three_cycle() {
  return fastchain::cycle_generator(ProbabilityVector::uniform(3), Cycle({0, 1, 2}));
}

/// Simple random walk on Z_3: rate 1/2 to each neighbour.
inline Generator srw_z3() {
  Matrix r(3, 3);
  r << -1.0, 0.5, 0.5, 0.5, -1.0, 0.5, 0.5, 0.5, -1.0;
  return Generator(r);
}

}  // namespace testsupport
