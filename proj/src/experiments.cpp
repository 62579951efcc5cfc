#include "fastchain/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "fastchain/discrete_time.hpp"
#include "fastchain/eigentime.hpp"
#include "fastchain/error.hpp"
#include "fastchain/optimizer.hpp"
#include "fastchain/parallel.hpp"
#include "fastchain/random.hpp"

namespace fastchain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_short_cycle(const DirectedGraph& g, const Cycle& c) {
  if (c.length() < 2 || !c.admissible_for(g))
    throw Error(ErrorCode::InvalidInput, "short cycle is not admissible for the graph");
  if (static_cast<int>(c.length()) >= g.size())
    throw Error(ErrorCode::PreconditionViolation, "short cycle must miss at least one vertex");
}

}  // namespace

Generator build_cycle_tree_generator(const DirectedGraph& g, const Cycle& short_cycle,
                                     const std::vector<Arc>& tree_edges, double r) {
  require_short_cycle(g, short_cycle);
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::DomainError, "r must be positive");
  const int n = g.size();
  std::vector<int> out(static_cast<std::size_t>(n), -1);
  for (const auto& [x, y] : tree_edges) {
    if (x < 0 || x >= n || y < 0 || y >= n || x == y || !g.has_arc(x, y))
      throw Error(ErrorCode::InvalidTrees, "tree arc is not an arc of the graph");
    if (short_cycle.contains(x)) throw Error(ErrorCode::InvalidTrees, "tree arc leaves a cycle vertex");
    if (out[static_cast<std::size_t>(x)] != -1) throw Error(ErrorCode::InvalidTrees, "vertex has two tree arcs");
    out[static_cast<std::size_t>(x)] = y;
  }
  for (int x = 0; x < n; ++x) {
    if (short_cycle.contains(x)) continue;
    // Follow the tree arcs; they must hit the cycle within n steps.
    int v = x;
    int steps = 0;
    while (!short_cycle.contains(v) && steps <= n) {
      v = out[static_cast<std::size_t>(v)];
      if (v < 0) throw Error(ErrorCode::InvalidTrees, "vertex off the cycle lacks a tree arc");
      ++steps;
    }
    if (!short_cycle.contains(v)) throw Error(ErrorCode::InvalidTrees, "tree arcs do not lead to the cycle");
  }
  Matrix rates = Matrix::Zero(n, n);
  for (std::size_t l = 0; l < short_cycle.length(); ++l) rates(short_cycle[l], short_cycle.next(l)) = 1.0;
  for (const auto& [x, y] : tree_edges) rates(x, y) = r;
  return Generator::from_off_diagonal(std::move(rates));
}

std::vector<Arc> default_tree_edges(const DirectedGraph& g, const Cycle& short_cycle) {
  require_short_cycle(g, short_cycle);
  const int n = g.size();
  // Distances to the cycle along arcs, by breadth-first search on reversed arcs.
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::deque<int> queue;
  for (Vertex v : short_cycle.vertices()) {
    dist[static_cast<std::size_t>(v)] = 0;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int u = 0; u < n; ++u)
      if (dist[static_cast<std::size_t>(u)] < 0 && g.has_arc(u, v)) {
        dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
        queue.push_back(u);
      }
  }
  std::vector<Arc> edges;
  for (int x = 0; x < n; ++x) {
    if (dist[static_cast<std::size_t>(x)] == 0) continue;
    if (dist[static_cast<std::size_t>(x)] < 0) throw Error(ErrorCode::NotIrreducible, "vertex cannot reach the cycle");
    for (Vertex y : g.successors(x))
      if (dist[static_cast<std::size_t>(y)] == dist[static_cast<std::size_t>(x)] - 1) {
        edges.emplace_back(x, y);
        break;
      }
  }
  return edges;
}

ExtendedF extended_f(const Generator& L_r, const Cycle& short_cycle, double r) {
  ExtendedF out;
  out.spectrum = spectrum(L_r).values;
  std::complex<double> s = 0.0;
  for (const auto& lambda : out.spectrum) {
    s += 1.0 / lambda;
    if (std::abs(lambda - r) <= 1e-3 * r) ++out.r_multiplicity;
  }
  out.value = s.real();

  const int n = static_cast<int>(short_cycle.length());
  std::vector<std::complex<double>> expected;
  for (int k = 1; k < n; ++k) expected.push_back(1.0 - std::polar(1.0, 2.0 * M_PI * k / n));
  for (int k = n; k < L_r.size(); ++k) expected.emplace_back(r, 0.0);
  out.split_matches = match_multisets(out.spectrum, expected, 1e-6 * std::max(1.0, r)).matched;
  return out;
}

Generator perturbed_generator(const Generator& L_r, const DirectedGraph& g, double eps) {
  Matrix rates = L_r.rates();
  rates.diagonal().setZero();
  for (const auto& [x, y] : g.arcs()) rates(x, y) += eps;
  const auto L = Generator::from_off_diagonal(std::move(rates));
  return normalize(L, invariant_measure(L));
}

CounterexampleReport find_counterexample(const DirectedGraph& g) {
  if (!is_strongly_connected(g)) throw Error(ErrorCode::NotIrreducible, "graph is not strongly connected");
  const auto hams = enumerate_hamiltonian_cycles(g);
  if (hams.empty()) throw Error(ErrorCode::PreconditionViolation, "graph is not Hamiltonian");
  if (static_cast<int>(g.arc_count()) == g.size())
    throw Error(ErrorCode::PreconditionViolation, "graph is a Hamiltonian cycle");

  Cycle best;
  for (const auto& c : enumerate_simple_cycles(g))
    if (static_cast<int>(c.length()) < g.size() && (best.length() == 0 || c.length() < best.length())) best = c;
  const auto trees = default_tree_edges(g, best);

  for (double r = 10.0; r <= 1e8 * 1.5; r *= 10.0) {
    const auto L_r = build_cycle_tree_generator(g, best, trees, r);
    const double f_r = extended_f(L_r, best, r).value;
    for (double eps = 1e-1; eps >= 1e-8 / 1.5; eps /= 10.0) {
      CounterexampleReport rep;
      try {
        rep.generator = perturbed_generator(L_r, g, eps);
        rep.pi = invariant_measure(rep.generator);
        rep.f_perturbed = inverse_speed(rep.generator, rep.pi);
        double worst = kInf;
        for (const auto& h : hams) {
          const double v = inverse_speed(cycle_generator(rep.pi, h), rep.pi);
          rep.hamiltonian_values.push_back(v);
          worst = std::min(worst, v);
        }
        rep.margin = worst - rep.f_perturbed;
      } catch (const Error&) {
        // Tiny invariant weights can defeat the linear algebra; try the next point.
        continue;
      }
      if (rep.margin > 0.0) {
        rep.graph = g;
        rep.short_cycle = best;
        rep.tree_edges = trees;
        rep.r = r;
        rep.eps = eps;
        rep.f_unperturbed = f_r;
        rep.hamiltonian_cycles = hams;
        return rep;
      }
    }
  }
  throw Error(ErrorCode::SearchExhausted, "no counterexample on the 8x8 (r, eps) grid");
}

std::vector<EpsilonProbePoint> epsilon_convergence_probe(const DirectedGraph& g, const Cycle& short_cycle,
                                                         const std::vector<Arc>& tree_edges, double r,
                                                         const std::vector<double>& eps_values) {
  const auto L_r = build_cycle_tree_generator(g, short_cycle, tree_edges, r);
  const double f_r = extended_f(L_r, short_cycle, r).value;
  std::vector<EpsilonProbePoint> out;
  for (double eps : eps_values) {
    const auto L = perturbed_generator(L_r, g, eps);
    const double f = inverse_speed(L, invariant_measure(L));
    out.push_back({eps, f, std::abs(f - f_r)});
  }
  return out;
}

S2ClosedForm s2_closed_form(const Vector& weights) {
  if (weights.size() != 3) throw Error(ErrorCode::NotLength3, "segment law needs exactly 3 weights");
  if (!(weights.minCoeff() > 0.0)) throw Error(ErrorCode::NotPositive, "segment law must be positive");
  if (std::abs(weights.sum() - 1.0) > 1e-9) throw Error(ErrorCode::InvalidInput, "segment law must have unit mass");
  S2ClosedForm out;
  double x = weights[0], z = weights[2];
  if (std::abs(x - 0.5) < std::abs(z - 0.5)) {
    std::swap(x, z);
    out.relabeled = true;
  }
  const double sx = std::sqrt(x * (1.0 - x)), sz = std::sqrt(z * (1.0 - z));
  double p;
  if (x == z) {
    out.branch = "degenerate";
    p = 0.5;
    out.a = 1.0 / (4.0 * x);
    out.f_min = 8.0 * x * (1.0 - x);
  } else {
    out.branch = "generic";
    p = sx / (sx + sz);
    out.a = p / (2.0 * x);
    out.f_min = 2.0 * (sx + sz) * (sx + sz);
  }
  out.weight_01 = out.relabeled ? 1.0 - p : p;
  const ProbabilityVector pi(weights);
  CycleDecomposition d{{{Cycle({0, 1}), out.weight_01}, {Cycle({1, 2}), 1.0 - out.weight_01}}};
  out.generator = combine(d, pi);
  return out;
}

Theorem2Report theorem2_probe(const DirectedGraph& g, double perturbation_size, int trials, std::uint64_t seed) {
  const auto hams = enumerate_hamiltonian_cycles(g);
  if (hams.empty()) throw Error(ErrorCode::PreconditionViolation, "graph is not Hamiltonian");
  if (!(perturbation_size >= 0.0) || perturbation_size > 0.05)
    throw Error(ErrorCode::DomainError, "perturbation size must lie in [0, 0.05]");
  if (trials < 1) throw Error(ErrorCode::InvalidInput, "trials must be positive");
  const int n = g.size();

  Theorem2Report rep;
  rep.trials = trials;
  rep.details.resize(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    Rng rng(seed, t);
    Vector w;
    do {
      const auto d = rng.dirichlet(static_cast<std::size_t>(n));
      Vector dir(n);
      for (int i = 0; i < n; ++i) dir[i] = d[static_cast<std::size_t>(i)] - 1.0 / n;
      const double norm = dir.cwiseAbs().sum();
      const double radius = perturbation_size * rng.uniform();
      w = Vector::Constant(n, 1.0 / n);
      if (norm > 0.0) w += dir * (radius / norm);
    } while (w.minCoeff() <= 0.0);
    const auto pi = ProbabilityVector::from_unnormalized(w);
    const auto opt = frank_wolfe_minimize(g, pi);
    auto& out = rep.details[t];
    out.pi = pi.weights();
    out.f_min = opt.f_min;
    out.distance = kInf;
    const double scale = std::max(1.0, opt.minimizer.rates().cwiseAbs().maxCoeff());
    for (const auto& h : hams)
      out.distance = std::min(out.distance,
                              (opt.minimizer.rates() - cycle_generator(pi, h).rates()).cwiseAbs().maxCoeff() / scale);
    out.hamiltonian = out.distance <= 1e-6;
  });
  for (const auto& d : rep.details) rep.successes += d.hamiltonian ? 1 : 0;
  rep.success_fraction = static_cast<double>(rep.successes) / trials;
  return rep;
}

}  // namespace fastchain
