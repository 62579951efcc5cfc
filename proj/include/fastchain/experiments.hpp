#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "fastchain/generator.hpp"
#include "fastchain/graph.hpp"

namespace fastchain {

/// Unit rates along `short_cycle`, rate r on each tree arc. The tree arcs give
/// every vertex off the cycle exactly one outgoing arc, all leading to the
/// cycle. Not irreducible; throws InvalidTrees.
Generator build_cycle_tree_generator(const DirectedGraph& g, const Cycle& short_cycle,
                                     const std::vector<Arc>& tree_edges, double r);

/// One outgoing arc per vertex off the cycle, chosen along shortest paths to
/// the cycle (smallest target id on ties).
std::vector<Arc> default_tree_edges(const DirectedGraph& g, const Cycle& short_cycle);

struct ExtendedF {
  /// sum of 1 / lambda over the nonzero spectrum of -L_r.
  double value = 0.0;
  /// Number of eigenvalues found within 1e-3 r of r.
  int r_multiplicity = 0;
  /// Spectrum equals the pure-cycle spectrum plus r repeated (N - n) times.
  bool split_matches = false;
  std::vector<std::complex<double>> spectrum;
};

ExtendedF extended_f(const Generator& L_r, const Cycle& short_cycle, double r);

struct CounterexampleReport {
  DirectedGraph graph;
  Cycle short_cycle;
  std::vector<Arc> tree_edges;
  double r = 0.0;
  double eps = 0.0;
  ProbabilityVector pi;
  Generator generator;
  double f_perturbed = 0.0;
  double f_unperturbed = 0.0;
  std::vector<Cycle> hamiltonian_cycles;
  std::vector<double> hamiltonian_values;
  /// min_H F(L_H) - F(L_{r,eps}).
  double margin = 0.0;
};

/// (L_r + eps L_G) / Z with Z the normalizing constant for its own invariant law.
Generator perturbed_generator(const Generator& L_r, const DirectedGraph& g, double eps);

/// Geometric search r in 10..1e8, eps in 1e-1..1e-8 for a law under which
/// some compatible generator beats every Hamiltonian one. Throws
/// PreconditionViolation, NotIrreducible, SearchExhausted.
CounterexampleReport find_counterexample(const DirectedGraph& g);

struct EpsilonProbePoint {
  double eps = 0.0;
  double f = 0.0;
  /// |F(L_{r,eps}) - F(L_r)|.
  double difference = 0.0;
};

std::vector<EpsilonProbePoint> epsilon_convergence_probe(const DirectedGraph& g, const Cycle& short_cycle,
                                                         const std::vector<Arc>& tree_edges, double r,
                                                         const std::vector<double>& eps_values);

struct S2ClosedForm {
  Generator generator;
  double f_min = 0.0;
  /// "degenerate" when pi(0) = pi(2), otherwise "generic".
  std::string branch;
  /// Vertices 0 and 2 were exchanged internally.
  bool relabeled = false;
  /// Weight of the cycle (0, 1) in the original labels.
  double weight_01 = 0.0;
  /// Rate out of the relabeled end vertex.
  double a = 0.0;
};

/// Minimizer of F on the segment graph 0 <-> 1 <-> 2. Throws NotLength3,
/// NotPositive, InvalidInput (mass not 1).
S2ClosedForm s2_closed_form(const Vector& pi);

struct Theorem2Trial {
  Vector pi;
  double f_min = 0.0;
  /// Max rate difference to the nearest Hamiltonian generator.
  double distance = 0.0;
  bool hamiltonian = false;
};

struct Theorem2Report {
  int trials = 0;
  int successes = 0;
  double success_fraction = 0.0;
  std::vector<Theorem2Trial> details;
};

/// Draws laws within L1 distance `perturbation_size` of uniform and checks
/// that the optimizer lands on a Hamiltonian generator. Throws
/// PreconditionViolation, DomainError.
Theorem2Report theorem2_probe(const DirectedGraph& g, double perturbation_size, int trials, std::uint64_t seed);

}  // namespace fastchain
