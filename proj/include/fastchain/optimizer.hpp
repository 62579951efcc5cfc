#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fastchain/generator.hpp"
#include "fastchain/graph.hpp"

namespace fastchain {

struct OptimizeOptions {
  double tol = 1e-8;
  int max_iters = 10000;
  std::uint64_t seed = 0;
  /// Random Dirichlet starts on top of the uniform start.
  int restarts = 8;
  std::size_t cycle_budget = kDefaultCycleBudget;
};

struct CertificateEntry {
  Cycle cycle;
  double h = 0.0;
  /// H_A(L) - F(L).
  double gap = 0.0;
  /// Every arc of the cycle carries positive rate in L.
  bool below = false;
};

/// First-order optimality data: H_A = F on cycles below L, H_A <= F elsewhere.
struct StationarityReport {
  double f = 0.0;
  std::vector<CertificateEntry> entries;
  /// Worst violation: |H_A - F| below L, max(H_A - F, 0) otherwise.
  double max_gap = 0.0;
};

struct OptimizeReport {
  Generator minimizer;
  std::vector<Cycle> cycles;
  std::vector<double> weights;
  double f_min = 0.0;
  StationarityReport certificate;
  int iterations = 0;
  bool converged = false;
  /// max_A H_A(L) - F(L) at the returned point.
  double fw_gap = 0.0;
};

struct EpsilonNeighborhood {
  double eps1 = 0.0;
  double eps2 = 0.0;
  double eps = 0.0;
};

/// sum_A w_A L_A.
Generator combine_weights(const std::vector<Cycle>& cycles, const std::vector<double>& weights,
                          const ProbabilityVector& pi);

/// F of the given rates, or +inf when the support is not strongly connected.
double f_or_infinity(const Matrix& rates, const ProbabilityVector& pi);

/// One pairwise Frank-Wolfe run from the given weights.
OptimizeReport frank_wolfe_run(const std::vector<Cycle>& cycles, const ProbabilityVector& pi,
                               std::vector<double> start, const OptimizeOptions& opts);

/// Multi-start pairwise Frank-Wolfe over the cycle weights of g. Throws
/// CycleBudgetExceeded; a run that stops early is reported with converged = false.
OptimizeReport frank_wolfe_minimize(const DirectedGraph& g, const ProbabilityVector& pi,
                                    const OptimizeOptions& opts = {});

/// Grid scan of the weight simplex (at most 6 cycles), optionally refined by a
/// shrinking pairwise pattern search around the best grid point.
OptimizeReport brute_force_minimize(const DirectedGraph& g, const ProbabilityVector& pi, int grid_resolution,
                                    bool zoom = false);

StationarityReport stationarity_check(const Generator& L, const ProbabilityVector& pi,
                                      const std::vector<Cycle>& cycles);

EpsilonNeighborhood epsilon_neighborhood(int n, double pi_min);

/// Best of multi-start Frank-Wolfe and, with at most 6 cycles, the zoomed grid.
double f_wedge(const DirectedGraph& g, const ProbabilityVector& pi, const OptimizeOptions& opts = {});

}  // namespace fastchain
