#pragma once

#include <complex>
#include <vector>

#include "fastchain/generator.hpp"
#include "fastchain/graph.hpp"

namespace fastchain {

/// Row-stochastic matrix; self-loops allowed.
class Kernel {
 public:
  Kernel() = default;
  /// Validates nonnegative entries and unit row sums (1e-12).
  explicit Kernel(Matrix entries);

  int size() const noexcept { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const noexcept { return entries_; }
  double operator()(int x, int y) const { return entries_(x, y); }
  /// Graph of strictly positive off-diagonal entries.
  DirectedGraph support() const;
  bool is_irreducible() const;
  bool has_zero_diagonal_entry() const;

 private:
  Matrix entries_;
};

/// Discrete hitting times E_x[tau_y] with tau_y = inf{n >= 0 : X_n = y}.
/// Column y holds the target. Throws NotIrreducible.
Matrix discrete_hitting_times(const Kernel& K);

/// sum_{x,y} pi(x) pi(y) E_x[tau_y] from the hitting-time systems.
/// Throws NotInvariant, NotIrreducible.
double frak_f(const Kernel& K, const ProbabilityVector& pi);

/// Spectrum of K with the eigenvalue 1 removed, sorted by (real, imag).
std::vector<std::complex<double>> kernel_spectrum(const Kernel& K);

/// sum over the non-unit spectrum of 1 / (1 - theta).
double frak_f_spectral(const Kernel& K);

/// trace((I - K + Pi)^-1) with Pi the matrix whose rows all equal pi.
/// Throws SingularMatrix.
double hunter_trace(const Kernel& K, const ProbabilityVector& pi);

struct PhiResult {
  Kernel kernel;
  /// Largest exit rate of L.
  double l = 0.0;
};

/// K = I + L / l with l = max_x L(x).
PhiResult phi_map(const Generator& L);

struct PsiResult {
  Generator generator;
  /// 1 / sum_x pi(x) (1 - K(x, x)).
  double k = 0.0;
};

/// L = k (K - I). Throws IdentityKernel.
PsiResult psi_map(const Kernel& K, const ProbabilityVector& pi);

struct MultisetMatch {
  bool matched = false;
  double max_distance = 0.0;
};

/// Greedy nearest-neighbour pairing of two complex multisets.
MultisetMatch match_multisets(const std::vector<std::complex<double>>& a,
                              const std::vector<std::complex<double>>& b, double tol = 1e-7);

struct DiscreteWedge {
  double value = 0.0;
  Kernel minimizer;
};

/// Heuristic infimum of frak_f over kernels compatible with g: minimizes
/// l(L) F(L) over cycle weights by pairwise pattern search from several
/// starts, with a grid backup when g has at most 6 cycles.
DiscreteWedge frak_f_wedge(const DirectedGraph& g, const ProbabilityVector& pi);

struct WedgeComparison {
  double f_wedge = 0.0;
  double frak_f_wedge = 0.0;
  /// frak_f_wedge - f_wedge.
  double gap = 0.0;
  Kernel discrete_minimizer;
};

WedgeComparison compare_wedges(const DirectedGraph& g, const ProbabilityVector& pi);

}  // namespace fastchain
