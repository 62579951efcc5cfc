#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fastchain/graph.hpp"

namespace fastchain {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Tolerance for "is invariant" / "is normalized" membership checks.
inline constexpr double kMembershipTol = 1e-9;

/// Strictly positive probability vector on {0..N-1}.
class ProbabilityVector {
 public:
  ProbabilityVector() = default;
  /// Validates positivity and unit mass (1e-12); does not rescale.
  explicit ProbabilityVector(Vector weights);
  /// Rescales positive weights to unit mass.
  static ProbabilityVector from_unnormalized(const Vector& weights);
  static ProbabilityVector uniform(int n);

  int size() const noexcept { return static_cast<int>(weights_.size()); }
  double operator[](int i) const { return weights_[i]; }
  const Vector& weights() const noexcept { return weights_; }
  double min() const noexcept { return min_; }

 private:
  Vector weights_;
  double min_ = 0.0;
};

/// Markov generator: nonnegative off-diagonal rates, zero row sums.
class Generator {
 public:
  Generator() = default;
  /// Validates the generator invariants (row sums within 1e-12 relative to the row scale).
  explicit Generator(Matrix rates);
  /// Builds a generator from off-diagonal rates; the diagonal is overwritten.
  static Generator from_off_diagonal(Matrix rates);

  int size() const noexcept { return static_cast<int>(rates_.rows()); }
  const Matrix& rates() const noexcept { return rates_; }
  double operator()(int x, int y) const { return rates_(x, y); }
  /// Total jump rate L(x) = -L(x,x).
  double exit_rate(int x) const { return -rates_(x, x); }
  /// Graph of strictly positive off-diagonal rates.
  DirectedGraph support() const;
  bool is_irreducible() const;

  Generator scaled(double factor) const;

 private:
  Matrix rates_;
};

struct CycleTerm {
  Cycle cycle;
  double weight = 0.0;
};

/// Barycentric decomposition L = sum_A p(A) L_A.
struct CycleDecomposition {
  std::vector<CycleTerm> terms;
  double total_weight() const;
};

/// Extreme-point generator of a cycle: rate 1/(n pi(a_l)) along a_l -> a_{l+1}.
Generator cycle_generator(const ProbabilityVector& pi, const Cycle& cycle);

/// Unique invariant law of an irreducible generator. Throws NotIrreducible.
ProbabilityVector invariant_measure(const Generator& L);

/// sum_x pi(x) L(x): the equilibrium jump rate.
double equilibrium_jump_rate(const Generator& L, const ProbabilityVector& pi);
/// max_x |(pi L)(x)|.
double invariance_residual(const Generator& L, const ProbabilityVector& pi);

/// Rescales L so that sum_x pi(x) L(x) = 1. Throws ZeroGenerator.
Generator normalize(const Generator& L, const ProbabilityVector& pi);

/// Greedy cycle peeling on the flow matrix pi(x) L(x,y).
CycleDecomposition decompose_into_cycles(const Generator& L, const ProbabilityVector& pi);

Generator combine(const CycleDecomposition& d, const ProbabilityVector& pi);

bool is_compatible(const Generator& L, const DirectedGraph& g);

/// Throws NotInvariant / NotNormalized when L misses membership in the
/// normalized pi-invariant set by more than kMembershipTol.
void require_normalized_invariant(const Generator& L, const ProbabilityVector& pi);

}  // namespace fastchain
