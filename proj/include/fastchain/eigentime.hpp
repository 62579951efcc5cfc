#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "fastchain/generator.hpp"

namespace fastchain {

/// Nonzero eigenvalues of -L with multiplicity, sorted by (real, imag).
struct Spectrum {
  std::vector<std::complex<double>> values;
};

/// Solves L g = rhs with g(anchor) = 0 for an irreducible generator. One LU
/// factorization per anchor is kept so repeated solves are cheap.
class PoissonSolver {
 public:
  explicit PoissonSolver(const Generator& L);

  int size() const noexcept { return n_; }
  /// Does not check centering; see poisson_solve for the checked entry point.
  Vector solve(const Vector& rhs, int anchor) const;

 private:
  int n_ = 0;
  std::vector<Eigen::PartialPivLU<Matrix>> lu_;
};

/// Hitting-time moments of an irreducible generator together with the
/// quantities derived from them. Columns are indexed by the target:
/// hitting()(x, y) = E_x[tau_y].
class HittingAnalysis {
 public:
  HittingAnalysis(const Generator& L, const ProbabilityVector& pi);

  const Generator& generator() const noexcept { return L_; }
  const ProbabilityVector& pi() const noexcept { return pi_; }
  const PoissonSolver& solver() const noexcept { return solver_; }

  /// phi_y(x) = E_x[tau_y].
  const Matrix& hitting() const noexcept { return hitting_; }
  /// E_x[tau_y^2].
  const Matrix& second_moments() const noexcept { return second_; }
  /// Solution of L u = phi_y - pi[phi_y], u(y) = 0, stored in column y.
  const Matrix& centered_potential() const noexcept { return potential_; }
  /// h_L(x, y) = E_y[tau_x^2]/2 - E_pi[tau_x] E_y[tau_x].
  const Matrix& h() const noexcept { return h_; }
  /// pi[phi_y] = E_pi[tau_y].
  const Vector& mean_hitting() const noexcept { return mean_hitting_; }
  double f_value() const noexcept { return f_; }
  /// max_{x,y} E_x[tau_y].
  double m_bound() const noexcept { return hitting_.maxCoeff(); }

 private:
  Generator L_;
  ProbabilityVector pi_;
  PoissonSolver solver_;
  Matrix hitting_;
  Matrix second_;
  Matrix potential_;
  Matrix h_;
  Vector mean_hitting_;
  double f_ = 0.0;
};

struct HittingReport {
  Matrix expectations;
  Matrix second_moments;
  double kemeny = 0.0;
  double f_value = 0.0;
  Matrix h_matrix;
};

struct SpectralPair {
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ReturnTimeIdentities {
  /// sum_z pi(z) E_y[tau_z], the Kemeny constant seen from start y.
  double lhs3 = 0.0;
  /// sum 1/lambda.
  double rhs3 = 0.0;
  /// sum_z pi(z) E_y[T_z] with T the first return after the first jump.
  double lhs4 = 0.0;
  /// 1 + sum 1/lambda.
  double rhs4 = 0.0;
  /// pi(y) E_y[T_y]; equals 1/L(y), so lhs4 - rhs4 = 1/L(y) - 1.
  double kac_return = 0.0;
  /// sum_x pi(x) E_x[tau_y], the target-indexed average (depends on y in general).
  double target_average = 0.0;
};

struct SimulationResult {
  double mean = 0.0;
  double second_moment = 0.0;
  double std_error = 0.0;
  double second_moment_std_error = 0.0;
  std::uint64_t samples = 0;
};

/// The 1_{y}/pi(y) - 1 right-hand side of the hitting-time Poisson equation.
Vector hitting_rhs(const ProbabilityVector& pi, int y);

Vector poisson_solve(const Generator& L, const ProbabilityVector& pi, const Vector& rhs, int anchor);
Matrix expected_hitting_times(const Generator& L, const ProbabilityVector& pi);
/// F(L) = sum_{x,y} pi(x) pi(y) E_x[tau_y].
double inverse_speed(const Generator& L, const ProbabilityVector& pi);

Spectrum spectrum(const Generator& L);
double eigentime_spectral(const Generator& L);

Matrix second_moment_hitting(const Generator& L, const ProbabilityVector& pi);
Matrix h_matrix(const Generator& L, const ProbabilityVector& pi);
/// Same matrix read off as -u_x(y) from the centered potential.
Matrix h_matrix_poisson(const Generator& L, const ProbabilityVector& pi);

SpectralPair spectral_second_identity(const Generator& L, const ProbabilityVector& pi);
ReturnTimeIdentities return_time_identities(const Generator& L, const ProbabilityVector& pi, int y);
HittingReport hitting_report(const Generator& L, const ProbabilityVector& pi);

/// Monte Carlo estimate of the first two moments of tau_y from x.
/// Deterministic for a given seed regardless of the thread count.
SimulationResult simulate_hitting(const Generator& L, int x, int y, std::uint64_t samples,
                                  std::uint64_t seed);

}  // namespace fastchain
