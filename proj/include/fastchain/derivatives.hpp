#pragma once

#include <optional>

#include "fastchain/eigentime.hpp"
#include "fastchain/generator.hpp"

namespace fastchain {

/// Derivatives of F along the segment L_eps = (1 - eps) L + eps * direction.
/// The second-order quantity is the mixed partial
///   d/ds d/dt F(L + s (L_A - L) + t (L_A' - L)) at s = t = 0,
/// which reduces to the pure second derivative along L_A when A' = A.
struct DerivativeReport {
  double f_value = 0.0;
  double h_cycle = 0.0;
  double first = 0.0;
  std::optional<double> second;
  double m_bound = 0.0;
};

/// psi_y with L psi_y = L_A phi_y, psi_y(y) = 0. Computed by a linear solve and
/// by the cycle closed form; throws NumericalMismatch if they differ by more
/// than 1e-8 relative. Returns the linear-solve value.
Vector psi_solve(const Generator& L, const ProbabilityVector& pi, const Cycle& a, int y);
Vector psi_closed_form(const HittingAnalysis& an, const Cycle& a, int y);

/// Psi_y with L Psi_y = L_A' psi_y, Psi_y(y) = 0, psi_y built from A.
/// Same two-route contract as psi_solve.
Vector big_psi_solve(const Generator& L, const ProbabilityVector& pi, const Cycle& a, const Cycle& a_prime, int y);
Vector big_psi_closed_form(const HittingAnalysis& an, const Cycle& a, const Cycle& a_prime, int y);

/// H_A(L): mean of h_L over the arcs of A.
double h_cycle(const HittingAnalysis& an, const Cycle& a);
double h_cycle(const Generator& L, const ProbabilityVector& pi, const Cycle& a);
/// H for a general direction: sum_{x != y} pi(x) D(x, y) h_L(x, y).
double h_direction(const HittingAnalysis& an, const Generator& direction);

/// H_{A',A}(L) from the hitting-time closed form.
double h_mixed(const HittingAnalysis& an, const Cycle& a, const Cycle& a_prime);
/// sum_y pi(y) pi[Psi_y] for general directions (tilde builds psi, hat builds Psi).
double h_mixed_poisson(const HittingAnalysis& an, const Generator& tilde, const Generator& hat);

/// D_A F(L) = F(L) - H_A(L).
double directional_derivative(const Generator& L, const ProbabilityVector& pi, const Cycle& a);
/// D_D F(L) = F(L) - H_D(L). Throws DirectionInvalid unless the direction is
/// normalized and pi-invariant within kMembershipTol.
double directional_derivative(const Generator& L, const ProbabilityVector& pi, const Generator& direction);
/// Same derivative as sum_y pi(y) (pi[phi_y] - pi[psi_y]) with psi from Poisson solves.
double directional_derivative_poisson(const Generator& L, const ProbabilityVector& pi, const Generator& direction);

/// Mixed second derivative along cycles A and A' (symmetric in A, A').
double second_directional(const Generator& L, const ProbabilityVector& pi, const Cycle& a, const Cycle& a_prime);
double second_directional(const HittingAnalysis& an, const Cycle& a, const Cycle& a_prime);
/// Mixed second derivative along general directions, from Poisson solves.
double second_directional(const Generator& L, const ProbabilityVector& pi, const Generator& tilde,
                          const Generator& hat);

/// M(L) = max_{x,y} E_x[tau_y].
double m_bound(const Generator& L, const ProbabilityVector& pi);

DerivativeReport derivative_report(const Generator& L, const ProbabilityVector& pi, const Cycle& a,
                                   const std::optional<Cycle>& a_prime = std::nullopt);

}  // namespace fastchain
