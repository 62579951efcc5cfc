#include "fastchain/derivatives.hpp"

#include <algorithm>
#include <cmath>

#include "fastchain/error.hpp"

namespace fastchain {

namespace {

void require_invariant(const Generator& L, const ProbabilityVector& pi) {
  if (L.size() != pi.size()) throw Error(ErrorCode::InvalidInput, "generator and pi differ in size");
  const double scale = std::max(1.0, L.rates().cwiseAbs().maxCoeff());
  if (invariance_residual(L, pi) > kMembershipTol * scale)
    throw Error(ErrorCode::NotInvariant, "pi is not invariant for the generator");
}

void require_cycle(const Cycle& a, int n) {
  for (Vertex v : a.vertices())
    if (v >= n) throw Error(ErrorCode::InvalidInput, "cycle vertex out of range");
}

void require_direction(const Generator& d, const ProbabilityVector& pi) {
  try {
    require_normalized_invariant(d, pi);
  } catch (const Error& e) {
    throw Error(ErrorCode::DirectionInvalid, e.what());
  }
}

void require_agreement(const Vector& solved, const Vector& closed, const char* what) {
  const double scale = std::max(1.0, solved.cwiseAbs().maxCoeff());
  if ((solved - closed).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw Error(ErrorCode::NumericalMismatch, std::string(what) + ": linear solve and closed form disagree");
}

// phi_y as a vector over starting states.
Vector phi(const HittingAnalysis& an, int y) { return an.hitting().col(y); }

}  // namespace

Vector psi_closed_form(const HittingAnalysis& an, const Cycle& a, int y) {
  const Matrix& m = an.hitting();
  const int n = m.rows();
  Vector out = Vector::Zero(n);
  for (std::size_t l = 0; l < a.length(); ++l) {
    const int al = a[l];
    const double jump = m(a.next(l), y) - m(al, y);
    for (int x = 0; x < n; ++x) out[x] += jump * (m(x, al) - m(y, al));
  }
  return out / static_cast<double>(a.length());
}

Vector psi_solve(const Generator& L, const ProbabilityVector& pi, const Cycle& a, int y) {
  require_invariant(L, pi);
  require_cycle(a, L.size());
  const HittingAnalysis an(L, pi);
  const Generator la = cycle_generator(pi, a);
  const Vector solved = an.solver().solve(la.rates() * phi(an, y), y);
  require_agreement(solved, psi_closed_form(an, a, y), "psi");
  return solved;
}

Vector big_psi_closed_form(const HittingAnalysis& an, const Cycle& a, const Cycle& a_prime, int y) {
  const Matrix& m = an.hitting();
  const int n = m.rows();
  Vector out = Vector::Zero(n);
  for (std::size_t l = 0; l < a.length(); ++l) {
    const int al = a[l];
    const double jump = m(a.next(l), y) - m(al, y);
    for (std::size_t k = 0; k < a_prime.length(); ++k) {
      const int ak = a_prime[k];
      const double inner = jump * (m(a_prime.next(k), al) - m(ak, al));
      for (int x = 0; x < n; ++x) out[x] += inner * (m(x, ak) - m(y, ak));
    }
  }
  return out / static_cast<double>(a.length() * a_prime.length());
}

Vector big_psi_solve(const Generator& L, const ProbabilityVector& pi, const Cycle& a, const Cycle& a_prime, int y) {
  require_invariant(L, pi);
  require_cycle(a, L.size());
  require_cycle(a_prime, L.size());
  const HittingAnalysis an(L, pi);
  const Vector psi = an.solver().solve(cycle_generator(pi, a).rates() * phi(an, y), y);
  const Vector solved = an.solver().solve(cycle_generator(pi, a_prime).rates() * psi, y);
  require_agreement(solved, big_psi_closed_form(an, a, a_prime, y), "Psi");
  return solved;
}

double h_cycle(const HittingAnalysis& an, const Cycle& a) {
  const Matrix& h = an.h();
  double s = 0.0;
  for (std::size_t l = 0; l < a.length(); ++l) s += h(a[l], a.next(l));
  return s / static_cast<double>(a.length());
}

double h_cycle(const Generator& L, const ProbabilityVector& pi, const Cycle& a) {
  require_cycle(a, L.size());
  return h_cycle(HittingAnalysis(L, pi), a);
}

double h_direction(const HittingAnalysis& an, const Generator& direction) {
  const Matrix& h = an.h();
  const auto& pi = an.pi();
  double s = 0.0;
  for (int x = 0; x < direction.size(); ++x)
    for (int y = 0; y < direction.size(); ++y)
      if (x != y) s += pi[x] * direction(x, y) * h(x, y);
  return s;
}

double h_mixed(const HittingAnalysis& an, const Cycle& a, const Cycle& a_prime) {
  const Matrix& m = an.hitting();
  const Matrix& h = an.h();
  double s = 0.0;
  for (std::size_t l = 0; l < a.length(); ++l) {
    const int al = a[l], al1 = a.next(l);
    for (std::size_t k = 0; k < a_prime.length(); ++k) {
      const int ak = a_prime[k], ak1 = a_prime.next(k);
      s += (h(ak, al1) - h(ak, al)) * (m(ak1, al) - m(ak, al));
    }
  }
  return s / static_cast<double>(a.length() * a_prime.length());
}

double h_mixed_poisson(const HittingAnalysis& an, const Generator& tilde, const Generator& hat) {
  const auto& pi = an.pi();
  double s = 0.0;
  for (int y = 0; y < pi.size(); ++y) {
    const Vector psi = an.solver().solve(tilde.rates() * phi(an, y), y);
    const Vector big = an.solver().solve(hat.rates() * psi, y);
    s += pi[y] * pi.weights().dot(big);
  }
  return s;
}

double directional_derivative(const Generator& L, const ProbabilityVector& pi, const Cycle& a) {
  require_invariant(L, pi);
  require_cycle(a, L.size());
  const HittingAnalysis an(L, pi);
  return an.f_value() - h_cycle(an, a);
}

double directional_derivative(const Generator& L, const ProbabilityVector& pi, const Generator& direction) {
  require_invariant(L, pi);
  require_direction(direction, pi);
  const HittingAnalysis an(L, pi);
  return an.f_value() - h_direction(an, direction);
}

double directional_derivative_poisson(const Generator& L, const ProbabilityVector& pi, const Generator& direction) {
  require_invariant(L, pi);
  require_direction(direction, pi);
  const HittingAnalysis an(L, pi);
  double s = 0.0;
  for (int y = 0; y < pi.size(); ++y) {
    const Vector psi = an.solver().solve(direction.rates() * phi(an, y), y);
    s += pi[y] * (an.mean_hitting()[y] - pi.weights().dot(psi));
  }
  return s;
}

double second_directional(const HittingAnalysis& an, const Cycle& a, const Cycle& a_prime) {
  return 2.0 * an.f_value() - 2.0 * h_cycle(an, a) - 2.0 * h_cycle(an, a_prime) + h_mixed(an, a, a_prime) +
         h_mixed(an, a_prime, a);
}

double second_directional(const Generator& L, const ProbabilityVector& pi, const Cycle& a, const Cycle& a_prime) {
  require_invariant(L, pi);
  require_cycle(a, L.size());
  require_cycle(a_prime, L.size());
  return second_directional(HittingAnalysis(L, pi), a, a_prime);
}

double second_directional(const Generator& L, const ProbabilityVector& pi, const Generator& tilde,
                          const Generator& hat) {
  require_invariant(L, pi);
  require_direction(tilde, pi);
  require_direction(hat, pi);
  const HittingAnalysis an(L, pi);
  return 2.0 * an.f_value() - 2.0 * h_direction(an, tilde) - 2.0 * h_direction(an, hat) +
         h_mixed_poisson(an, tilde, hat) + h_mixed_poisson(an, hat, tilde);
}

double m_bound(const Generator& L, const ProbabilityVector& pi) {
  return expected_hitting_times(L, pi).maxCoeff();
}

DerivativeReport derivative_report(const Generator& L, const ProbabilityVector& pi, const Cycle& a,
                                   const std::optional<Cycle>& a_prime) {
  require_invariant(L, pi);
  require_cycle(a, L.size());
  const HittingAnalysis an(L, pi);
  DerivativeReport r;
  r.f_value = an.f_value();
  r.h_cycle = h_cycle(an, a);
  r.first = r.f_value - r.h_cycle;
  r.m_bound = an.m_bound();
  if (a_prime) {
    require_cycle(*a_prime, L.size());
    r.second = second_directional(an, a, *a_prime);
  }
  return r;
}

}  // namespace fastchain
