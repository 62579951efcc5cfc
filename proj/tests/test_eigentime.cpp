#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fastchain/eigentime.hpp"
#include "fastchain/error.hpp"
#include "support.hpp"

using namespace fastchain;
using testsupport::srw_z3;
using testsupport::uniform_three_cycle;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidInput;
}

}  // namespace

TEST_CASE("poisson solve") {
  const auto pi = ProbabilityVector::uniform(3);
  const auto L = uniform_three_cycle();
  CHECK(max_abs(poisson_solve(L, pi, Vector::Zero(3), 1)) == 0.0);
  const Vector g = poisson_solve(L, pi, hitting_rhs(pi, 2), 2);
  CHECK(max_abs(g - Vector((Vector(3) << 2, 1, 0).finished())) < 1e-12);

  Vector r1(3), r2(3);
  r1 << 1, -2, 1;
  r2 << 0.5, 0.5, -1;
  const Vector lhs = poisson_solve(L, pi, 2.0 * r1 - 3.0 * r2, 0);
  const Vector rhs = 2.0 * poisson_solve(L, pi, r1, 0) - 3.0 * poisson_solve(L, pi, r2, 0);
  CHECK(max_abs(lhs - rhs) < 1e-12);

  CHECK(code_of([&] { poisson_solve(L, pi, Vector::Ones(3), 0); }) == ErrorCode::NotCentered);
  Matrix red(3, 3);
  red << -1, 1, 0, 0, -1, 1, 0, 0, 0;
  CHECK(code_of([&] { poisson_solve(Generator(red), pi, Vector::Zero(3), 0); }) == ErrorCode::NotIrreducible);
}

TEST_CASE("hitting times: fixtures") {
  const auto pi = ProbabilityVector::uniform(3);
  const Matrix m = expected_hitting_times(uniform_three_cycle(), pi);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) CHECK(m(x, y) == doctest::Approx(static_cast<double>((y - x + 3) % 3)));
  const Matrix s = expected_hitting_times(srw_z3(), pi);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) CHECK(s(x, y) == doctest::Approx(x == y ? 0.0 : 2.0));
}

TEST_CASE("inverse speed: fixtures") {
  const auto u = ProbabilityVector::uniform(3);
  CHECK(inverse_speed(uniform_three_cycle(), u) == doctest::Approx(1.0).epsilon(1e-14));
  const ProbabilityVector pi((Vector(3) << 0.5, 0.25, 0.25).finished());
  CHECK(inverse_speed(cycle_generator(pi, Cycle({0, 1, 2})), pi) == doctest::Approx(15.0 / 16.0).epsilon(1e-14));
  CHECK(inverse_speed(srw_z3(), u) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(code_of([&] { inverse_speed(srw_z3(), pi); }) == ErrorCode::NotInvariant);
}

TEST_CASE("spectrum: fixtures") {
  const auto sc = spectrum(uniform_three_cycle()).values;
  REQUIRE(sc.size() == 2);
  CHECK(sc[0].real() == doctest::Approx(1.5));
  CHECK(sc[0].imag() == doctest::Approx(-std::sqrt(3.0) / 2));
  CHECK(sc[1].imag() == doctest::Approx(std::sqrt(3.0) / 2));
  const auto sr = spectrum(srw_z3()).values;
  REQUIRE(sr.size() == 2);
  CHECK(std::abs(sr[0] - 1.5) < 1e-12);
  CHECK(std::abs(sr[1] - 1.5) < 1e-12);
  const auto scaled = spectrum(uniform_three_cycle().scaled(2.5)).values;
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(scaled[i] - 2.5 * sc[i]) < 1e-12);

  CHECK(eigentime_spectral(uniform_three_cycle()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eigentime_spectral(srw_z3()) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  Matrix two_blocks = Matrix::Zero(4, 4);
  two_blocks << -1, 1, 0, 0, 1, -1, 0, 0, 0, 0, -1, 1, 0, 0, 1, -1;
  CHECK(code_of([&] { spectrum(Generator(two_blocks)); }) == ErrorCode::SpectrumAmbiguous);
}

TEST_CASE("spectrum invariants on random generators") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(7));
    const auto inst = testsupport::random_normalized(rng, n, rng.uniform(0.0, 0.8));
    const auto vals = spectrum(inst.L).values;
    CHECK(static_cast<int>(vals.size()) == n - 1);
    for (const auto& v : vals) {
      CHECK(v.real() > 0.0);
      bool paired = false;
      for (const auto& w : vals) paired = paired || std::abs(w - std::conj(v)) <= 1e-8;
      CHECK(paired);
    }
  }
}

TEST_CASE("second moments: fixtures") {
  const auto u = ProbabilityVector::uniform(3);
  const Matrix m2 = second_moment_hitting(uniform_three_cycle(), u);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) {
      const double rho = (y - x + 3) % 3;
      CHECK(m2(x, y) == doctest::Approx(rho * rho + rho));
    }
  // Hitting time of a fixed target for the walk on Z_3 is exponential with rate 1/2.
  const Matrix s2 = second_moment_hitting(srw_z3(), u);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) CHECK(s2(x, y) == doctest::Approx(x == y ? 0.0 : 8.0).epsilon(1e-12));
}

TEST_CASE("h matrix: cycle formula and two routes") {
  for (int n = 3; n <= 7; ++n) {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    const auto L = cycle_generator(ProbabilityVector::uniform(n), Cycle(order));
    const Matrix h = h_matrix(L, ProbabilityVector::uniform(n));
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        const double r = (x - y + n) % n;
        CHECK(h(x, y) == doctest::Approx(0.5 * (r * r - (n - 2) * r)));
      }
  }
  const Matrix h3 = h_matrix(uniform_three_cycle(), ProbabilityVector::uniform(3));
  CHECK(h3(2, 0) == doctest::Approx(1.0));
  CHECK(h3(0, 0) == 0.0);
}

TEST_CASE("spectral second identity: fixtures") {
  const auto u = ProbabilityVector::uniform(3);
  const auto c = spectral_second_identity(uniform_three_cycle(), u);
  CHECK(c.lhs == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(c.rhs == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  const auto r = spectral_second_identity(srw_z3(), u);
  CHECK(r.lhs == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  CHECK(r.rhs == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  const auto s = spectral_second_identity(srw_z3().scaled(3.0), u);
  CHECK(s.lhs == doctest::Approx(r.lhs / 9.0).epsilon(1e-12));
  CHECK(s.rhs == doctest::Approx(r.rhs / 9.0).epsilon(1e-12));
}

TEST_CASE("random suite: identities and independent oracles") {
  Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(6));
    const auto [L, pi] = testsupport::random_normalized(rng, n, rng.uniform(0.0, 0.8));
    const HittingAnalysis an(L, pi);

    CHECK(max_abs(an.hitting() - testsupport::fundamental_hitting(L, pi)) < 1e-9 * std::max(1.0, an.m_bound()));
    CHECK(max_abs(an.second_moments() - testsupport::killed_second_moments(L)) <
          1e-8 * std::max(1.0, an.second_moments().maxCoeff()));
    CHECK(an.hitting().diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK(an.second_moments().diagonal().cwiseAbs().maxCoeff() == 0.0);

    CHECK(std::abs(an.f_value() - eigentime_spectral(L)) <= 1e-8);
    const auto sp = spectral_second_identity(L, pi);
    CHECK(std::abs(sp.lhs - sp.rhs) <= 1e-8);
    CHECK(max_abs(h_matrix(L, pi) - h_matrix_poisson(L, pi)) <= 1e-8);

    const Vector kemeny = an.hitting() * pi.weights();
    CHECK(kemeny.maxCoeff() - kemeny.minCoeff() <= 1e-9);

    for (int y = 0; y < n; ++y) {
      const auto id = return_time_identities(L, pi, y);
      CHECK(std::abs(id.lhs3 - id.rhs3) <= 1e-8);
      CHECK(std::abs(id.kac_return - 1.0 / L.exit_rate(y)) <= 1e-8);
      CHECK(std::abs((id.lhs4 - id.rhs4) - (1.0 / L.exit_rate(y) - 1.0)) <= 1e-8);
    }
  }
}

TEST_CASE("return-time identities on the uniform 3-cycle") {
  for (int y = 0; y < 3; ++y) {
    const auto id = return_time_identities(uniform_three_cycle(), ProbabilityVector::uniform(3), y);
    CHECK(id.lhs3 == doctest::Approx(1.0));
    CHECK(id.rhs3 == doctest::Approx(1.0));
    CHECK(id.lhs4 == doctest::Approx(2.0));
    CHECK(id.rhs4 == doctest::Approx(2.0));
    CHECK(id.target_average == doctest::Approx(1.0));
  }
}

TEST_CASE("hamiltonian value") {
  Rng rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(6));
    const auto pi = testsupport::random_pi(rng, n);
    const auto L = cycle_generator(pi, testsupport::random_hamiltonian(rng, n));
    const double s = 1.0 - pi.weights().squaredNorm();
    CHECK(std::abs(inverse_speed(L, pi) - 0.5 * n * s) <= 1e-10);
  }
}

TEST_CASE("monte carlo") {
  const auto r0 = simulate_hitting(uniform_three_cycle(), 1, 1, 100, 5);
  CHECK(r0.mean == 0.0);
  CHECK(r0.second_moment == 0.0);

  const auto a = simulate_hitting(uniform_three_cycle(), 0, 2, 200000, 7);
  CHECK(std::abs(a.mean - 2.0) <= 4 * a.std_error);
  CHECK(std::abs(a.second_moment - 6.0) <= 4 * a.second_moment_std_error);
  const auto b = simulate_hitting(srw_z3(), 0, 1, 200000, 8);
  CHECK(std::abs(b.mean - 2.0) <= 4 * b.std_error);
  CHECK(std::abs(b.second_moment - 8.0) <= 4 * b.second_moment_std_error);

  const auto again = simulate_hitting(srw_z3(), 0, 1, 200000, 8);
  CHECK(again.mean == b.mean);
  CHECK(again.second_moment == b.second_moment);
  CHECK_THROWS_AS(simulate_hitting(srw_z3(), 0, 1, 0, 8), Error);
}
