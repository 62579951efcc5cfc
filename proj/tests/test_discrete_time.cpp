#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fastchain/discrete_time.hpp"
#include "fastchain/eigentime.hpp"
#include "fastchain/error.hpp"
#include "fastchain/optimizer.hpp"
#include "support.hpp"

using namespace fastchain;

namespace {

Kernel permutation_kernel(int n) {
  Matrix k = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) k(i, (i + 1) % n) = 1.0;
  return Kernel(k);
}

Kernel lazy(const Kernel& K, double alpha) {
  const int n = K.size();
  return Kernel((1.0 - alpha) * K.entries() + alpha * Matrix::Identity(n, n));
}

// E_x[tau_y] = (Z(y,y) - Z(x,y)) / pi(y) with Z = (I - K + Pi)^-1.
Matrix fundamental_discrete(const Kernel& K, const ProbabilityVector& pi) {
  const int n = K.size();
  const Matrix z = (Matrix::Identity(n, n) - K.entries() + Vector::Ones(n) * pi.weights().transpose()).inverse();
  Matrix t(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) t(x, y) = (z(y, y) - z(x, y)) / pi[y];
  return t;
}

struct KernelInstance {
  Kernel K;
  ProbabilityVector pi;
};

KernelInstance random_kernel(Rng& rng, int n) {
  auto inst = testsupport::random_normalized(rng, n);
  return {lazy(phi_map(inst.L).kernel, rng.uniform(0.0, 0.7)), inst.pi};
}

DirectedGraph segment_s2() { return DirectedGraph(3, {{0, 1}, {1, 0}, {1, 2}, {2, 1}}); }

std::vector<std::complex<double>> as_complex(const Spectrum& s) { return s.values; }

}  // namespace

TEST_CASE("closed-form kernels") {
  const auto u3 = ProbabilityVector::uniform(3);
  CHECK(frak_f(permutation_kernel(3), u3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hunter_trace(permutation_kernel(3), u3) == doctest::Approx(2.0).epsilon(1e-12));
  const auto u2 = ProbabilityVector::uniform(2);
  CHECK(frak_f(permutation_kernel(2), u2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(hunter_trace(permutation_kernel(2), u2) == doctest::Approx(1.5).epsilon(1e-12));

  for (int n = 2; n <= 9; ++n) {
    const auto t = discrete_hitting_times(permutation_kernel(n));
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) CHECK(t(x, y) == doctest::Approx(((y - x) % n + n) % n).epsilon(1e-12));
    CHECK(frak_f(permutation_kernel(n), ProbabilityVector::uniform(n)) == doctest::Approx((n - 1) / 2.0));
  }
}

TEST_CASE("hitting systems, spectrum and trace agree") {
  Rng rng(71);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(7));
    const auto [K, pi] = random_kernel(rng, n);
    const Matrix t = discrete_hitting_times(K);
    CHECK((t - fundamental_discrete(K, pi)).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, t.maxCoeff()));
    const double f = frak_f(K, pi);
    CHECK(std::abs(f - frak_f_spectral(K)) <= 1e-8 * std::max(1.0, f));
    CHECK(std::abs(f + 1.0 - hunter_trace(K, pi)) <= 1e-8 * std::max(1.0, f));
    for (int y = 0; y < n; ++y) CHECK(t(y, y) == 0.0);
  }
  // Doubly stochastic mixtures of permutations with uniform pi.
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(4));
    Matrix k = Matrix::Zero(n, n);
    const auto w = rng.dirichlet(4);
    for (std::size_t m = 0; m < w.size(); ++m) {
      const auto perm = m == 0 ? [&] {
        std::vector<int> p(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = (i + 1) % n;
        return p;
      }()
                               : testsupport::random_permutation(rng, n);
      for (int i = 0; i < n; ++i) k(i, perm[static_cast<std::size_t>(i)]) += w[m];
    }
    for (int i = 0; i < n; ++i) k(i, i) += 1.0 - k.row(i).sum();
    const Kernel K(k);
    const auto u = ProbabilityVector::uniform(n);
    const double f = frak_f(K, u);
    CHECK(std::abs(f - frak_f_spectral(K)) <= 1e-8 * f);
    CHECK(std::abs(f + 1.0 - hunter_trace(K, u)) <= 1e-8 * f);
  }
}

TEST_CASE("lazy mixtures scale the functional") {
  Rng rng(72);
  for (int trial = 0; trial < 20; ++trial) {
    const auto [K, pi] = random_kernel(rng, 3 + static_cast<int>(rng.below(4)));
    const double alpha = rng.uniform(0.0, 0.9);
    CHECK(frak_f(lazy(K, alpha), pi) == doctest::Approx(frak_f(K, pi) / (1.0 - alpha)).epsilon(1e-9));
  }
}

TEST_CASE("phi map") {
  for (int n = 2; n <= 6; ++n) {
    const auto pi = ProbabilityVector::uniform(n);
    std::vector<Vertex> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    const auto L = cycle_generator(pi, Cycle(order));
    const auto phi = phi_map(L);
    CHECK(phi.l == doctest::Approx(1.0));
    CHECK((phi.kernel.entries() - permutation_kernel(n).entries()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(frak_f(phi.kernel, pi) == doctest::Approx(inverse_speed(L, pi)));
    const auto doubled = phi_map(L.scaled(2.0));
    CHECK(doubled.l == doctest::Approx(2.0));
    CHECK((doubled.kernel.entries() - phi.kernel.entries()).cwiseAbs().maxCoeff() <= 1e-12);
  }

  Rng rng(73);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [L, pi] = testsupport::random_normalized(rng, 2 + static_cast<int>(rng.below(6)));
    const auto phi = phi_map(L);
    CHECK(phi.kernel.has_zero_diagonal_entry());
    const double fl = inverse_speed(L, pi);
    CHECK(std::abs(frak_f(phi.kernel, pi) - phi.l * fl) <= 1e-8 * std::max(1.0, phi.l * fl));
    CHECK(phi.l >= 1.0 - 1e-12);
    // Theta(Phi(L)) = 1 - Lambda(L) / l.
    std::vector<std::complex<double>> expected;
    for (const auto& lambda : spectrum(L).values) expected.push_back(1.0 - lambda / phi.l);
    CHECK(match_multisets(kernel_spectrum(phi.kernel), expected).matched);
    // Psi inverts Phi on normalized generators.
    const auto back = psi_map(phi.kernel, pi);
    CHECK(back.k == doctest::Approx(phi.l).epsilon(1e-12));
    CHECK((back.generator.rates() - L.rates()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, L.rates().cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("psi map") {
  const auto u3 = ProbabilityVector::uniform(3);
  const auto p3 = permutation_kernel(3);
  const auto psi = psi_map(p3, u3);
  CHECK(psi.k == doctest::Approx(1.0));
  CHECK((psi.generator.rates() - cycle_generator(u3, Cycle({0, 1, 2})).rates()).cwiseAbs().maxCoeff() <= 1e-12);

  const auto half = psi_map(lazy(p3, 0.5), u3);
  CHECK(half.k == doctest::Approx(2.0));
  CHECK((half.generator.rates() - (p3.entries() - Matrix::Identity(3, 3))).cwiseAbs().maxCoeff() <= 1e-12);

  Rng rng(74);
  for (int trial = 0; trial < 50; ++trial) {
    const auto [K, pi] = random_kernel(rng, 2 + static_cast<int>(rng.below(6)));
    const auto r = psi_map(K, pi);
    CHECK(std::abs(equilibrium_jump_rate(r.generator, pi) - 1.0) <= 1e-12);
    CHECK(invariance_residual(r.generator, pi) <= 1e-12);
    const double fk = frak_f(K, pi);
    CHECK(std::abs(inverse_speed(r.generator, pi) - fk / r.k) <= 1e-8 * std::max(1.0, fk));
    CHECK(r.k >= 1.0 - 1e-12);
    // The lazy part is stripped: Phi(Psi(K)) lands in the zero-diagonal set.
    const auto round = phi_map(r.generator).kernel;
    CHECK(round.has_zero_diagonal_entry());
    CHECK(frak_f(round, pi) <= fk + 1e-9);
  }
}

TEST_CASE("spectral pairing") {
  const std::vector<std::complex<double>> a{{1.0, 0.5}, {1.0, -0.5}, {2.0, 0.0}};
  const std::vector<std::complex<double>> b{{2.0, 0.0}, {1.0, -0.5}, {1.0, 0.5 + 5e-8}};
  CHECK(match_multisets(a, b).matched);
  CHECK_FALSE(match_multisets(a, {{2.0, 0.0}, {1.0, 0.5}, {1.0, 0.5}}).matched);
  CHECK_FALSE(match_multisets(a, {{2.0, 0.0}}).matched);
  CHECK(match_multisets(as_complex(spectrum(testsupport::srw_z3())), as_complex(spectrum(testsupport::srw_z3()))).matched);
}

TEST_CASE("errors") {
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidInput;
  };
  const auto u3 = ProbabilityVector::uniform(3);
  CHECK(code_of([&] { psi_map(Kernel(Matrix::Identity(3, 3)), u3); }) == ErrorCode::IdentityKernel);
  CHECK(code_of([&] { hunter_trace(Kernel(Matrix::Identity(3, 3)), u3); }) == ErrorCode::SingularMatrix);
  Matrix blocks = Matrix::Zero(4, 4);
  blocks(0, 1) = blocks(1, 0) = blocks(2, 3) = blocks(3, 2) = 1.0;
  CHECK(code_of([&] { hunter_trace(Kernel(blocks), ProbabilityVector::uniform(4)); }) == ErrorCode::SingularMatrix);
  CHECK(code_of([&] { frak_f(Kernel(blocks), ProbabilityVector::uniform(4)); }) == ErrorCode::NotIrreducible);
  const ProbabilityVector skew((Vector(3) << 0.2, 0.3, 0.5).finished());
  CHECK(code_of([&] { frak_f(permutation_kernel(3), skew); }) == ErrorCode::NotInvariant);
  CHECK_THROWS_AS(Kernel((Matrix(2, 2) << 0.5, 0.4, 0.0, 1.0).finished()), Error);
  CHECK_THROWS_AS(Kernel((Matrix(2, 2) << 1.5, -0.5, 0.0, 1.0).finished()), Error);
}

TEST_CASE("continuous time is never slower") {
  for (int n = 3; n <= 4; ++n) {
    const auto r = compare_wedges(complete_graph(n), ProbabilityVector::uniform(n));
    CHECK(r.f_wedge == doctest::Approx((n - 1) / 2.0).epsilon(1e-8));
    CHECK(r.frak_f_wedge == doctest::Approx((n - 1) / 2.0).epsilon(1e-8));
    CHECK(std::abs(r.gap) <= 1e-8);
  }

  // On S2 with uniform pi the middle vertex always jumps at the largest rate,
  // so the discrete infimum is (3/2) * 16/9 = 8/3.
  const auto u3 = ProbabilityVector::uniform(3);
  const auto s2 = compare_wedges(segment_s2(), u3);
  CHECK(s2.f_wedge == doctest::Approx(16.0 / 9.0).epsilon(1e-8));
  CHECK(s2.frak_f_wedge == doctest::Approx(8.0 / 3.0).epsilon(1e-8));
  // Grid over the symmetric kernels compatible with S2.
  double grid = 1e300;
  for (int i = 1; i <= 200; ++i)
    for (int j = 1; i + j <= 200; ++j) {
      const double a = i / 200.0, b = j / 200.0;
      const Matrix k = (Matrix(3, 3) << 1 - a, a, 0, a, std::max(0.0, 1 - a - b), b, 0, b, 1 - b).finished();
      grid = std::min(grid, frak_f(Kernel(k), u3));
    }
  CHECK(grid >= s2.frak_f_wedge - 1e-9);
  CHECK(grid == doctest::Approx(8.0 / 3.0).epsilon(1e-6));

  Rng rng(75);
  for (int trial = 0; trial < 4; ++trial) {
    const auto pi = testsupport::random_pi(rng, 3, 0.5);
    const auto r = compare_wedges(complete_graph(3), pi);
    CHECK(r.gap >= -1e-8);
    CHECK(frak_f(r.discrete_minimizer, pi) == doctest::Approx(r.frak_f_wedge));
    for (int s = 0; s < 20; ++s) {
      const auto K = lazy(phi_map(testsupport::random_in_polytope(rng, pi)).kernel, rng.uniform(0.0, 0.5));
      CHECK(r.frak_f_wedge <= frak_f(K, pi) + 1e-9);
    }
  }
}
