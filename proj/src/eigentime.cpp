#include "fastchain/eigentime.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fastchain/error.hpp"
#include "fastchain/parallel.hpp"
#include "fastchain/random.hpp"

namespace fastchain {

namespace {

void require_same_size(const Generator& L, const ProbabilityVector& pi) {
  if (L.size() != pi.size()) throw Error(ErrorCode::InvalidInput, "generator and pi differ in size");
}

void require_vertex(int v, int n, const char* what) {
  if (v < 0 || v >= n) throw Error(ErrorCode::InvalidInput, std::string(what) + " out of range");
}

Matrix without_index(const Matrix& m, int k) {
  const int n = static_cast<int>(m.rows());
  Matrix out(n - 1, n - 1);
  for (int i = 0, r = 0; i < n; ++i) {
    if (i == k) continue;
    for (int j = 0, c = 0; j < n; ++j) {
      if (j == k) continue;
      out(r, c++) = m(i, j);
    }
    ++r;
  }
  return out;
}

// Diagonal similarity by powers of two so that row and column norms are
// comparable; keeps the eigenvalues of badly scaled generators accurate.
Matrix balance(Matrix a) {
  const Eigen::Index n = a.rows();
  constexpr double radix = 2.0;
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        converged = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
  return a;
}

}  // namespace

PoissonSolver::PoissonSolver(const Generator& L) : n_(L.size()) {
  if (!L.is_irreducible()) throw Error(ErrorCode::NotIrreducible, "support graph is not strongly connected");
  if (n_ == 1) return;
  lu_.reserve(static_cast<std::size_t>(n_));
  for (int a = 0; a < n_; ++a) lu_.emplace_back(without_index(L.rates(), a));
}

Vector PoissonSolver::solve(const Vector& rhs, int anchor) const {
  require_vertex(anchor, n_, "anchor");
  if (rhs.size() != n_) throw Error(ErrorCode::InvalidInput, "right-hand side has wrong size");
  Vector g = Vector::Zero(n_);
  if (n_ == 1) return g;
  Vector reduced(n_ - 1);
  for (int i = 0, r = 0; i < n_; ++i)
    if (i != anchor) reduced[r++] = rhs[i];
  const Vector sol = lu_[static_cast<std::size_t>(anchor)].solve(reduced);
  for (int i = 0, r = 0; i < n_; ++i)
    if (i != anchor) g[i] = sol[r++];
  return g;
}

Vector hitting_rhs(const ProbabilityVector& pi, int y) {
  require_vertex(y, pi.size(), "target");
  Vector f = Vector::Constant(pi.size(), -1.0);
  f[y] += 1.0 / pi[y];
  return f;
}

HittingAnalysis::HittingAnalysis(const Generator& L, const ProbabilityVector& pi)
    : L_(L), pi_(pi), solver_(L) {
  require_same_size(L, pi);
  const int n = L.size();
  hitting_.resize(n, n);
  potential_.resize(n, n);
  second_.resize(n, n);
  h_.resize(n, n);
  mean_hitting_.resize(n);
  for (int y = 0; y < n; ++y) {
    hitting_.col(y) = solver_.solve(hitting_rhs(pi, y), y);
    mean_hitting_[y] = pi.weights().dot(hitting_.col(y));
    const Vector centered = hitting_.col(y).array() - mean_hitting_[y];
    potential_.col(y) = solver_.solve(centered, y);
  }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      second_(x, y) = (x == y) ? 0.0 : 2.0 * (mean_hitting_[y] * hitting_(x, y) - potential_(x, y));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      h_(x, y) = (x == y) ? 0.0 : 0.5 * second_(y, x) - mean_hitting_[x] * hitting_(y, x);
  f_ = pi.weights().dot(hitting_ * pi.weights());
}

Vector poisson_solve(const Generator& L, const ProbabilityVector& pi, const Vector& rhs, int anchor) {
  require_same_size(L, pi);
  if (rhs.size() != L.size()) throw Error(ErrorCode::InvalidInput, "right-hand side has wrong size");
  const double mean = pi.weights().dot(rhs);
  if (std::abs(mean) > 1e-9) throw Error(ErrorCode::NotCentered, "pi-mean of rhs is " + std::to_string(mean));
  return PoissonSolver(L).solve(rhs, anchor);
}

Matrix expected_hitting_times(const Generator& L, const ProbabilityVector& pi) {
  require_same_size(L, pi);
  const PoissonSolver solver(L);
  Matrix m(L.size(), L.size());
  for (int y = 0; y < L.size(); ++y) m.col(y) = solver.solve(hitting_rhs(pi, y), y);
  return m;
}

double inverse_speed(const Generator& L, const ProbabilityVector& pi) {
  require_same_size(L, pi);
  const double scale = std::max(1.0, L.rates().cwiseAbs().maxCoeff());
  if (invariance_residual(L, pi) > kMembershipTol * scale)
    throw Error(ErrorCode::NotInvariant, "pi is not invariant for the generator");
  const Matrix m = expected_hitting_times(L, pi);
  return pi.weights().dot(m * pi.weights());
}

Spectrum spectrum(const Generator& L) {
  Spectrum out;
  const int n = L.size();
  if (n == 1) return out;
  Eigen::EigenSolver<Matrix> es(balance(-L.rates()), false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NotConverged, "eigenvalue iteration failed");
  std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) { return std::abs(a) < std::abs(b); });
  if (std::abs(ev[1]) < 1e-8)
    throw Error(ErrorCode::SpectrumAmbiguous, "two eigenvalues of -L are numerically zero");
  out.values.assign(ev.begin() + 1, ev.end());
  std::sort(out.values.begin(), out.values.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

double eigentime_spectral(const Generator& L) {
  std::complex<double> s = 0.0;
  for (const auto& lambda : spectrum(L).values) s += 1.0 / lambda;
  if (std::abs(s.imag()) > 1e-8 * std::max(1.0, std::abs(s.real())))
    throw Error(ErrorCode::NumericalMismatch, "spectral sum has a non-negligible imaginary part");
  return s.real();
}

Matrix second_moment_hitting(const Generator& L, const ProbabilityVector& pi) {
  return HittingAnalysis(L, pi).second_moments();
}

Matrix h_matrix(const Generator& L, const ProbabilityVector& pi) { return HittingAnalysis(L, pi).h(); }

Matrix h_matrix_poisson(const Generator& L, const ProbabilityVector& pi) {
  const HittingAnalysis an(L, pi);
  Matrix h = -an.centered_potential().transpose();
  h.diagonal().setZero();
  return h;
}

SpectralPair spectral_second_identity(const Generator& L, const ProbabilityVector& pi) {
  const HittingAnalysis an(L, pi);
  SpectralPair out;
  out.lhs = pi.weights().dot(an.h() * pi.weights());
  std::complex<double> s = 0.0;
  for (const auto& lambda : spectrum(L).values) s += 1.0 / (lambda * lambda);
  out.rhs = s.real();
  return out;
}

ReturnTimeIdentities return_time_identities(const Generator& L, const ProbabilityVector& pi, int y) {
  require_same_size(L, pi);
  require_vertex(y, L.size(), "vertex");
  const int n = L.size();
  const Matrix m = expected_hitting_times(L, pi);
  const double kemeny = eigentime_spectral(L);

  ReturnTimeIdentities out;
  out.rhs3 = kemeny;
  out.rhs4 = 1.0 + kemeny;
  for (int z = 0; z < n; ++z) {
    out.lhs3 += pi[z] * m(y, z);
    out.target_average += pi[z] * m(z, y);
  }
  const double exit = L.exit_rate(y);
  double return_time = (n == 1) ? 0.0 : 1.0 / exit;
  for (int z = 0; z < n; ++z)
    if (z != y) return_time += L(y, z) / exit * m(z, y);
  out.kac_return = pi[y] * return_time;
  out.lhs4 = out.lhs3 + out.kac_return;
  return out;
}

HittingReport hitting_report(const Generator& L, const ProbabilityVector& pi) {
  const HittingAnalysis an(L, pi);
  HittingReport r;
  r.expectations = an.hitting();
  r.second_moments = an.second_moments();
  r.kemeny = an.hitting().row(0).dot(pi.weights());
  r.f_value = an.f_value();
  r.h_matrix = an.h();
  return r;
}

SimulationResult simulate_hitting(const Generator& L, int x, int y, std::uint64_t samples, std::uint64_t seed) {
  const int n = L.size();
  require_vertex(x, n, "start");
  require_vertex(y, n, "target");
  if (samples == 0) throw Error(ErrorCode::InvalidInput, "samples must be >= 1");
  if (!L.is_irreducible()) throw Error(ErrorCode::NotIrreducible, "support graph is not strongly connected");

  SimulationResult out;
  out.samples = samples;
  if (x == y) return out;

  // Jump chain as cumulative rate tables.
  std::vector<std::vector<std::pair<double, int>>> jumps(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    double acc = 0.0;
    for (int w = 0; w < n; ++w)
      if (w != v && L(v, w) > 0.0) {
        acc += L(v, w);
        jumps[static_cast<std::size_t>(v)].emplace_back(acc, w);
      }
  }

  // Fixed chunking: chunk c always uses stream c, independent of thread count.
  constexpr std::uint64_t kChunks = 64;
  const std::uint64_t chunks = std::min(kChunks, samples);
  struct Sums {
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  };
  std::vector<Sums> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng(seed, c);
    const std::uint64_t count = samples / chunks + (c < samples % chunks ? 1 : 0);
    Sums s;
    for (std::uint64_t k = 0; k < count; ++k) {
      int v = x;
      double t = 0.0;
      while (v != y) {
        const auto& row = jumps[static_cast<std::size_t>(v)];
        const double exit = row.back().first;
        t += rng.exponential(exit);
        const double u = (rng.uniform() - 0x1.0p-53) * exit;
        auto it = std::upper_bound(row.begin(), row.end(), u,
                                   [](double val, const auto& e) { return val < e.first; });
        if (it == row.end()) --it;
        v = it->second;
      }
      const double t2 = t * t;
      s.s1 += t;
      s.s2 += t2;
      s.s4 += t2 * t2;
    }
    partial[c] = s;
  });

  Sums total;
  for (const auto& s : partial) {
    total.s1 += s.s1;
    total.s2 += s.s2;
    total.s4 += s.s4;
  }
  const double cnt = static_cast<double>(samples);
  out.mean = total.s1 / cnt;
  out.second_moment = total.s2 / cnt;
  if (samples > 1) {
    const double var1 = std::max(0.0, (total.s2 - total.s1 * total.s1 / cnt) / (cnt - 1.0));
    const double var2 = std::max(0.0, (total.s4 - total.s2 * total.s2 / cnt) / (cnt - 1.0));
    out.std_error = std::sqrt(var1 / cnt);
    out.second_moment_std_error = std::sqrt(var2 / cnt);
  }
  return out;
}

}  // namespace fastchain
