#include "fastchain/discrete_time.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fastchain/eigentime.hpp"
#include "fastchain/error.hpp"
#include "fastchain/optimizer.hpp"

namespace fastchain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_invariant(const Kernel& K, const ProbabilityVector& pi) {
  if (K.size() != pi.size()) throw Error(ErrorCode::InvalidInput, "kernel and pi differ in size");
  const double residual = (pi.weights().transpose() * K.entries() - pi.weights().transpose()).cwiseAbs().maxCoeff();
  if (residual > kMembershipTol)
    throw Error(ErrorCode::NotInvariant, "pi K != pi (residual " + std::to_string(residual) + ")");
}

Generator kernel_minus_identity(const Kernel& K) {
  Matrix off = K.entries();
  off.diagonal().setZero();
  return Generator::from_off_diagonal(off);
}

// l(L) F(L) for L = sum_A w_A L_A, +inf off the irreducible set.
double scaled_f(const std::vector<Matrix>& mats, const std::vector<double>& w, const ProbabilityVector& pi) {
  Matrix rates = Matrix::Zero(pi.size(), pi.size());
  for (std::size_t k = 0; k < mats.size(); ++k)
    if (w[k] != 0.0) rates += w[k] * mats[k];
  const double f = f_or_infinity(rates, pi);
  if (!std::isfinite(f)) return kInf;
  return (-rates.diagonal()).maxCoeff() * f;
}

void pattern_search(const std::vector<Matrix>& mats, const ProbabilityVector& pi, std::vector<double>& w,
                    double& value, double step) {
  const std::size_t k = w.size();
  for (; step > 1e-10; step /= 2.0) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
          if (i == j || w[j] <= 0.0) continue;
          auto trial = w;
          const double move = std::min(step, trial[j]);
          trial[i] += move;
          trial[j] -= move;
          const double v = scaled_f(mats, trial, pi);
          if (v < value - 1e-15) {
            value = v;
            w = std::move(trial);
            improved = true;
          }
        }
    }
  }
}

}  // namespace

Kernel::Kernel(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
    throw Error(ErrorCode::InvalidInput, "kernel must be a non-empty square matrix");
  if (!entries_.allFinite()) throw Error(ErrorCode::InvalidInput, "kernel has non-finite entries");
  if (entries_.minCoeff() < 0.0) throw Error(ErrorCode::InvalidInput, "kernel has negative entries");
  for (int x = 0; x < size(); ++x)
    if (std::abs(entries_.row(x).sum() - 1.0) > 1e-12)
      throw Error(ErrorCode::InvalidInput, "kernel row " + std::to_string(x) + " does not sum to 1");
}

DirectedGraph Kernel::support() const {
  std::vector<Arc> arcs;
  for (int x = 0; x < size(); ++x)
    for (int y = 0; y < size(); ++y)
      if (x != y && entries_(x, y) > 0.0) arcs.emplace_back(x, y);
  return DirectedGraph(size(), arcs);
}

bool Kernel::is_irreducible() const { return is_strongly_connected(support()); }

bool Kernel::has_zero_diagonal_entry() const { return (entries_.diagonal().array() == 0.0).any(); }

Matrix discrete_hitting_times(const Kernel& K) {
  if (!K.is_irreducible()) throw Error(ErrorCode::NotIrreducible, "kernel is not irreducible");
  const int n = K.size();
  Matrix out = Matrix::Zero(n, n);
  if (n == 1) return out;
  const Matrix a = Matrix::Identity(n, n) - K.entries();
  for (int y = 0; y < n; ++y) {
    // (I - K) h = 1 on V \ {y}, h(y) = 0.
    std::vector<int> keep;
    for (int x = 0; x < n; ++x)
      if (x != y) keep.push_back(x);
    Matrix sub(n - 1, n - 1);
    for (int r = 0; r < n - 1; ++r)
      for (int c = 0; c < n - 1; ++c) sub(r, c) = a(keep[static_cast<std::size_t>(r)], keep[static_cast<std::size_t>(c)]);
    const Vector h = sub.partialPivLu().solve(Vector::Ones(n - 1));
    for (int r = 0; r < n - 1; ++r) out(keep[static_cast<std::size_t>(r)], y) = h[r];
  }
  return out;
}

double frak_f(const Kernel& K, const ProbabilityVector& pi) {
  require_invariant(K, pi);
  const Matrix t = discrete_hitting_times(K);
  return pi.weights().dot(t * pi.weights());
}

std::vector<std::complex<double>> kernel_spectrum(const Kernel& K) {
  std::vector<std::complex<double>> out;
  for (const auto& lambda : spectrum(kernel_minus_identity(K)).values) out.push_back(1.0 - lambda);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

double frak_f_spectral(const Kernel& K) {
  std::complex<double> s = 0.0;
  for (const auto& theta : kernel_spectrum(K)) s += 1.0 / (1.0 - theta);
  if (std::abs(s.imag()) > 1e-8 * std::max(1.0, std::abs(s.real())))
    throw Error(ErrorCode::NumericalMismatch, "spectral sum has a non-negligible imaginary part");
  return s.real();
}

double hunter_trace(const Kernel& K, const ProbabilityVector& pi) {
  require_invariant(K, pi);
  const int n = K.size();
  const Matrix m = Matrix::Identity(n, n) - K.entries() + Vector::Ones(n) * pi.weights().transpose();
  const Eigen::FullPivLU<Matrix> lu(m);
  if (!lu.isInvertible() || lu.rcond() < 1e-13) throw Error(ErrorCode::SingularMatrix, "I - K + Pi is singular");
  return lu.inverse().trace();
}

PhiResult phi_map(const Generator& L) {
  const int n = L.size();
  double l = 0.0;
  for (int x = 0; x < n; ++x) l = std::max(l, L.exit_rate(x));
  if (!(l > 0.0)) throw Error(ErrorCode::ZeroGenerator, "phi_map needs a nonzero generator");
  Matrix k = L.rates() / l;
  for (int x = 0; x < n; ++x) k(x, x) = std::max(0.0, 1.0 - L.exit_rate(x) / l);
  return {Kernel(std::move(k)), l};
}

PsiResult psi_map(const Kernel& K, const ProbabilityVector& pi) {
  require_invariant(K, pi);
  double moving = 0.0;
  for (int x = 0; x < K.size(); ++x) moving += pi[x] * (1.0 - K(x, x));
  if (moving <= 1e-15) throw Error(ErrorCode::IdentityKernel, "psi_map is undefined at the identity kernel");
  const double k = 1.0 / moving;
  Matrix off = k * K.entries();
  off.diagonal().setZero();
  return {Generator::from_off_diagonal(std::move(off)), k};
}

MultisetMatch match_multisets(const std::vector<std::complex<double>>& a,
                              const std::vector<std::complex<double>>& b, double tol) {
  MultisetMatch out;
  if (a.size() != b.size()) return out;
  std::vector<char> used(b.size(), 0);
  for (const auto& z : a) {
    std::size_t best = b.size();
    double dist = kInf;
    for (std::size_t j = 0; j < b.size(); ++j)
      if (!used[j] && std::abs(z - b[j]) < dist) {
        dist = std::abs(z - b[j]);
        best = j;
      }
    used[best] = 1;
    out.max_distance = std::max(out.max_distance, dist);
  }
  out.matched = out.max_distance <= tol;
  return out;
}

DiscreteWedge frak_f_wedge(const DirectedGraph& g, const ProbabilityVector& pi) {
  if (g.size() != pi.size()) throw Error(ErrorCode::InvalidInput, "graph and pi differ in size");
  const auto cycles = enumerate_simple_cycles(g);
  if (cycles.empty()) throw Error(ErrorCode::NotIrreducible, "graph has no cycles");
  std::vector<Matrix> mats;
  for (const auto& c : cycles) mats.push_back(cycle_generator(pi, c).rates());
  const std::size_t k = cycles.size();

  std::vector<std::vector<double>> starts;
  starts.emplace_back(k, 1.0 / static_cast<double>(k));
  {
    const auto fw = frank_wolfe_minimize(g, pi);
    std::vector<double> w(k, 0.0);
    for (std::size_t a = 0; a < fw.cycles.size(); ++a)
      for (std::size_t b = 0; b < k; ++b)
        if (cycles[b] == fw.cycles[a]) w[b] = fw.weights[a];
    starts.push_back(std::move(w));
  }
  for (std::size_t c = 0; c < k; ++c)
    if (static_cast<int>(cycles[c].length()) == g.size()) {
      std::vector<double> w(k, 0.0);
      w[c] = 1.0;
      starts.push_back(std::move(w));
    }

  std::vector<double> best_w;
  double best = kInf;
  for (auto w : starts) {
    double v = scaled_f(mats, w, pi);
    if (!std::isfinite(v)) continue;
    pattern_search(mats, pi, w, v, 0.125);
    if (v < best) {
      best = v;
      best_w = std::move(w);
    }
  }

  if (k <= 6) {
    int res = 2;
    auto points = [k](int r) {
      double p = 1.0;
      for (std::size_t i = 1; i < k; ++i) p = p * static_cast<double>(r + static_cast<int>(i)) / static_cast<double>(i);
      return p;
    };
    while (res < 400 && points(res + 1) <= 1e5) ++res;
    std::vector<int> parts(k, 0);
    std::vector<double> grid_w;
    double grid_best = kInf;
    auto visit = [&](auto&& self, std::size_t idx, int left) -> void {
      if (idx + 1 == k) {
        parts[idx] = left;
        std::vector<double> w(k);
        for (std::size_t j = 0; j < k; ++j) w[j] = static_cast<double>(parts[j]) / res;
        const double v = scaled_f(mats, w, pi);
        if (v < grid_best) {
          grid_best = v;
          grid_w = std::move(w);
        }
        return;
      }
      for (int p = 0; p <= left; ++p) {
        parts[idx] = p;
        self(self, idx + 1, left - p);
      }
    };
    visit(visit, 0, res);
    if (!grid_w.empty()) {
      pattern_search(mats, pi, grid_w, grid_best, 1.0 / res);
      if (grid_best < best) {
        best = grid_best;
        best_w = std::move(grid_w);
      }
    }
  }
  if (best_w.empty()) throw Error(ErrorCode::NotIrreducible, "no irreducible compatible generator found");

  Matrix rates = Matrix::Zero(pi.size(), pi.size());
  for (std::size_t c = 0; c < k; ++c) rates += best_w[c] * mats[c];
  rates.diagonal().setZero();
  const auto phi = phi_map(Generator::from_off_diagonal(rates));
  return {frak_f(phi.kernel, pi), phi.kernel};
}

WedgeComparison compare_wedges(const DirectedGraph& g, const ProbabilityVector& pi) {
  WedgeComparison out;
  out.f_wedge = f_wedge(g, pi);
  const auto d = frak_f_wedge(g, pi);
  out.frak_f_wedge = d.value;
  out.discrete_minimizer = d.minimizer;
  out.gap = out.frak_f_wedge - out.f_wedge;
  return out;
}

}  // namespace fastchain
