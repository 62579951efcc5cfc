#include "fastchain/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fastchain/derivatives.hpp"
#include "fastchain/eigentime.hpp"
#include "fastchain/error.hpp"
#include "fastchain/random.hpp"

namespace fastchain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Off-diagonal round-off below zero is clipped and the diagonal rebuilt.
Generator clean_generator(Matrix rates) {
  const double scale = std::max(1.0, rates.cwiseAbs().maxCoeff());
  for (Eigen::Index x = 0; x < rates.rows(); ++x)
    for (Eigen::Index y = 0; y < rates.cols(); ++y)
      if (x != y && rates(x, y) < 0.0) {
        if (rates(x, y) < -1e-12 * scale) throw Error(ErrorCode::InvalidInput, "negative rate in combination");
        rates(x, y) = 0.0;
      }
  return Generator::from_off_diagonal(std::move(rates));
}

std::vector<Matrix> cycle_matrices(const std::vector<Cycle>& cycles, const ProbabilityVector& pi) {
  std::vector<Matrix> out;
  out.reserve(cycles.size());
  for (const auto& c : cycles) out.push_back(cycle_generator(pi, c).rates());
  return out;
}

Matrix weighted_sum(const std::vector<Matrix>& mats, const std::vector<double>& w) {
  Matrix out = Matrix::Zero(mats.front().rows(), mats.front().cols());
  for (std::size_t k = 0; k < mats.size(); ++k)
    if (w[k] != 0.0) out += w[k] * mats[k];
  return out;
}

std::vector<Cycle> cycles_of(const DirectedGraph& g, std::size_t budget) {
  if (!is_strongly_connected(g)) throw Error(ErrorCode::NotIrreducible, "graph is not strongly connected");
  return enumerate_simple_cycles(g, budget);
}

// Minimizes phi on [0, hi] with a 33-point presample and golden-section
// refinement of the best bracket. Returns (t, phi(t)).
std::pair<double, double> line_search(const std::function<double(double)>& phi, double hi) {
  constexpr int kSamples = 32;
  std::vector<double> vals(kSamples + 1);
  int best = 0;
  for (int i = 0; i <= kSamples; ++i) {
    vals[static_cast<std::size_t>(i)] = phi(hi * i / kSamples);
    if (vals[static_cast<std::size_t>(i)] < vals[static_cast<std::size_t>(best)]) best = i;
  }
  double best_t = hi * best / kSamples;
  double best_v = vals[static_cast<std::size_t>(best)];
  double a = hi * std::max(0, best - 1) / kSamples;
  double b = hi * std::min(kSamples, best + 1) / kSamples;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = phi(c), fd = phi(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = phi(d);
    }
  }
  if (fc < best_v) {
    best_v = fc;
    best_t = c;
  }
  if (fd < best_v) {
    best_v = fd;
    best_t = d;
  }
  return {best_t, best_v};
}

OptimizeReport finish(const std::vector<Cycle>& cycles, const std::vector<Matrix>& mats, const ProbabilityVector& pi,
                      std::vector<double> w, int iterations, double tol, bool stalled) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= total;
  double f = f_or_infinity(weighted_sum(mats, w), pi);

  // Snap negligible weights when that keeps the point irreducible and no worse.
  std::vector<double> snapped = w;
  bool changed = false;
  for (auto& v : snapped)
    if (v > 0.0 && v < 1e-9) {
      v = 0.0;
      changed = true;
    }
  if (changed) {
    const double s = std::accumulate(snapped.begin(), snapped.end(), 0.0);
    for (auto& v : snapped) v /= s;
    const double fs = f_or_infinity(weighted_sum(mats, snapped), pi);
    if (std::isfinite(fs) && fs <= f + 1e-9) {
      w = std::move(snapped);
      f = fs;
    }
  }

  OptimizeReport r;
  r.minimizer = clean_generator(weighted_sum(mats, w));
  r.cycles = cycles;
  r.weights = std::move(w);
  r.iterations = iterations;
  r.certificate = stationarity_check(r.minimizer, pi, cycles);
  r.f_min = r.certificate.f;
  double max_h = -kInf;
  for (const auto& e : r.certificate.entries) max_h = std::max(max_h, e.h);
  r.fw_gap = max_h - r.f_min;
  // A stall means no representable decrease remains along any pairwise or
  // Frank-Wolfe segment; accept it when the certificate is still tight.
  r.converged = r.fw_gap <= tol || (stalled && r.certificate.max_gap <= 1e-6);
  return r;
}

}  // namespace

Generator combine_weights(const std::vector<Cycle>& cycles, const std::vector<double>& weights,
                          const ProbabilityVector& pi) {
  if (cycles.size() != weights.size() || cycles.empty())
    throw Error(ErrorCode::InvalidInput, "cycle and weight lists differ in length");
  for (double w : weights)
    if (!(w >= 0.0)) throw Error(ErrorCode::InvalidInput, "negative cycle weight");
  return clean_generator(weighted_sum(cycle_matrices(cycles, pi), weights));
}

double f_or_infinity(const Matrix& rates, const ProbabilityVector& pi) {
  const Generator L = clean_generator(rates);
  if (!L.is_irreducible()) return kInf;
  const Matrix m = expected_hitting_times(L, pi);
  const double f = pi.weights().dot(m * pi.weights());
  return std::isfinite(f) ? f : kInf;
}

OptimizeReport frank_wolfe_run(const std::vector<Cycle>& cycles, const ProbabilityVector& pi,
                               std::vector<double> w, const OptimizeOptions& opts) {
  const std::size_t k = cycles.size();
  if (k == 0 || w.size() != k) throw Error(ErrorCode::InvalidInput, "start weights do not match the cycle list");
  const auto mats = cycle_matrices(cycles, pi);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= total;

  Matrix current = weighted_sum(mats, w);
  double f = f_or_infinity(current, pi);
  if (!std::isfinite(f)) throw Error(ErrorCode::NotIrreducible, "starting point is reducible");

  int it = 0;
  bool stalled = false;
  for (; it < opts.max_iters; ++it) {
    if (it % 64 == 0) current = weighted_sum(mats, w);
    const HittingAnalysis an(clean_generator(current), pi);
    f = an.f_value();
    std::vector<double> h(k);
    for (std::size_t j = 0; j < k; ++j) h[j] = h_cycle(an, cycles[j]);
    const std::size_t fw = static_cast<std::size_t>(std::max_element(h.begin(), h.end()) - h.begin());
    if (h[fw] - f <= opts.tol) break;

    std::size_t away = k;
    for (std::size_t j = 0; j < k; ++j)
      if (w[j] > 0.0 && j != fw && (away == k || h[j] < h[away])) away = j;

    const double min_decrease = 1e-14 * std::max(1.0, std::abs(f));
    bool moved = false;
    if (away < k) {
      const Matrix dir = mats[fw] - mats[away];
      const double hi = w[away];
      auto phi = [&](double t) {
        if (t >= hi) {
          std::vector<double> tmp = w;
          tmp[fw] += tmp[away];
          tmp[away] = 0.0;
          return f_or_infinity(weighted_sum(mats, tmp), pi);
        }
        return f_or_infinity(current + t * dir, pi);
      };
      const auto [t, v] = line_search(phi, hi);
      if (v < f - min_decrease) {
        if (t >= hi) {
          w[fw] += w[away];
          w[away] = 0.0;
          current = weighted_sum(mats, w);
        } else {
          w[fw] += t;
          w[away] -= t;
          current += t * dir;
        }
        moved = true;
      }
    }
    if (!moved) {
      const Matrix dir = mats[fw] - current;
      auto phi = [&](double t) { return f_or_infinity(current + t * dir, pi); };
      const auto [t, v] = line_search(phi, 1.0);
      if (v < f - min_decrease) {
        for (auto& x : w) x *= (1.0 - t);
        w[fw] += t;
        current += t * dir;
        moved = true;
      }
    }
    if (!moved) {
      stalled = true;
      break;
    }
  }
  return finish(cycles, mats, pi, std::move(w), it, opts.tol, stalled);
}

OptimizeReport frank_wolfe_minimize(const DirectedGraph& g, const ProbabilityVector& pi, const OptimizeOptions& opts) {
  if (g.size() != pi.size()) throw Error(ErrorCode::InvalidInput, "graph and pi differ in size");
  const auto cycles = cycles_of(g, opts.cycle_budget);
  const std::size_t k = cycles.size();
  Rng rng(opts.seed);
  OptimizeReport best;
  bool have = false;
  for (int start = 0; start <= opts.restarts; ++start) {
    std::vector<double> w(k, 1.0 / static_cast<double>(k));
    if (start > 0) w = rng.dirichlet(k);
    auto r = frank_wolfe_run(cycles, pi, std::move(w), opts);
    if (!have || r.f_min < best.f_min - 1e-12 || (r.f_min <= best.f_min + 1e-12 && r.converged && !best.converged)) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

OptimizeReport brute_force_minimize(const DirectedGraph& g, const ProbabilityVector& pi, int grid_resolution,
                                    bool zoom) {
  if (g.size() != pi.size()) throw Error(ErrorCode::InvalidInput, "graph and pi differ in size");
  if (grid_resolution < 10) throw Error(ErrorCode::InvalidInput, "grid resolution must be >= 10");
  std::vector<Cycle> cycles;
  try {
    cycles = cycles_of(g, 6);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::CycleBudgetExceeded) throw;
    throw Error(ErrorCode::TooManyCycles, "brute force handles at most 6 cycles");
  }
  const std::size_t k = cycles.size();
  // Grid size C(res + k - 1, k - 1).
  double points = 1.0;
  for (std::size_t i = 1; i < k; ++i) points = points * static_cast<double>(grid_resolution + i) / static_cast<double>(i);
  if (points > 2e7) throw Error(ErrorCode::InvalidInput, "grid too large; lower the resolution");

  const auto mats = cycle_matrices(cycles, pi);
  std::vector<int> parts(k, 0);
  std::vector<double> best_w;
  double best_f = kInf;
  auto visit = [&](auto&& self, std::size_t idx, int left) -> void {
    if (idx + 1 == k) {
      parts[idx] = left;
      std::vector<double> w(k);
      for (std::size_t j = 0; j < k; ++j) w[j] = static_cast<double>(parts[j]) / grid_resolution;
      const double f = f_or_infinity(weighted_sum(mats, w), pi);
      if (f < best_f) {
        best_f = f;
        best_w = std::move(w);
      }
      return;
    }
    for (int p = 0; p <= left; ++p) {
      parts[idx] = p;
      self(self, idx + 1, left - p);
    }
  };
  visit(visit, 0, grid_resolution);
  if (best_w.empty()) throw Error(ErrorCode::NotIrreducible, "no irreducible grid point");

  if (zoom) {
    for (double step = 1.0 / grid_resolution; step > 1e-12; step /= 2.0) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) {
            if (i == j || best_w[j] <= 0.0) continue;
            std::vector<double> w = best_w;
            const double move = std::min(step, w[j]);
            w[i] += move;
            w[j] -= move;
            const double f = f_or_infinity(weighted_sum(mats, w), pi);
            if (f < best_f - 1e-15) {
              best_f = f;
              best_w = std::move(w);
              improved = true;
            }
          }
      }
    }
  }

  OptimizeReport r;
  r.cycles = cycles;
  r.weights = best_w;
  r.minimizer = clean_generator(weighted_sum(mats, best_w));
  r.certificate = stationarity_check(r.minimizer, pi, cycles);
  r.f_min = r.certificate.f;
  double max_h = -kInf;
  for (const auto& e : r.certificate.entries) max_h = std::max(max_h, e.h);
  r.fw_gap = max_h - r.f_min;
  r.converged = true;
  return r;
}

StationarityReport stationarity_check(const Generator& L, const ProbabilityVector& pi,
                                      const std::vector<Cycle>& cycles) {
  const HittingAnalysis an(L, pi);
  StationarityReport r;
  r.f = an.f_value();
  for (const auto& c : cycles) {
    for (Vertex v : c.vertices())
      if (v >= L.size()) throw Error(ErrorCode::InvalidInput, "cycle vertex out of range");
    CertificateEntry e;
    e.cycle = c;
    e.h = h_cycle(an, c);
    e.gap = e.h - r.f;
    e.below = true;
    for (std::size_t l = 0; l < c.length(); ++l) e.below = e.below && L(c[l], c.next(l)) > 0.0;
    r.max_gap = std::max(r.max_gap, e.below ? std::abs(e.gap) : std::max(e.gap, 0.0));
    r.entries.push_back(std::move(e));
  }
  return r;
}

EpsilonNeighborhood epsilon_neighborhood(int n, double pi_min) {
  if (n < 2) throw Error(ErrorCode::DomainError, "N must be >= 2");
  if (!(pi_min > 0.0) || pi_min > 1.0 / n + 1e-15) throw Error(ErrorCode::DomainError, "pi_min must lie in (0, 1/N]");
  EpsilonNeighborhood e;
  const double p2 = pi_min * pi_min;
  e.eps1 = p2 * p2 * std::log1p(1.0 / (n * p2));
  e.eps2 = std::pow(pi_min, 12) / 56.0;
  e.eps = std::min(e.eps1, e.eps2);
  return e;
}

double f_wedge(const DirectedGraph& g, const ProbabilityVector& pi, const OptimizeOptions& opts) {
  double best = frank_wolfe_minimize(g, pi, opts).f_min;
  const auto cycles = cycles_of(g, opts.cycle_budget);
  if (cycles.size() <= 6) {
    // Largest resolution keeping the grid near 1e5 points.
    int res = 10;
    auto count = [&](int r) {
      double p = 1.0;
      for (std::size_t i = 1; i < cycles.size(); ++i) p = p * static_cast<double>(r + i) / static_cast<double>(i);
      return p;
    };
    while (res < 1000 && count(res * 2) <= 1e5) res *= 2;
    best = std::min(best, brute_force_minimize(g, pi, res, true).f_min);
  }
  return best;
}

}  // namespace fastchain
