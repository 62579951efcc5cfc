#include "fastchain/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "fastchain/error.hpp"

namespace fastchain {

ProbabilityVector::ProbabilityVector(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw Error(ErrorCode::InvalidInput, "empty probability vector");
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
      throw Error(ErrorCode::NotPositive, "probability entries must be finite and > 0");
  }
  if (std::abs(weights_.sum() - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidInput, "probability vector must sum to 1");
  min_ = weights_.minCoeff();
}

ProbabilityVector ProbabilityVector::from_unnormalized(const Vector& weights) {
  const double total = weights.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::NotPositive, "weights must have positive mass");
  return ProbabilityVector(weights / total);
}

ProbabilityVector ProbabilityVector::uniform(int n) {
  if (n <= 0) throw Error(ErrorCode::InvalidInput, "uniform law needs n > 0");
  return ProbabilityVector(Vector::Constant(n, 1.0 / n));
}

Generator::Generator(Matrix rates) : rates_(std::move(rates)) {
  if (rates_.rows() == 0 || rates_.rows() != rates_.cols())
    throw Error(ErrorCode::InvalidInput, "generator must be a non-empty square matrix");
  for (Eigen::Index x = 0; x < rates_.rows(); ++x) {
    double scale = 1.0;
    for (Eigen::Index y = 0; y < rates_.cols(); ++y) {
      const double v = rates_(x, y);
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "non-finite generator entry");
      if (x != y && v < 0.0) throw Error(ErrorCode::InvalidInput, "negative off-diagonal rate");
      scale = std::max(scale, std::abs(v));
    }
    if (std::abs(rates_.row(x).sum()) > 1e-12 * scale)
      throw Error(ErrorCode::InvalidInput, "generator row " + std::to_string(x) + " does not sum to 0");
  }
}

Generator Generator::from_off_diagonal(Matrix rates) {
  for (Eigen::Index x = 0; x < rates.rows(); ++x) {
    rates(x, x) = 0.0;
    rates(x, x) = -rates.row(x).sum();
  }
  return Generator(std::move(rates));
}

DirectedGraph Generator::support() const {
  std::vector<Arc> arcs;
  for (int x = 0; x < size(); ++x)
    for (int y = 0; y < size(); ++y)
      if (x != y && rates_(x, y) > 0.0) arcs.emplace_back(x, y);
  return DirectedGraph(size(), arcs);
}

bool Generator::is_irreducible() const { return is_strongly_connected(support()); }

Generator Generator::scaled(double factor) const { return Generator(Matrix(rates_ * factor)); }

double CycleDecomposition::total_weight() const {
  double s = 0.0;
  for (const auto& t : terms) s += t.weight;
  return s;
}

Generator cycle_generator(const ProbabilityVector& pi, const Cycle& cycle) {
  const int n = pi.size();
  Matrix rates = Matrix::Zero(n, n);
  const double len = static_cast<double>(cycle.length());
  for (std::size_t l = 0; l < cycle.length(); ++l) {
    const Vertex a = cycle[l];
    if (a >= n) throw Error(ErrorCode::InvalidInput, "cycle vertex out of range");
    const double rate = 1.0 / (len * pi[a]);
    rates(a, cycle.next(l)) = rate;
    rates(a, a) = -rate;
  }
  return Generator(std::move(rates));
}

ProbabilityVector invariant_measure(const Generator& L) {
  if (!L.is_irreducible()) throw Error(ErrorCode::NotIrreducible, "support graph is not strongly connected");
  const int n = L.size();
  if (n == 1) return ProbabilityVector::uniform(1);
  // pi L = 0 is transpose(L) pi = 0; replace the last equation by sum(pi) = 1.
  Matrix a = L.rates().transpose();
  a.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs[n - 1] = 1.0;
  Vector pi = a.partialPivLu().solve(rhs);
  for (int i = 0; i < n; ++i) pi[i] = std::max(pi[i], 0.0);
  return ProbabilityVector::from_unnormalized(pi);
}

double equilibrium_jump_rate(const Generator& L, const ProbabilityVector& pi) {
  double s = 0.0;
  for (int x = 0; x < L.size(); ++x) s += pi[x] * L.exit_rate(x);
  return s;
}

double invariance_residual(const Generator& L, const ProbabilityVector& pi) {
  return (pi.weights().transpose() * L.rates()).cwiseAbs().maxCoeff();
}

Generator normalize(const Generator& L, const ProbabilityVector& pi) {
  if (L.size() != pi.size()) throw Error(ErrorCode::InvalidInput, "dimension mismatch");
  const double rate = equilibrium_jump_rate(L, pi);
  if (!(rate > 0.0)) throw Error(ErrorCode::ZeroGenerator, "all rates vanish");
  return L.scaled(1.0 / rate);
}

void require_normalized_invariant(const Generator& L, const ProbabilityVector& pi) {
  if (L.size() != pi.size()) throw Error(ErrorCode::InvalidInput, "dimension mismatch");
  const double scale = std::max(1.0, L.rates().cwiseAbs().maxCoeff());
  if (invariance_residual(L, pi) > kMembershipTol * scale)
    throw Error(ErrorCode::NotInvariant, "pi is not invariant for the generator");
  if (std::abs(equilibrium_jump_rate(L, pi) - 1.0) > kMembershipTol)
    throw Error(ErrorCode::NotNormalized, "generator is not normalized");
}

CycleDecomposition decompose_into_cycles(const Generator& L, const ProbabilityVector& pi) {
  require_normalized_invariant(L, pi);
  const int n = L.size();
  Matrix flow(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) flow(x, y) = (x == y) ? 0.0 : pi[x] * L(x, y);

  // Flow below this is conservation round-off, not structure.
  const double drop = 1e-15 * std::max(1.0, flow.maxCoeff());
  std::map<Cycle, double> weights;

  auto best_out = [&](int v) {
    int arg = -1;
    double best = drop;
    for (int w = 0; w < n; ++w)
      if (flow(v, w) > best) {
        best = flow(v, w);
        arg = w;
      }
    return arg;
  };

  for (;;) {
    Eigen::Index sx = 0, sy = 0;
    if (flow.maxCoeff(&sx, &sy) <= drop) break;
    std::vector<int> walk{static_cast<int>(sx)};
    std::vector<int> position(static_cast<std::size_t>(n), -1);
    position[static_cast<std::size_t>(sx)] = 0;
    int current = static_cast<int>(sx);
    int next = static_cast<int>(sy);
    bool stuck = false;
    while (position[static_cast<std::size_t>(next)] < 0) {
      position[static_cast<std::size_t>(next)] = static_cast<int>(walk.size());
      walk.push_back(next);
      const int after = best_out(next);
      if (after < 0) {
        // Only round-off inflow reaches this vertex: discard the arc we came in on.
        flow(current, next) = 0.0;
        stuck = true;
        break;
      }
      current = next;
      next = after;
    }
    if (stuck) continue;
    std::vector<Vertex> cyc(walk.begin() + position[static_cast<std::size_t>(next)], walk.end());
    double bottleneck = flow(cyc.back(), cyc.front());
    for (std::size_t i = 0; i + 1 < cyc.size(); ++i) bottleneck = std::min(bottleneck, flow(cyc[i], cyc[i + 1]));
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      double& f = flow(cyc[i], cyc[(i + 1) % cyc.size()]);
      f = (f - bottleneck <= drop) ? 0.0 : f - bottleneck;
    }
    weights[Cycle(cyc)] += static_cast<double>(cyc.size()) * bottleneck;
  }

  CycleDecomposition out;
  for (const auto& [cycle, w] : weights) out.terms.push_back({cycle, w});
  return out;
}

Generator combine(const CycleDecomposition& d, const ProbabilityVector& pi) {
  const int n = pi.size();
  Matrix rates = Matrix::Zero(n, n);
  for (const auto& term : d.terms) {
    if (term.weight < 0.0) throw Error(ErrorCode::InvalidInput, "negative decomposition weight");
    rates += term.weight * cycle_generator(pi, term.cycle).rates();
  }
  return Generator::from_off_diagonal(std::move(rates));
}

bool is_compatible(const Generator& L, const DirectedGraph& g) {
  if (L.size() != g.size()) throw Error(ErrorCode::InvalidInput, "dimension mismatch");
  for (int x = 0; x < L.size(); ++x)
    for (int y = 0; y < L.size(); ++y)
      if (x != y && L(x, y) > 0.0 && !g.has_arc(x, y)) return false;
  return true;
}

}  // namespace fastchain
