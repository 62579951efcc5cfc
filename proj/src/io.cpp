#include "fastchain/io.hpp"

#include <fstream>
#include <sstream>

namespace fastchain::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

int size_field(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer()) bad("expected an object with integer \"n\"");
  const int n = j["n"].get<int>();
  if (n < 1) bad("\"n\" must be positive");
  return n;
}

double number(const Json& j) {
  if (!j.is_number()) bad("expected a number");
  return j.get<double>();
}

}  // namespace

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    bad(path + ": " + e.what());
  }
}

DirectedGraph graph_from_json(const Json& j) {
  const int n = size_field(j);
  if (!j.contains("edges") || !j["edges"].is_array()) bad("graph needs an \"edges\" array");
  std::vector<Arc> arcs;
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      bad("each edge must be [i, j]");
    arcs.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  try {
    return DirectedGraph(n, arcs);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    bad(e.what());
  }
}

Cycle cycle_from_json(const Json& j) {
  if (!j.is_array()) bad("cycle must be an array of vertices");
  std::vector<Vertex> v;
  for (const auto& x : j) {
    if (!x.is_number_integer()) bad("cycle entries must be integers");
    v.push_back(x.get<int>());
  }
  return Cycle(v);
}

Matrix matrix_from_json(const Json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) bad("matrix must have n rows");
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) bad("matrix rows must have n entries");
    for (int c = 0; c < n; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

Generator generator_from_json(const Json& j) {
  const int n = size_field(j);
  if (!j.contains("rates")) bad("generator needs \"rates\"");
  return Generator(matrix_from_json(j["rates"], n));
}

Kernel kernel_from_json(const Json& j) {
  const int n = size_field(j);
  if (!j.contains("rates")) bad("kernel needs \"rates\"");
  return Kernel(matrix_from_json(j["rates"], n));
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) bad("expected a non-empty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i]);
  return v;
}

ProbabilityVector pi_from_json(const Json& j) { return ProbabilityVector(vector_from_json(j)); }

CycleDecomposition decomposition_from_json(const Json& j) {
  if (!j.is_array()) bad("decomposition must be an array");
  CycleDecomposition d;
  for (const auto& t : j) {
    if (!t.is_object() || !t.contains("cycle") || !t.contains("weight")) bad("terms need \"cycle\" and \"weight\"");
    d.terms.push_back({cycle_from_json(t["cycle"]), number(t["weight"])});
  }
  return d;
}

Json to_json(const DirectedGraph& g) {
  Json edges = Json::array();
  for (const auto& [x, y] : g.arcs()) edges.push_back({x, y});
  return {{"n", g.size()}, {"edges", edges}};
}

Json to_json(const Cycle& c) { return Json(c.vertices()); }

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json to_json(const Generator& L) { return {{"n", L.size()}, {"rates", to_json(L.rates())}}; }

Json to_json(const Kernel& K) { return {{"n", K.size()}, {"rates", to_json(K.entries())}}; }

Json to_json(const ProbabilityVector& pi) { return to_json(pi.weights()); }

Json to_json(const CycleDecomposition& d) {
  Json out = Json::array();
  for (const auto& t : d.terms) out.push_back({{"cycle", to_json(t.cycle)}, {"weight", t.weight}});
  return out;
}

Json to_json(const std::vector<std::complex<double>>& spectrum) {
  Json out = Json::array();
  for (const auto& z : spectrum) out.push_back({z.real(), z.imag()});
  return out;
}

Json to_json(const HittingReport& r) {
  return {{"expectations", to_json(r.expectations)},
          {"second_moments", to_json(r.second_moments)},
          {"kemeny", r.kemeny},
          {"f_value", r.f_value},
          {"h_matrix", to_json(r.h_matrix)}};
}

Json to_json(const StationarityReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"cycle", to_json(e.cycle)}, {"h", e.h}, {"gap", e.gap}, {"below", e.below}});
  return {{"f", r.f}, {"max_gap", r.max_gap}, {"entries", entries}};
}

Json to_json(const OptimizeReport& r) {
  Json decomposition = Json::array();
  for (std::size_t k = 0; k < r.cycles.size(); ++k)
    if (r.weights[k] > 0.0) decomposition.push_back({{"cycle", to_json(r.cycles[k])}, {"weight", r.weights[k]}});
  return {{"f_min", r.f_min},
          {"minimizer", to_json(r.minimizer)},
          {"decomposition", decomposition},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"fw_gap", r.fw_gap},
          {"certificate", to_json(r.certificate)}};
}

Json to_json(const CounterexampleReport& r) {
  Json trees = Json::array();
  for (const auto& [x, y] : r.tree_edges) trees.push_back({x, y});
  Json hams = Json::array();
  for (std::size_t k = 0; k < r.hamiltonian_cycles.size(); ++k)
    hams.push_back({{"cycle", to_json(r.hamiltonian_cycles[k])}, {"f", r.hamiltonian_values[k]}});
  return {{"graph", to_json(r.graph)},
          {"short_cycle", to_json(r.short_cycle)},
          {"tree_edges", trees},
          {"r", r.r},
          {"eps", r.eps},
          {"pi", to_json(r.pi)},
          {"generator", to_json(r.generator)},
          {"f_perturbed", r.f_perturbed},
          {"f_unperturbed", r.f_unperturbed},
          {"hamiltonian", hams},
          {"margin", r.margin}};
}

Json to_json(const S2ClosedForm& r) {
  return {{"branch", r.branch},       {"relabeled", r.relabeled}, {"f_min", r.f_min},
          {"weight_01", r.weight_01}, {"a", r.a},                 {"generator", to_json(r.generator)}};
}

Json to_json(const Theorem2Report& r) {
  Json details = Json::array();
  for (const auto& t : r.details)
    details.push_back(
        {{"pi", to_json(t.pi)}, {"f_min", t.f_min}, {"distance", t.distance}, {"hamiltonian", t.hamiltonian}});
  return {{"trials", r.trials},
          {"successes", r.successes},
          {"success_fraction", r.success_fraction},
          {"details", details}};
}

Json to_json(const WedgeComparison& r) {
  return {{"f_wedge", r.f_wedge},
          {"frak_f_wedge", r.frak_f_wedge},
          {"gap", r.gap},
          {"discrete_minimizer", to_json(r.discrete_minimizer)}};
}

Json check(const std::string& name, double residual, double tolerance) {
  return {{"name", name}, {"residual", residual}, {"tolerance", tolerance}, {"passed", residual <= tolerance}};
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::CycleBudgetExceeded:
    case ErrorCode::TooManyCycles:
    case ErrorCode::StateSpaceTooLarge:
      return 4;
    case ErrorCode::NotConverged:
    case ErrorCode::SearchExhausted:
    case ErrorCode::SpectrumAmbiguous:
    case ErrorCode::SingularMatrix:
    case ErrorCode::NumericalMismatch:
      return 3;
    default:
      return 2;
  }
}

}  // namespace fastchain::io
