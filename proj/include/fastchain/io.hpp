#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "fastchain/discrete_time.hpp"
#include "fastchain/dp.hpp"
#include "fastchain/eigentime.hpp"
#include "fastchain/error.hpp"
#include "fastchain/experiments.hpp"
#include "fastchain/generator.hpp"
#include "fastchain/graph.hpp"
#include "fastchain/optimizer.hpp"

namespace fastchain::io {

using Json = nlohmann::ordered_json;

/// Reads and parses a JSON file; InvalidInput on a missing file or bad syntax.
Json read_file(const std::string& path);

// Parsers throw InvalidInput on shape errors; the constructors they call add
// their own validation.
DirectedGraph graph_from_json(const Json& j);
Cycle cycle_from_json(const Json& j);
Matrix matrix_from_json(const Json& j, int n);
Generator generator_from_json(const Json& j);
Kernel kernel_from_json(const Json& j);
Vector vector_from_json(const Json& j);
ProbabilityVector pi_from_json(const Json& j);
CycleDecomposition decomposition_from_json(const Json& j);

Json to_json(const DirectedGraph& g);
Json to_json(const Cycle& c);
Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Json to_json(const Generator& L);
Json to_json(const Kernel& K);
Json to_json(const ProbabilityVector& pi);
Json to_json(const CycleDecomposition& d);
Json to_json(const std::vector<std::complex<double>>& spectrum);
Json to_json(const HittingReport& r);
Json to_json(const OptimizeReport& r);
Json to_json(const StationarityReport& r);
Json to_json(const CounterexampleReport& r);
Json to_json(const S2ClosedForm& r);
Json to_json(const Theorem2Report& r);
Json to_json(const WedgeComparison& r);

/// {"name", "residual", "tolerance", "passed"} entry of a report's checks block.
Json check(const std::string& name, double residual, double tolerance);

/// 2 for input errors, 3 for numeric failures, 4 for budget errors.
int exit_code_for(ErrorCode code);

}  // namespace fastchain::io
