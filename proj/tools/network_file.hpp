#ifndef GMDIAG_TOOLS_NETWORK_FILE_HPP
#define GMDIAG_TOOLS_NETWORK_FILE_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "gmdiag/network.hpp"
#include "gmdiag/transform.hpp"

// JSON network files.  Schema:
//
//   {
//     "kind": "bayesian" | "markov",
//     "variables": [{"name": "A", "elements": ["x", "xbar"]}, ...],
//     "edges": [["A", "B"], ...],
//     "kernels": [{"scope": ["A", "B"], "table": [...]}, ...]   (bayesian)
//     "factors": [{"scope": ["A", "B"], "table": [...]}, ...]   (markov)
//   }
//
// Variable declaration order defines the vertex order.  Tables are flat and
// row-major over the scope with the last variable fastest.  A Bayesian
// kernel's scope must be the parents (ascending) followed by the vertex
// itself, and each table column must sum to 1 within 1e-6 (columns are then
// rescaled to sum to 1 exactly).  A Markov factor's scope must be a clique
// in ascending order; omitted cliques default to the all-ones factor.

namespace gmdiag_tools {

// Parse or validation failure; the CLI maps it to exit code 2.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NetworkFile {
  std::optional<gmdiag::BayesianNetwork> bayesian;
  std::optional<gmdiag::MarkovNetwork> markov;
  bool is_bayesian() const { return bayesian.has_value(); }
};

NetworkFile parse_network_text(const std::string& text);
NetworkFile load_network(const std::string& path);

// Canonical serialization: fixed key order, stored factors only, floats with
// 10 significant digits.  Byte-deterministic for a given network.
std::string write_bayesian(const gmdiag::BayesianNetwork& bn);
std::string write_markov(const gmdiag::MarkovNetwork& mn);

// The --dump-unnormalized payload: per-vertex unnormalized tables, absorbed
// column-sum tables, and the normalizing constant of a triangulation run.
std::string write_unnormalized(const gmdiag::TriangulateResult& result);

// Formats a double with 10 significant digits (%.10g).
std::string format_double(double value);

}  // namespace gmdiag_tools

#endif  // GMDIAG_TOOLS_NETWORK_FILE_HPP
