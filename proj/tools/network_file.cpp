#include "network_file.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace gmdiag_tools {

using gmdiag::BayesianNetwork;
using gmdiag::Edge;
using gmdiag::FiniteSet;
using gmdiag::MarkovNetwork;
using gmdiag::OrderedDag;
using gmdiag::OrderedUGraph;
using gmdiag::StochasticKernel;
using gmdiag::Tensor;
using nlohmann::json;

namespace {

std::string require_string(const json& j, const std::string& field) {
  if (!j.contains(field) || !j[field].is_string())
    throw ParseError("missing or non-string field: " + field);
  return j[field].get<std::string>();
}

const json& require_array(const json& j, const std::string& field) {
  if (!j.contains(field) || !j[field].is_array())
    throw ParseError("missing or non-array field: " + field);
  return j[field];
}

struct Declarations {
  std::vector<std::string> labels;
  std::vector<FiniteSet> sets;
  std::map<std::string, std::size_t> index;

  std::size_t resolve(const std::string& name) const {
    auto it = index.find(name);
    if (it == index.end()) throw ParseError("unknown variable: " + name);
    return it->second;
  }
};

Declarations parse_variables(const json& j) {
  Declarations decl;
  for (const json& var : require_array(j, "variables")) {
    if (!var.is_object()) throw ParseError("variables entries must be objects");
    std::string name = require_string(var, "name");
    FiniteSet set;
    set.var_name = name;
    for (const json& el : require_array(var, "elements")) {
      if (!el.is_string())
        throw ParseError("elements must be strings for variable: " + name);
      set.elements.push_back(el.get<std::string>());
    }
    if (!decl.index.emplace(name, decl.labels.size()).second)
      throw ParseError("duplicate variable: " + name);
    decl.labels.push_back(name);
    decl.sets.push_back(std::move(set));
  }
  return decl;
}

std::vector<double> parse_table(const json& entry, std::size_t expected,
                                const std::string& what) {
  const json& table = require_array(entry, "table");
  if (table.size() != expected)
    throw ParseError("table size mismatch for " + what + ": expected " +
                     std::to_string(expected) + ", got " +
                     std::to_string(table.size()));
  std::vector<double> values;
  values.reserve(table.size());
  for (const json& v : table) {
    if (!v.is_number())
      throw ParseError("table entries must be numbers for " + what);
    double value = v.get<double>();
    if (!std::isfinite(value) || value < 0.0)
      throw ParseError("table entries must be finite and nonnegative for " +
                       what);
    values.push_back(value);
  }
  return values;
}

std::vector<std::size_t> parse_scope(const Declarations& decl,
                                     const json& entry,
                                     const std::string& what) {
  std::vector<std::size_t> scope;
  for (const json& name : require_array(entry, "scope")) {
    if (!name.is_string())
      throw ParseError("scope entries must be strings for " + what);
    scope.push_back(decl.resolve(name.get<std::string>()));
  }
  return scope;
}

NetworkFile parse_bayesian(const Declarations& decl, const json& j) {
  std::vector<Edge> edges;
  if (j.contains("edges")) {
    for (const json& e : require_array(j, "edges")) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() ||
          !e[1].is_string())
        throw ParseError("edges must be pairs of variable names");
      std::size_t u = decl.resolve(e[0].get<std::string>());
      std::size_t v = decl.resolve(e[1].get<std::string>());
      if (u >= v)
        throw ParseError(
            "edge must go from an earlier variable to a later one: " +
            e[0].get<std::string>() + " -> " + e[1].get<std::string>());
      edges.emplace_back(u, v);
    }
  }
  OrderedDag dag = [&] {
    try {
      return OrderedDag(decl.labels, edges);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
  }();

  std::vector<bool> have(decl.labels.size(), false);
  std::vector<StochasticKernel> kernels(decl.labels.size());
  for (const json& entry : require_array(j, "kernels")) {
    if (!entry.is_object()) throw ParseError("kernels entries must be objects");
    std::vector<std::size_t> scope = parse_scope(decl, entry, "kernel");
    if (scope.empty()) throw ParseError("kernel scope must be non-empty");
    const std::size_t v = scope.back();
    const std::string& label = decl.labels[v];
    std::vector<std::size_t> expected = gmdiag::parents(dag, v);
    expected.push_back(v);
    if (scope != expected)
      throw ParseError(
          "kernel scope must be the parents followed by the variable: " +
          label);
    if (have[v]) throw ParseError("duplicate kernel for variable: " + label);
    have[v] = true;

    std::vector<FiniteSet> dom;
    for (std::size_t i = 0; i + 1 < scope.size(); ++i)
      dom.push_back(decl.sets[scope[i]]);
    const std::size_t ds = gmdiag::product_size(dom);
    const std::size_t card = decl.sets[v].size();
    std::vector<double> table = parse_table(entry, ds * card, "kernel " + label);

    // File layout: scope-major with the vertex fastest.  Check each column
    // sums to one, then rescale it to sum exactly.
    std::vector<double> entries(card * ds);
    for (std::size_t x = 0; x < ds; ++x) {
      double sum = 0.0;
      for (std::size_t y = 0; y < card; ++y) sum += table[x * card + y];
      if (std::abs(sum - 1.0) > 1e-6)
        throw ParseError("stochasticity violated at vertex " + label);
      for (std::size_t y = 0; y < card; ++y)
        entries[y * ds + x] = table[x * card + y] / sum;
    }
    kernels[v] = StochasticKernel(
        Tensor(std::move(dom), {decl.sets[v]}, std::move(entries)));
  }
  for (std::size_t v = 0; v < decl.labels.size(); ++v)
    if (!have[v])
      throw ParseError("missing kernel for variable: " + decl.labels[v]);

  NetworkFile out;
  try {
    out.bayesian.emplace(std::move(dag), decl.sets, std::move(kernels));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return out;
}

NetworkFile parse_markov(const Declarations& decl, const json& j) {
  std::vector<Edge> edges;
  if (j.contains("edges")) {
    for (const json& e : require_array(j, "edges")) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() ||
          !e[1].is_string())
        throw ParseError("edges must be pairs of variable names");
      std::size_t u = decl.resolve(e[0].get<std::string>());
      std::size_t v = decl.resolve(e[1].get<std::string>());
      if (u == v) throw ParseError("self-loops are not allowed");
      edges.emplace_back(std::min(u, v), std::max(u, v));
    }
  }
  OrderedUGraph graph = [&] {
    try {
      return OrderedUGraph(decl.labels, edges);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
  }();

  std::map<std::vector<std::size_t>, Tensor> factors;
  if (j.contains("factors")) {
    for (const json& entry : require_array(j, "factors")) {
      if (!entry.is_object())
        throw ParseError("factors entries must be objects");
      std::vector<std::size_t> scope = parse_scope(decl, entry, "factor");
      if (scope.empty()) throw ParseError("factor scope must be non-empty");
      for (std::size_t i = 1; i < scope.size(); ++i)
        if (scope[i - 1] >= scope[i])
          throw ParseError("factor scope must follow the variable order");
      std::vector<FiniteSet> cod;
      std::string name;
      for (std::size_t v : scope) {
        cod.push_back(decl.sets[v]);
        name += (name.empty() ? "" : ",") + decl.labels[v];
      }
      std::vector<double> table =
          parse_table(entry, gmdiag::product_size(cod), "factor " + name);
      if (!factors.emplace(scope, Tensor({}, std::move(cod), std::move(table)))
               .second)
        throw ParseError("duplicate factor scope: " + name);
    }
  }
  NetworkFile out;
  try {
    out.markov.emplace(std::move(graph), decl.sets, std::move(factors));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return out;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

void write_string_list(std::ostringstream& out,
                       const std::vector<std::string>& items) {
  out << '[';
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out << ", ";
    out << '"' << json_escape(items[i]) << '"';
  }
  out << ']';
}

void write_table(std::ostringstream& out, const std::vector<double>& values) {
  out << '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << ", ";
    out << format_double(values[i]);
  }
  out << ']';
}

void write_variables(std::ostringstream& out,
                     const std::vector<FiniteSet>& sets) {
  out << "  \"variables\": [\n";
  for (std::size_t v = 0; v < sets.size(); ++v) {
    out << "    {\"name\": \"" << json_escape(sets[v].var_name)
        << "\", \"elements\": ";
    write_string_list(out, sets[v].elements);
    out << '}' << (v + 1 < sets.size() ? "," : "") << '\n';
  }
  out << "  ],\n";
}

template <typename Graph>
void write_edges(std::ostringstream& out, const Graph& g) {
  out << "  \"edges\": [\n";
  std::size_t i = 0;
  for (const Edge& e : g.edges()) {
    out << "    [\"" << json_escape(g.vertex(e.first).label) << "\", \""
        << json_escape(g.vertex(e.second).label) << "\"]"
        << (++i < g.edges().size() ? "," : "") << '\n';
  }
  out << "  ],\n";
}

}  // namespace

NetworkFile parse_network_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!j.is_object()) throw ParseError("network file must be a JSON object");
  const std::string kind = require_string(j, "kind");
  Declarations decl = parse_variables(j);
  if (kind == "bayesian") return parse_bayesian(decl, j);
  if (kind == "markov") return parse_markov(decl, j);
  throw ParseError("kind must be \"bayesian\" or \"markov\"");
}

NetworkFile load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_network_text(buffer.str());
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

std::string write_bayesian(const BayesianNetwork& bn) {
  std::ostringstream out;
  out << "{\n  \"kind\": \"bayesian\",\n";
  write_variables(out, bn.sets());
  write_edges(out, bn.dag());
  out << "  \"kernels\": [\n";
  for (std::size_t v = 0; v < bn.dag().size(); ++v) {
    const StochasticKernel& k = bn.kernel(v);
    std::vector<std::string> scope;
    for (std::size_t p : gmdiag::parents(bn.dag(), v))
      scope.push_back(bn.sets()[p].var_name);
    scope.push_back(bn.sets()[v].var_name);
    const std::size_t ds = k.domain_size();
    const std::size_t card = bn.sets()[v].size();
    std::vector<double> table(ds * card);
    for (std::size_t x = 0; x < ds; ++x)
      for (std::size_t y = 0; y < card; ++y) table[x * card + y] = k(y, x);
    out << "    {\"scope\": ";
    write_string_list(out, scope);
    out << ", \"table\": ";
    write_table(out, table);
    out << '}' << (v + 1 < bn.dag().size() ? "," : "") << '\n';
  }
  out << "  ]\n}\n";
  return out.str();
}

std::string write_markov(const MarkovNetwork& mn) {
  std::ostringstream out;
  out << "{\n  \"kind\": \"markov\",\n";
  write_variables(out, mn.sets());
  write_edges(out, mn.graph());
  out << "  \"factors\": [\n";
  std::size_t i = 0;
  for (const auto& [clique, factor] : mn.factors()) {
    std::vector<std::string> scope;
    for (std::size_t v : clique) scope.push_back(mn.sets()[v].var_name);
    out << "    {\"scope\": ";
    write_string_list(out, scope);
    out << ", \"table\": ";
    write_table(out, factor.entries());
    out << '}' << (++i < mn.factors().size() ? "," : "") << '\n';
  }
  out << "  ]\n}\n";
  return out.str();
}

std::string write_unnormalized(const gmdiag::TriangulateResult& result) {
  std::ostringstream out;
  out << "{\n  \"Z\": " << format_double(result.Z) << ",\n";
  out << "  \"unnormalized\": [\n";
  std::size_t i = 0;
  for (const auto& [v, tensor] : result.unnormalized) {
    std::vector<std::string> scope;
    for (const FiniteSet& fs : tensor.domain()) scope.push_back(fs.var_name);
    scope.push_back(tensor.codomain()[0].var_name);
    const std::size_t ds = tensor.domain_size();
    const std::size_t card = tensor.codomain_size();
    std::vector<double> table(ds * card);
    for (std::size_t x = 0; x < ds; ++x)
      for (std::size_t y = 0; y < card; ++y) table[x * card + y] = tensor(y, x);
    out << "    {\"scope\": ";
    write_string_list(out, scope);
    out << ", \"table\": ";
    write_table(out, table);
    out << '}' << (++i < result.unnormalized.size() ? "," : "") << '\n';
  }
  out << "  ],\n  \"lambdas\": [\n";
  i = 0;
  for (const auto& [v, tensor] : result.lambdas) {
    std::vector<std::string> scope;
    for (const FiniteSet& fs : tensor.domain()) scope.push_back(fs.var_name);
    out << "    {\"scope\": ";
    write_string_list(out, scope);
    out << ", \"table\": ";
    write_table(out, tensor.entries());
    out << '}' << (++i < result.lambdas.size() ? "," : "") << '\n';
  }
  out << "  ]\n}\n";
  return out.str();
}

}  // namespace gmdiag_tools
