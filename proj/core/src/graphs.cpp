#include "gmdiag/graphs.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace gmdiag {

namespace {

std::vector<Vertex> make_vertices(std::vector<std::string> labels) {
  std::vector<Vertex> vertices;
  vertices.reserve(labels.size());
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!seen.insert(labels[i]).second) {
      throw std::invalid_argument("duplicate vertex label: " + labels[i]);
    }
    vertices.push_back(Vertex{i, std::move(labels[i])});
  }
  return vertices;
}

}  // namespace

OrderedDag::OrderedDag(std::vector<std::string> labels,
                       std::vector<Edge> edges)
    : vertices_(make_vertices(std::move(labels))) {
  for (const Edge& e : edges) {
    if (e.first >= vertices_.size() || e.second >= vertices_.size()) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.first >= e.second) {
      throw std::invalid_argument(
          "directed edge must go forward in the vertex order");
    }
    if (!edges_.insert(e).second) {
      throw std::invalid_argument("duplicate edge");
    }
  }
}

const Vertex& OrderedDag::vertex(std::size_t id) const {
  if (id >= vertices_.size()) {
    throw std::invalid_argument("unknown vertex id");
  }
  return vertices_[id];
}

bool OrderedDag::has_edge(std::size_t u, std::size_t v) const {
  return edges_.count({u, v}) != 0;
}

std::optional<std::size_t> OrderedDag::find_vertex(
    const std::string& label) const {
  for (const Vertex& v : vertices_) {
    if (v.label == label) return v.id;
  }
  return std::nullopt;
}

OrderedUGraph::OrderedUGraph(std::vector<std::string> labels,
                             std::vector<Edge> edges)
    : vertices_(make_vertices(std::move(labels))) {
  for (Edge e : edges) {
    if (e.first >= vertices_.size() || e.second >= vertices_.size()) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.first == e.second) {
      throw std::invalid_argument("self-loops are not allowed");
    }
    if (e.first > e.second) std::swap(e.first, e.second);
    if (!edges_.insert(e).second) {
      throw std::invalid_argument("duplicate edge");
    }
  }
}

const Vertex& OrderedUGraph::vertex(std::size_t id) const {
  if (id >= vertices_.size()) {
    throw std::invalid_argument("unknown vertex id");
  }
  return vertices_[id];
}

bool OrderedUGraph::has_edge(std::size_t u, std::size_t v) const {
  if (u > v) std::swap(u, v);
  return edges_.count({u, v}) != 0;
}

std::vector<std::size_t> OrderedUGraph::neighbours(std::size_t v) const {
  if (v >= vertices_.size()) {
    throw std::invalid_argument("unknown vertex id");
  }
  std::vector<std::size_t> result;
  for (const Edge& e : edges_) {
    if (e.first == v) result.push_back(e.second);
    if (e.second == v) result.push_back(e.first);
  }
  std::sort(result.begin(), result.end());
  return result;
}

std::optional<std::size_t> OrderedUGraph::find_vertex(
    const std::string& label) const {
  for (const Vertex& v : vertices_) {
    if (v.label == label) return v.id;
  }
  return std::nullopt;
}

namespace detail {

bool hom_edge_ok(const OrderedDag& target, std::size_t u, std::size_t v) {
  return u == v || target.has_edge(u, v);
}

bool hom_edge_ok(const OrderedUGraph& target, std::size_t u, std::size_t v) {
  return u == v || target.has_edge(u, v);
}

}  // namespace detail

template <typename Graph>
void GraphHom<Graph>::validate() const {
  if (map_.size() != source_.size()) {
    throw std::invalid_argument("vertex map length does not match source");
  }
  if (source_.size() > 0 && target_.size() == 0) {
    throw std::invalid_argument("homomorphism into the empty graph");
  }
  for (std::size_t v = 0; v < map_.size(); ++v) {
    if (map_[v] >= target_.size()) {
      throw std::invalid_argument("vertex map value out of range");
    }
    if (v > 0 && map_[v - 1] > map_[v]) {
      throw std::invalid_argument("vertex map is not order-preserving");
    }
  }
  for (const Edge& e : source_.edges()) {
    if (!detail::hom_edge_ok(target_, map_[e.first], map_[e.second])) {
      throw std::invalid_argument("vertex map does not preserve edges");
    }
  }
}

template <typename Graph>
std::size_t GraphHom<Graph>::operator()(std::size_t v) const {
  if (v >= map_.size()) {
    throw std::invalid_argument("unknown vertex id");
  }
  return map_[v];
}

template <typename Graph>
std::vector<std::size_t> GraphHom<Graph>::preimage(
    std::size_t target_vertex) const {
  std::vector<std::size_t> result;
  for (std::size_t v = 0; v < map_.size(); ++v) {
    if (map_[v] == target_vertex) result.push_back(v);
  }
  return result;
}

template class GraphHom<OrderedDag>;
template class GraphHom<OrderedUGraph>;

std::vector<std::size_t> parents(const OrderedDag& g, std::size_t v) {
  if (v >= g.size()) {
    throw std::invalid_argument("unknown vertex id");
  }
  std::vector<std::size_t> result;
  for (const Edge& e : g.edges()) {
    if (e.second == v) result.push_back(e.first);
  }
  std::sort(result.begin(), result.end());
  return result;
}

std::vector<std::vector<std::size_t>> enumerate_cliques(
    const OrderedUGraph& h, std::size_t max_vertices) {
  if (h.size() > max_vertices) {
    throw std::runtime_error(
        "clique enumeration cap exceeded: graph has more than " +
        std::to_string(max_vertices) + " vertices");
  }
  std::vector<std::vector<std::size_t>> cliques;
  // Depth-first extension in ascending vertex order emits the cliques in
  // lexicographic order of their id sequences.
  std::vector<std::size_t> current;
  std::function<void(std::size_t)> extend = [&](std::size_t next_min) {
    for (std::size_t v = next_min; v < h.size(); ++v) {
      bool adjacent_to_all = true;
      for (std::size_t u : current) {
        if (!h.has_edge(u, v)) {
          adjacent_to_all = false;
          break;
        }
      }
      if (!adjacent_to_all) continue;
      current.push_back(v);
      cliques.push_back(current);
      extend(v + 1);
      current.pop_back();
    }
  };
  extend(0);
  return cliques;
}

OrderedUGraph moralise_graph(const OrderedDag& g) {
  std::vector<std::string> labels;
  labels.reserve(g.size());
  for (const Vertex& v : g.vertices()) labels.push_back(v.label);

  std::set<Edge> edges;
  for (const Edge& e : g.edges()) edges.insert(e);
  for (std::size_t v = 0; v < g.size(); ++v) {
    const std::vector<std::size_t> pa = parents(g, v);
    for (std::size_t i = 0; i < pa.size(); ++i) {
      for (std::size_t j = i + 1; j < pa.size(); ++j) {
        edges.insert({pa[i], pa[j]});
      }
    }
  }
  return OrderedUGraph(std::move(labels),
                       std::vector<Edge>(edges.begin(), edges.end()));
}

OrderedDag triangulate_graph(const OrderedUGraph& h) {
  std::vector<std::string> labels;
  labels.reserve(h.size());
  for (const Vertex& v : h.vertices()) labels.push_back(v.label);

  std::vector<Edge> edges;
  // For each w: connected component of w in the subgraph induced on
  // {x : x >= w}.  An edge v -> w exists iff v < w and v has a neighbour in
  // that component, i.e. there is a path v - w1 - ... - w with all wi >= w.
  for (std::size_t w = 0; w < h.size(); ++w) {
    std::vector<bool> in_component(h.size(), false);
    std::vector<std::size_t> stack{w};
    in_component[w] = true;
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      for (std::size_t y : h.neighbours(x)) {
        if (y >= w && !in_component[y]) {
          in_component[y] = true;
          stack.push_back(y);
        }
      }
    }
    for (std::size_t v = 0; v < w; ++v) {
      bool reaches = false;
      for (std::size_t y : h.neighbours(v)) {
        if (y >= w && in_component[y]) {
          reaches = true;
          break;
        }
      }
      if (reaches) edges.push_back({v, w});
    }
  }
  return OrderedDag(std::move(labels), std::move(edges));
}

bool is_chordal(const OrderedUGraph& h) {
  const std::size_t n = h.size();
  if (n == 0) return true;

  // Maximum cardinality search produces an ordering that is a perfect
  // elimination ordering iff the graph is chordal.
  std::vector<std::size_t> weight(n, 0);
  std::vector<bool> numbered(n, false);
  std::vector<std::size_t> order;  // filled from last to first
  order.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!numbered[v] && (best == n || weight[v] > weight[best])) best = v;
    }
    numbered[best] = true;
    order.push_back(best);
    for (std::size_t u : h.neighbours(best)) {
      if (!numbered[u]) ++weight[u];
    }
  }
  std::reverse(order.begin(), order.end());

  std::vector<std::size_t> position(n, 0);
  for (std::size_t i = 0; i < n; ++i) position[order[i]] = i;

  // Perfect elimination check: for each vertex, its neighbours appearing
  // later in the ordering must contain the earliest such neighbour's edges
  // to the rest.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t v = order[i];
    std::vector<std::size_t> later;
    for (std::size_t u : h.neighbours(v)) {
      if (position[u] > i) later.push_back(u);
    }
    if (later.empty()) continue;
    std::size_t pivot = later[0];
    for (std::size_t u : later) {
      if (position[u] < position[pivot]) pivot = u;
    }
    for (std::size_t u : later) {
      if (u != pivot && !h.has_edge(pivot, u)) return false;
    }
  }
  return true;
}

template <typename Graph>
GraphHom<Graph> hom_compose(const GraphHom<Graph>& a,
                            const GraphHom<Graph>& b) {
  if (!(a.target() == b.source())) {
    throw std::invalid_argument(
        "hom_compose: target of the first map must equal source of the "
        "second");
  }
  std::vector<std::size_t> map;
  map.reserve(a.source().size());
  for (std::size_t v = 0; v < a.source().size(); ++v) {
    map.push_back(b(a(v)));
  }
  GraphHom<Graph> result(a.source(), b.target(), std::move(map));
  return result;
}

template GraphHom<OrderedDag> hom_compose(const GraphHom<OrderedDag>&,
                                          const GraphHom<OrderedDag>&);
template GraphHom<OrderedUGraph> hom_compose(const GraphHom<OrderedUGraph>&,
                                             const GraphHom<OrderedUGraph>&);

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string to_dot(const OrderedDag& g) {
  std::ostringstream out;
  out << "digraph g {\n";
  for (const Vertex& v : g.vertices()) {
    out << "  n" << v.id << " [label=\"" << dot_escape(v.label) << "\"];\n";
  }
  for (const Edge& e : g.edges()) {
    out << "  n" << e.first << " -> n" << e.second << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string to_dot(const OrderedUGraph& h) {
  std::ostringstream out;
  out << "graph h {\n";
  for (const Vertex& v : h.vertices()) {
    out << "  n" << v.id << " [label=\"" << dot_escape(v.label) << "\"];\n";
  }
  for (const Edge& e : h.edges()) {
    out << "  n" << e.first << " -- n" << e.second << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace gmdiag
