#ifndef GMDIAG_GRAPHS_HPP
#define GMDIAG_GRAPHS_HPP

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

// Ordered directed acyclic graphs, ordered undirected graphs,
// order-preserving homomorphisms between them, and the pure-graph halves of
// moralisation and triangulation.
//
// Vertices are identified by their position in the total order (ids 0..n-1);
// the order on ids *is* the total order of the graph.  Directed edges always
// point from a smaller id to a larger id, so a directed graph is acyclic by
// construction.

namespace gmdiag {

// A vertex of an ordered graph: its id is its position in the total order,
// its label is a human-readable display name.
struct Vertex {
  std::size_t id = 0;
  std::string label;

  friend bool operator==(const Vertex& a, const Vertex& b) {
    return a.id == b.id && a.label == b.label;
  }
};

using Edge = std::pair<std::size_t, std::size_t>;

// A finite DAG whose vertex set carries a total order (the id order) that is
// a topological order: every edge (u, v) satisfies u < v.  Immutable after
// construction.
class OrderedDag {
 public:
  OrderedDag() = default;

  // Builds the graph with one vertex per label (ids assigned by position) and
  // the given directed edges.  Throws std::invalid_argument if an edge is out
  // of range, violates the order (u >= v), or is duplicated.
  OrderedDag(std::vector<std::string> labels, std::vector<Edge> edges);

  std::size_t size() const { return vertices_.size(); }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Vertex& vertex(std::size_t id) const;
  const std::set<Edge>& edges() const { return edges_; }
  bool has_edge(std::size_t u, std::size_t v) const;

  // Id of the vertex with the given label, if present.
  std::optional<std::size_t> find_vertex(const std::string& label) const;

  friend bool operator==(const OrderedDag& a, const OrderedDag& b) {
    return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<Vertex> vertices_;
  std::set<Edge> edges_;
};

// A finite undirected graph whose vertex set carries a total order.  Edges
// are stored as pairs {min, max}; self-loops and duplicates are rejected.
// Immutable after construction.
class OrderedUGraph {
 public:
  OrderedUGraph() = default;

  // Builds the graph with one vertex per label and the given undirected
  // edges (any orientation accepted on input).  Throws std::invalid_argument
  // on out-of-range endpoints, self-loops, or duplicate edges.
  OrderedUGraph(std::vector<std::string> labels, std::vector<Edge> edges);

  std::size_t size() const { return vertices_.size(); }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const Vertex& vertex(std::size_t id) const;
  const std::set<Edge>& edges() const { return edges_; }
  bool has_edge(std::size_t u, std::size_t v) const;

  // Ids adjacent to v, sorted ascending.
  std::vector<std::size_t> neighbours(std::size_t v) const;

  std::optional<std::size_t> find_vertex(const std::string& label) const;

  friend bool operator==(const OrderedUGraph& a, const OrderedUGraph& b) {
    return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<Vertex> vertices_;
  std::set<Edge> edges_;
};

namespace detail {
// Edge preservation for homomorphisms: an edge may map to an edge of the
// target or collapse onto a single vertex.
bool hom_edge_ok(const OrderedDag& target, std::size_t u, std::size_t v);
bool hom_edge_ok(const OrderedUGraph& target, std::size_t u, std::size_t v);
}  // namespace detail

// An order-preserving graph homomorphism: a total map on vertex ids that is
// monotone (v <= w implies map(v) <= map(w)) and sends every source edge to a
// target edge or collapses it onto a single vertex.  Source and target graphs
// are stored by value; homomorphisms are immutable.
template <typename Graph>
class GraphHom {
 public:
  // Validates monotonicity and edge preservation; throws
  // std::invalid_argument on violation or if the map has the wrong length.
  GraphHom(Graph source, Graph target, std::vector<std::size_t> vertex_map)
      : source_(std::move(source)),
        target_(std::move(target)),
        map_(std::move(vertex_map)) {
    validate();
  }

  static GraphHom identity(Graph g) {
    std::vector<std::size_t> id_map(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) id_map[v] = v;
    Graph copy = g;
    return GraphHom(std::move(copy), std::move(g), std::move(id_map));
  }

  const Graph& source() const { return source_; }
  const Graph& target() const { return target_; }
  const std::vector<std::size_t>& vertex_map() const { return map_; }

  std::size_t operator()(std::size_t v) const;

  // Source ids mapping to the given target vertex, sorted ascending.
  std::vector<std::size_t> preimage(std::size_t target_vertex) const;

 private:
  void validate() const;

  Graph source_;
  Graph target_;
  std::vector<std::size_t> map_;
};

using DagHom = GraphHom<OrderedDag>;
using UGraphHom = GraphHom<OrderedUGraph>;

// Ids of the parents of v (vertices u with an edge u -> v), sorted by the
// total order.  Throws std::invalid_argument if v is not a vertex of g.
std::vector<std::size_t> parents(const OrderedDag& g, std::size_t v);

// All non-empty cliques of h, each as a sorted id list, the whole list
// ordered lexicographically by id sequences.  Singletons are always included.
// Clique enumeration is exponential, so graphs larger than max_vertices are
// rejected with std::runtime_error.
std::vector<std::vector<std::size_t>> enumerate_cliques(
    const OrderedUGraph& h, std::size_t max_vertices = 20);

// Undirected graph on the same ordered vertices with an edge {v, w} whenever
// g has an edge between v and w in either direction, or v and w are both
// parents of a common vertex.
OrderedUGraph moralise_graph(const OrderedDag& g);

// DAG on the same ordered vertices with an edge v -> w whenever v < w and
// there is an undirected path from v to w in h whose intermediate and final
// vertices are all >= w.  Every edge of h appears directed; fill-in edges are
// added exactly when such a high-vertex path exists.
OrderedDag triangulate_graph(const OrderedUGraph& h);

// True iff every cycle of length >= 4 has a chord (checked via a maximum
// cardinality search and a perfect-elimination-ordering test).
bool is_chordal(const OrderedUGraph& h);

// Pointwise composition: first a, then b.  Requires a's target to equal b's
// source; throws std::invalid_argument otherwise.
template <typename Graph>
GraphHom<Graph> hom_compose(const GraphHom<Graph>& a,
                            const GraphHom<Graph>& b);

// Deterministic DOT renderings (vertices in id order, edges sorted).
std::string to_dot(const OrderedDag& g);
std::string to_dot(const OrderedUGraph& h);

}  // namespace gmdiag

#endif  // GMDIAG_GRAPHS_HPP
