#ifndef GMDIAG_TRANSFORM_HPP
#define GMDIAG_TRANSFORM_HPP

#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include "gmdiag/diagram.hpp"
#include "gmdiag/graphs.hpp"
#include "gmdiag/network.hpp"
#include "gmdiag/semantics.hpp"

// Moralisation and triangulation as generator maps: both transforms are
// defined purely on the syntax side, by sending each generator of the
// transformed graph's signature to a diagram over the original graph's
// signature.  Pre-composing a network's semantics with such a map transports
// the network across the transform while preserving its joint.

namespace gmdiag {

// A network (or tensor family) whose normalizing constant is zero.  Thrown
// by the triangulation pipeline, which is only defined on proper
// distributions; the CLI maps it to its own exit code.
struct DegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// For a directed graph G: the generator of a clique C of the moralisation
// goes to the bent graph of the kernel generator of v when C = {v, pa(v)}
// with v = max(C), and to the producerless (omni) diagram on C otherwise.
struct MoralisationMap {
  OrderedDag dag;       // original directed graph
  OrderedUGraph moral;  // its moralisation
  GeneratorMap map;     // clique generators -> diagrams over the kernels
};
MoralisationMap make_moralisation_map(const OrderedDag& g);

// For an undirected graph H: the kernel generator of a vertex v of the
// triangulation goes to the product of the factors of the cliques whose
// maximum is v, with v as output, the used parents as compared inputs, and
// the unused parents as silent (broadcast) inputs.  The cliques-by-maximum
// partition covers every clique exactly once.
struct TriangulationMap {
  OrderedUGraph graph;  // original undirected graph
  OrderedDag tri;       // its triangulation
  GeneratorMap map;     // kernel generators -> diagrams over the factors
  std::map<std::size_t, std::vector<std::vector<std::size_t>>> cliques_by_max;
};
TriangulationMap make_triangulation_map(const OrderedUGraph& h);

// Transports a Bayesian network across moralisation: a Markov network on the
// moralised graph whose stored factors are the evaluated images of the
// kernel cliques (all other cliques keep the default all-ones factor).  The
// result's joint equals the original joint with normalizing constant 1.
MarkovNetwork moralise_bn(const BayesianNetwork& bn);

// Rescales a family of nonnegative per-vertex tensors (family[v] maps the
// parent spaces of v to the space of v) into stochastic kernels: sweeping
// from the last vertex down, each tensor is divided by its column sums
// (uniform where a column is zero) and the column sums are absorbed into the
// tensor of the largest parent, or into Z for a parentless vertex.  The
// pointwise identity  product(family) = Z * product(kernels)  holds, so Z is
// the normalizing constant of the family product.  Requires every vertex's
// other parents to be parents of its largest parent (the shape triangulation
// guarantees); throws std::invalid_argument otherwise.  A family whose
// product sums to zero throws DegenerateError.
struct NormalizeFamilyResult {
  std::vector<StochasticKernel> kernels;
  std::map<std::size_t, Tensor> lambdas;  // absorbed column sums, per vertex
  double Z = 0.0;
};
NormalizeFamilyResult normalize_family(
    const OrderedDag& dag, const std::vector<FiniteSet>& sets,
    const std::map<std::size_t, Tensor>& family);

// Transports a Markov network across triangulation: evaluates the image of
// each kernel generator and normalizes the family.  Z is the partition
// function of the original network; a degenerate network (Z = 0) throws
// DegenerateError.
struct TriangulateResult {
  BayesianNetwork bn;
  std::map<std::size_t, Tensor> unnormalized;  // evaluated images, pre-sweep
  std::map<std::size_t, Tensor> lambdas;
  double Z = 0.0;
};
TriangulateResult triangulate_mn(const MarkovNetwork& mn);

// Round trips: the original graph embeds in its double transform by the
// identity on vertices, and the identity kernel is a morphism from the
// transformed network to the original (their joints agree).
struct BnEmbedding {
  BayesianNetwork transformed;  // triangulation of the moralisation
  BnMorphism morphism;          // transformed -> original
};
BnEmbedding tr_mor_embedding(const BayesianNetwork& bn);

struct MnEmbedding {
  MarkovNetwork transformed;  // moralisation of the triangulation
  MnMorphism morphism;        // transformed -> original
};
MnEmbedding mor_tr_embedding(const MarkovNetwork& mn);

// Transforms act on network morphisms by re-typing the same pair: the graph
// map stays a valid order-preserving homomorphism between the transformed
// graphs, and the kernel is reused unchanged.
MnMorphism moralise_morphism(const BnMorphism& m);
BnMorphism triangulate_morphism(const MnMorphism& m);

}  // namespace gmdiag

#endif  // GMDIAG_TRANSFORM_HPP
