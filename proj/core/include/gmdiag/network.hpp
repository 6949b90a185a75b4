#ifndef GMDIAG_NETWORK_HPP
#define GMDIAG_NETWORK_HPP

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "gmdiag/diagram.hpp"
#include "gmdiag/graphs.hpp"
#include "gmdiag/semantics.hpp"

// Networks pair a graph with tensor data for its induced signature: a
// Bayesian network carries one stochastic kernel per vertex (conditioned on
// the parents), a Markov network one nonnegative factor per clique (missing
// factors default to all-ones).  Their joints arise by evaluating the
// canonical combination of all generators.

namespace gmdiag {

class BayesianNetwork {
 public:
  // sets[v] is the state space of vertex v; kernels[v] maps the parent
  // spaces (ascending vertex order) to sets[v].  Variable names must be
  // pairwise distinct.
  BayesianNetwork(OrderedDag dag, std::vector<FiniteSet> sets,
                  std::vector<StochasticKernel> kernels);

  const OrderedDag& dag() const { return dag_; }
  const std::vector<FiniteSet>& sets() const { return sets_; }
  const std::vector<StochasticKernel>& kernels() const { return kernels_; }
  const StochasticKernel& kernel(std::size_t v) const { return kernels_.at(v); }

  // The induced signature (strict flavor, one generator per vertex).
  const SignaturePtr& signature() const { return sig_; }
  // Finite sets and kernel tensors for evaluation, in stochastic mode.
  SemanticsAssignment assignment() const;

 private:
  OrderedDag dag_;
  std::vector<FiniteSet> sets_;
  std::vector<StochasticKernel> kernels_;
  SignaturePtr sig_;
};

class MarkovNetwork {
 public:
  // factors is keyed by clique (ascending vertex ids); every key must be a
  // clique of the graph.  A clique without a stored factor implicitly
  // carries the all-ones factor.
  MarkovNetwork(OrderedUGraph graph, std::vector<FiniteSet> sets,
                std::map<std::vector<std::size_t>, Tensor> factors);

  const OrderedUGraph& graph() const { return graph_; }
  const std::vector<FiniteSet>& sets() const { return sets_; }
  const std::map<std::vector<std::size_t>, Tensor>& factors() const {
    return factors_;
  }
  // The stored factor, or the all-ones tensor for an omitted clique.
  Tensor factor_for(const std::vector<std::size_t>& clique) const;

  // The induced signature (loose flavor, one generator per clique).
  const SignaturePtr& signature() const { return sig_; }
  // Finite sets and factor tensors (stored or default) for evaluation.
  SemanticsAssignment assignment() const;

 private:
  OrderedUGraph graph_;
  std::vector<FiniteSet> sets_;
  std::map<std::vector<std::size_t>, Tensor> factors_;
  SignaturePtr sig_;
};

// The combination of all vertex kernels sharing parent wires: a state on the
// product of all vertex spaces.
Diagram bn_joint_diagram(const BayesianNetwork& bn);
Distribution bn_joint(const BayesianNetwork& bn);

// The product of all clique factors along shared variables, before
// normalization (no inputs, one output per vertex)...
Diagram mn_joint_diagram(const MarkovNetwork& mn);
Tensor mn_unnormalized(const MarkovNetwork& mn);
// ...and after: Z is the normalizing constant; dist is absent when Z = 0.
NormalizeResult mn_joint(const MarkovNetwork& mn);

// A morphism of networks: a contravariant order-preserving graph
// homomorphism (from the destination's graph to the source's) together with
// a stochastic kernel from the source's joint space to the destination's.
// The defining condition is that the kernel maps the source joint to the
// destination joint.
struct BnMorphism {
  DagHom alpha;
  StochasticKernel eta;
};

struct MnMorphism {
  UGraphHom alpha;
  StochasticKernel eta;
};

struct MorphismReport {
  bool pass = false;
  double max_deviation = 0.0;
  std::string detail;
};

// Verifies the defining condition numerically.  Shape mismatches (graphs or
// kernel spaces) throw std::invalid_argument; for Markov networks a
// degenerate joint throws std::runtime_error.
MorphismReport check_morphism(const BayesianNetwork& src,
                              const BayesianNetwork& dst,
                              const BnMorphism& morphism, double tol = 1e-9);
MorphismReport check_morphism(const MarkovNetwork& src,
                              const MarkovNetwork& dst,
                              const MnMorphism& morphism, double tol = 1e-9);

// Composition of morphisms src -> mid and mid -> dst into src -> dst.
BnMorphism compose_morphism(const BnMorphism& first, const BnMorphism& second);
MnMorphism compose_morphism(const MnMorphism& first, const MnMorphism& second);

// Extends the network with one new last vertex whose kernel is f (domain:
// the listed parents, ascending) and returns the extension morphism, whose
// kernel copies the old variables and appends the new one.
struct RevealResult {
  BayesianNetwork extended;
  BnMorphism morphism;
};
RevealResult reveal_variable(const BayesianNetwork& bn,
                             const std::string& label,
                             const std::vector<std::size_t>& parent_ids,
                             const StochasticKernel& f);

// Whether the state omega factors through the network: entrywise equality
// with the network joint for Bayesian networks, equality up to a positive
// scalar with the factor product for Markov networks.
bool verify_factorization(const Distribution& omega,
                          const BayesianNetwork& bn, double tol = 1e-9);
bool verify_factorization(const Distribution& omega, const MarkovNetwork& mn,
                          double tol = 1e-9);

}  // namespace gmdiag

#endif  // GMDIAG_NETWORK_HPP
