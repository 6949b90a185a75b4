#ifndef GMDIAG_DIAGRAM_HPP
#define GMDIAG_DIAGRAM_HPP

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gmdiag/graphs.hpp"
#include "gmdiag/semantics.hpp"

// Term-graphs over graph-derived monoidal signatures, in wiring normal form:
// a diagram is a set of typed wires, a list of generator occurrences, and two
// ordered boundary lists.  Copies, deletes, compares and omnis are implicit
// in the wiring rather than explicit occurrences:
//
//   - a wire consumed several times is a copy,
//   - a produced wire that is never consumed nor exposed is a delete,
//   - a wire produced several times is a compare (loose flavor only),
//   - a wire with no producer is an omni (loose flavor only).
//
// The strict (comonoid-only) flavor demands exactly one producer per wire and
// an acyclic producer/consumer relation; the loose (Frobenius) flavor demands
// nothing.  Evaluation contracts the occurrence tensors along shared wires
// and is the unique monoidal-functorial extension of the generator
// assignment.

namespace gmdiag {

enum class Flavor {
  CD,         // copy/delete comonoid structure only
  Hypergraph  // additionally compare/omni (special Frobenius) structure
};

// A generating morphism: typed inputs and outputs given as object ids of the
// owning signature.
struct Generator {
  std::string name;
  std::vector<std::size_t> inputs;
  std::vector<std::size_t> outputs;

  friend bool operator==(const Generator& a, const Generator& b) {
    return a.name == b.name && a.inputs == b.inputs && a.outputs == b.outputs;
  }
};

// A monoidal signature: generating objects (graph vertices) plus generating
// morphisms, tagged with the flavor of the free category built on it.
class Signature {
 public:
  Signature(Flavor flavor, std::vector<Vertex> objects,
            std::vector<Generator> generators);

  // One generator per vertex v, named "f[<label>]", typed pa(v) -> v.
  // Strict (CD) flavor.
  static Signature from_dag(const OrderedDag& g);

  // One generator per clique C, named "phi[<l1>,<l2>,...]", typed I -> C.
  // Loose (hypergraph) flavor.  Clique enumeration is capped at
  // max_vertices vertices.
  static Signature from_ugraph(const OrderedUGraph& h,
                               std::size_t max_vertices = 20);

  // Same objects and generators under the other flavor tag.
  Signature with_flavor(Flavor flavor) const;

  Flavor flavor() const { return flavor_; }
  const std::vector<Vertex>& objects() const { return objects_; }
  const std::vector<Generator>& generators() const { return generators_; }

  bool has_generator(const std::string& name) const;
  const Generator& generator(const std::string& name) const;
  // Declaration index of the named generator; throws if absent.
  std::size_t generator_index(const std::string& name) const;

  friend bool operator==(const Signature& a, const Signature& b) {
    return a.flavor_ == b.flavor_ && a.objects_ == b.objects_ &&
           a.generators_ == b.generators_;
  }

 private:
  Flavor flavor_;
  std::vector<Vertex> objects_;
  std::vector<Generator> generators_;
  std::map<std::string, std::size_t> index_;
};

using SignaturePtr = std::shared_ptr<const Signature>;

// A wire of a diagram, carrying one object of the signature.  Wire ids are
// dense: 0..n-1 in declaration order.
struct Wire {
  std::size_t id;
  std::size_t object;
};

// One use of a generator inside a diagram.
struct Occurrence {
  std::string generator;
  std::vector<std::size_t> in_wires;
  std::vector<std::size_t> out_wires;
};

// A morphism of the free category on a signature, in wiring normal form.
// Immutable after construction; construction validates typing and, for the
// strict flavor, the unique-producer and acyclicity conditions.
class Diagram {
 public:
  Diagram(SignaturePtr sig, std::vector<Wire> wires,
          std::vector<Occurrence> occurrences,
          std::vector<std::size_t> input_boundary,
          std::vector<std::size_t> output_boundary);

  // The diagram with a single occurrence of the named generator, fresh wires
  // for all of its ports, and boundaries matching its type.
  static Diagram single(SignaturePtr sig, const std::string& name);

  // The identity diagram on a list of objects: one wire per entry, present in
  // both boundaries, no occurrences.
  static Diagram identity(SignaturePtr sig,
                          const std::vector<std::size_t>& objects);

  const SignaturePtr& signature() const { return sig_; }
  Flavor flavor() const { return sig_->flavor(); }
  const std::vector<Wire>& wires() const { return wires_; }
  const std::vector<Occurrence>& occurrences() const { return occurrences_; }
  const std::vector<std::size_t>& input_boundary() const {
    return input_boundary_;
  }
  const std::vector<std::size_t>& output_boundary() const {
    return output_boundary_;
  }

  // Object ids along the boundaries.
  std::vector<std::size_t> input_objects() const;
  std::vector<std::size_t> output_objects() const;

 private:
  SignaturePtr sig_;
  std::vector<Wire> wires_;
  std::vector<Occurrence> occurrences_;
  std::vector<std::size_t> input_boundary_;
  std::vector<std::size_t> output_boundary_;
};

// Semantics assignment for evaluation: a finite set per object id and a
// tensor per generator name.  With require_stochastic set, every generator
// tensor must be a stochastic matrix (columns sum to 1 within 1e-9).
struct SemanticsAssignment {
  std::map<std::size_t, FiniteSet> objects;
  std::map<std::string, Tensor> generators;
  bool require_stochastic = false;
};

// A generator-indexed family of diagrams: the data of a functor between free
// categories, given by where generators go.  Objects of the source signature
// map to ordered lists of target objects; every source generator name maps to
// a diagram over the target signature whose boundary objects are the
// expansions of the generator's type.
struct GeneratorMap {
  SignaturePtr source;
  SignaturePtr target;
  std::map<std::size_t, std::vector<std::size_t>> object_map;
  std::map<std::string, Diagram> images;

  // The identity map on a signature: objects to themselves, generators to
  // their single-occurrence diagrams.
  static GeneratorMap identity(SignaturePtr sig);
};

// Combines a set of generators, sharing each variable's wire between its
// producer and all consumers; external inputs are the used variables that no
// chosen generator produces.  The result has inputs In(S) (sorted), outputs
// Out(S) (sorted), and one occurrence per generator (in ascending output
// order).  The wiring never needs the loose structure, so any flavor is
// accepted; the chosen generators must have pairwise disjoint outputs.
// Passing an unknown or duplicated name throws std::invalid_argument.
// An empty set yields the identity on the monoidal unit.
Diagram copy_composition(SignaturePtr sig,
                         const std::vector<std::string>& generator_names);

// Combines factors (empty-input generators) by identifying all wires of the
// same variable; the result has no inputs and outputs the used variables in
// vertex order.  Requires the loose flavor and empty-input generators;
// throws std::invalid_argument otherwise.  The result is independent of the
// order in which factors are combined.
Diagram compare_composition(SignaturePtr sig,
                            const std::vector<std::string>& factor_names);

// General form: combines empty-input diagrams by identifying boundary wires
// of the same variable.  Interior wires are kept private to each factor.
Diagram compare_composition(SignaturePtr sig,
                            const std::vector<Diagram>& factors);

// Bends all inputs of d into outputs: the result has no inputs and exposes
// the former inputs and outputs together, sorted by object id (stable for
// repeats).  Requires the loose flavor.  Evaluation satisfies
// graph_of(f)(x, y) = f(y | x).
Diagram graph_of(const Diagram& d);

// The generator map induced by an order-preserving DAG homomorphism
// alpha: G -> G', directed contravariantly: generators of G' map to diagrams
// over G.  A vertex v' goes to its preimage fiber (sorted); the generator of
// v' goes to the copy-composition of the generators of its fiber, with the
// unused expanded parents left unconsumed (deleted).
GeneratorMap cdsyn_hom(const DagHom& alpha);

// The generator map induced by an order-preserving undirected homomorphism
// alpha: H -> H', directed contravariantly: the generator of a clique C'
// goes to the compare-composition of the factors whose clique maps onto C',
// with uncovered expanded variables left producerless (omni).
GeneratorMap syn_hom(const UGraphHom& alpha);

// Replaces every occurrence of d by its image diagram, splicing image
// boundaries onto the expanded occurrence wires.  The result lives over
// map.target.  Throws std::runtime_error if a generator of d has no image or
// the image boundary types do not match the expanded occurrence type.
Diagram substitute(const Diagram& d, const GeneratorMap& map);

// Contracts the diagram to the tensor it denotes: the sum over all wire
// value assignments (consistent with the pinned boundaries) of the product
// of occurrence tensor entries.  Copies, deletes, compares and omnis implied
// by the wiring need no explicit tensors.  The assignment must cover every
// object and generator of the signature with matching shapes.
Tensor evaluate(const Diagram& d, const SemanticsAssignment& assignment);

// Deterministic text rendering (wires, occurrences, boundaries) for golden
// tests and debugging.
std::string dump(const Diagram& d);

// Semantic equality: evaluates both diagrams under `trials` seeded
// pseudo-random assignments and compares entrywise within tol.  The diagrams
// must share signature structure and boundary types; mismatched types return
// false immediately.
bool diagrams_equal(const Diagram& a, const Diagram& b,
                    unsigned long long seed = 0x5eed5eedULL, int trials = 3,
                    double tol = 1e-12);

// A deterministic pseudo-random assignment for a signature: cardinalities in
// [2, 3], entries in (0, 1]; stream determined by the seed alone.
SemanticsAssignment random_assignment(const Signature& sig,
                                      unsigned long long seed);

}  // namespace gmdiag

#endif  // GMDIAG_DIAGRAM_HPP
