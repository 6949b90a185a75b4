#include "gmdiag/diagram.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gmdiag {

namespace {

std::string join_ids(const std::vector<std::size_t>& ids) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out << ' ';
    out << ids[i];
  }
  return out.str();
}

// Sorted union of two ascending id lists.
std::vector<std::size_t> merge_sorted(const std::vector<std::size_t>& a,
                                      const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

// Disjoint-set union with path compression, used to splice diagrams.
class Dsu {
 public:
  explicit Dsu(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Keep the smaller id as representative so numbering stays canonical.
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Dense joint table over a sorted list of live wires; last wire fastest.
struct Joint {
  std::vector<std::size_t> wires;  // ascending wire ids
  std::vector<std::size_t> card;   // cardinality per wire, parallel to wires
  std::vector<double> data;        // size = product of card
};

bool advance_tuple(std::vector<std::size_t>& tup,
                   const std::vector<std::size_t>& card) {
  for (std::size_t k = tup.size(); k-- > 0;) {
    if (++tup[k] < card[k]) return true;
    tup[k] = 0;
  }
  return false;
}

std::size_t position_of(const std::vector<std::size_t>& wires,
                        std::size_t w) {
  auto it = std::lower_bound(wires.begin(), wires.end(), w);
  assert(it != wires.end() && *it == w);
  return static_cast<std::size_t>(it - wires.begin());
}

// Extends the joint with extra wires (replicating entries along them) and,
// when a tensor occurrence is supplied, multiplies its entries in.
void multiply_in(Joint& joint, const std::vector<std::size_t>& fresh_wires,
                 const Occurrence* occ, const Tensor* tensor,
                 const std::vector<std::size_t>& all_card_by_wire) {
  std::vector<std::size_t> nw = merge_sorted(joint.wires, fresh_wires);
  std::vector<std::size_t> ncard(nw.size());
  for (std::size_t k = 0; k < nw.size(); ++k) ncard[k] = all_card_by_wire[nw[k]];
  std::size_t total = 1;
  for (std::size_t c : ncard) total *= c;

  // Positions of the previous live wires inside the new tuple.
  std::vector<std::size_t> old_pos(joint.wires.size());
  for (std::size_t k = 0; k < joint.wires.size(); ++k)
    old_pos[k] = position_of(nw, joint.wires[k]);
  std::vector<std::size_t> in_pos, out_pos;
  if (occ != nullptr) {
    for (std::size_t w : occ->in_wires) in_pos.push_back(position_of(nw, w));
    for (std::size_t w : occ->out_wires) out_pos.push_back(position_of(nw, w));
  }

  std::vector<double> ndata(total);
  std::vector<std::size_t> tup(nw.size(), 0);
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::size_t old_lin = 0;
    for (std::size_t k = 0; k < old_pos.size(); ++k)
      old_lin = old_lin * joint.card[k] + tup[old_pos[k]];
    double value = joint.data[old_lin];
    if (occ != nullptr) {
      std::size_t dom_lin = 0;
      for (std::size_t k = 0; k < in_pos.size(); ++k)
        dom_lin = dom_lin * all_card_by_wire[occ->in_wires[k]] + tup[in_pos[k]];
      std::size_t cod_lin = 0;
      for (std::size_t k = 0; k < out_pos.size(); ++k)
        cod_lin =
            cod_lin * all_card_by_wire[occ->out_wires[k]] + tup[out_pos[k]];
      value *= (*tensor)(cod_lin, dom_lin);
    }
    ndata[lin] = value;
    advance_tuple(tup, ncard);
  }
  joint.wires = std::move(nw);
  joint.card = std::move(ncard);
  joint.data = std::move(ndata);
}

// Sums one wire out of the joint.
void sum_out(Joint& joint, std::size_t w) {
  std::size_t p = position_of(joint.wires, w);
  std::size_t inner = 1;
  for (std::size_t k = p + 1; k < joint.card.size(); ++k)
    inner *= joint.card[k];
  std::size_t outer = 1;
  for (std::size_t k = 0; k < p; ++k) outer *= joint.card[k];
  std::size_t c = joint.card[p];

  std::vector<double> ndata(outer * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t v = 0; v < c; ++v)
      for (std::size_t i = 0; i < inner; ++i)
        ndata[o * inner + i] += joint.data[(o * c + v) * inner + i];
  joint.wires.erase(joint.wires.begin() + static_cast<std::ptrdiff_t>(p));
  joint.card.erase(joint.card.begin() + static_cast<std::ptrdiff_t>(p));
  joint.data = std::move(ndata);
}

// Validation-time schedule for strict diagrams: repeatedly runs the first
// occurrence whose inputs are all available.  Throws when the wiring is
// cyclic.
std::vector<std::size_t> strict_schedule(
    const std::vector<Wire>& wires, const std::vector<Occurrence>& occurrences,
    const std::vector<std::size_t>& input_boundary) {
  std::vector<char> available(wires.size(), 0);
  for (std::size_t w : input_boundary) available[w] = 1;
  std::vector<char> done(occurrences.size(), 0);
  std::vector<std::size_t> order;
  order.reserve(occurrences.size());
  while (order.size() < occurrences.size()) {
    bool progressed = false;
    for (std::size_t j = 0; j < occurrences.size(); ++j) {
      if (done[j]) continue;
      const Occurrence& oc = occurrences[j];
      bool ready = true;
      for (std::size_t w : oc.in_wires)
        if (!available[w]) {
          ready = false;
          break;
        }
      if (!ready) continue;
      for (std::size_t w : oc.out_wires) available[w] = 1;
      done[j] = 1;
      order.push_back(j);
      progressed = true;
      break;
    }
    if (!progressed)
      throw std::invalid_argument("strict flavor requires acyclic wiring");
  }
  return order;
}

}  // namespace

// ---------------------------------------------------------------------------
// Signature

Signature::Signature(Flavor flavor, std::vector<Vertex> objects,
                     std::vector<Generator> generators)
    : flavor_(flavor),
      objects_(std::move(objects)),
      generators_(std::move(generators)) {
  for (std::size_t i = 0; i < objects_.size(); ++i)
    if (objects_[i].id != i)
      throw std::invalid_argument("signature object ids must be dense");
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    const Generator& g = generators_[i];
    if (g.name.empty())
      throw std::invalid_argument("generator names must be non-empty");
    if (!index_.emplace(g.name, i).second)
      throw std::invalid_argument("duplicate generator name: " + g.name);
    for (std::size_t o : g.inputs)
      if (o >= objects_.size())
        throw std::invalid_argument("generator input object out of range");
    for (std::size_t o : g.outputs)
      if (o >= objects_.size())
        throw std::invalid_argument("generator output object out of range");
  }
}

Signature Signature::from_dag(const OrderedDag& g) {
  std::vector<Generator> gens;
  gens.reserve(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    Generator gen;
    gen.name = "f[" + g.vertex(v).label + "]";
    gen.inputs = parents(g, v);
    gen.outputs = {v};
    gens.push_back(std::move(gen));
  }
  return Signature(Flavor::CD, g.vertices(), std::move(gens));
}

Signature Signature::from_ugraph(const OrderedUGraph& h,
                                 std::size_t max_vertices) {
  std::vector<Generator> gens;
  for (const std::vector<std::size_t>& clique :
       enumerate_cliques(h, max_vertices)) {
    Generator gen;
    std::string name = "phi[";
    for (std::size_t i = 0; i < clique.size(); ++i) {
      if (i > 0) name += ",";
      name += h.vertex(clique[i]).label;
    }
    name += "]";
    gen.name = std::move(name);
    gen.outputs = clique;
    gens.push_back(std::move(gen));
  }
  return Signature(Flavor::Hypergraph, h.vertices(), std::move(gens));
}

Signature Signature::with_flavor(Flavor flavor) const {
  return Signature(flavor, objects_, generators_);
}

bool Signature::has_generator(const std::string& name) const {
  return index_.count(name) > 0;
}

const Generator& Signature::generator(const std::string& name) const {
  return generators_[generator_index(name)];
}

std::size_t Signature::generator_index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end())
    throw std::invalid_argument("unknown generator: " + name);
  return it->second;
}

// ---------------------------------------------------------------------------
// Diagram

Diagram::Diagram(SignaturePtr sig, std::vector<Wire> wires,
                 std::vector<Occurrence> occurrences,
                 std::vector<std::size_t> input_boundary,
                 std::vector<std::size_t> output_boundary)
    : sig_(std::move(sig)),
      wires_(std::move(wires)),
      occurrences_(std::move(occurrences)),
      input_boundary_(std::move(input_boundary)),
      output_boundary_(std::move(output_boundary)) {
  if (!sig_) throw std::invalid_argument("diagram requires a signature");
  for (std::size_t i = 0; i < wires_.size(); ++i) {
    if (wires_[i].id != i)
      throw std::invalid_argument("wire ids must be dense and ordered");
    if (wires_[i].object >= sig_->objects().size())
      throw std::invalid_argument("wire object out of range");
  }
  auto check_wire = [&](std::size_t w) {
    if (w >= wires_.size())
      throw std::invalid_argument("wire id out of range");
  };
  for (const Occurrence& oc : occurrences_) {
    const Generator& gen = sig_->generator(oc.generator);
    if (oc.in_wires.size() != gen.inputs.size() ||
        oc.out_wires.size() != gen.outputs.size())
      throw std::invalid_argument("occurrence arity mismatch: " +
                                  oc.generator);
    for (std::size_t k = 0; k < oc.in_wires.size(); ++k) {
      check_wire(oc.in_wires[k]);
      if (wires_[oc.in_wires[k]].object != gen.inputs[k])
        throw std::invalid_argument("occurrence input type mismatch: " +
                                    oc.generator);
    }
    for (std::size_t k = 0; k < oc.out_wires.size(); ++k) {
      check_wire(oc.out_wires[k]);
      if (wires_[oc.out_wires[k]].object != gen.outputs[k])
        throw std::invalid_argument("occurrence output type mismatch: " +
                                    oc.generator);
    }
  }
  for (std::size_t w : input_boundary_) check_wire(w);
  for (std::size_t w : output_boundary_) check_wire(w);

  if (sig_->flavor() == Flavor::CD) {
    std::vector<std::size_t> producers(wires_.size(), 0);
    for (std::size_t w : input_boundary_) ++producers[w];
    for (const Occurrence& oc : occurrences_)
      for (std::size_t w : oc.out_wires) ++producers[w];
    for (std::size_t w = 0; w < wires_.size(); ++w)
      if (producers[w] != 1)
        throw std::invalid_argument(
            "strict flavor requires exactly one producer per wire");
    strict_schedule(wires_, occurrences_, input_boundary_);
  }
}

Diagram Diagram::single(SignaturePtr sig, const std::string& name) {
  const Generator& gen = sig->generator(name);
  std::vector<Wire> wires;
  std::vector<std::size_t> ins, outs;
  for (std::size_t o : gen.inputs) {
    ins.push_back(wires.size());
    wires.push_back(Wire{wires.size(), o});
  }
  for (std::size_t o : gen.outputs) {
    outs.push_back(wires.size());
    wires.push_back(Wire{wires.size(), o});
  }
  Occurrence oc{name, ins, outs};
  return Diagram(std::move(sig), std::move(wires), {std::move(oc)}, ins, outs);
}

Diagram Diagram::identity(SignaturePtr sig,
                          const std::vector<std::size_t>& objects) {
  std::vector<Wire> wires;
  std::vector<std::size_t> boundary;
  for (std::size_t o : objects) {
    boundary.push_back(wires.size());
    wires.push_back(Wire{wires.size(), o});
  }
  return Diagram(std::move(sig), std::move(wires), {}, boundary, boundary);
}

std::vector<std::size_t> Diagram::input_objects() const {
  std::vector<std::size_t> out;
  out.reserve(input_boundary_.size());
  for (std::size_t w : input_boundary_) out.push_back(wires_[w].object);
  return out;
}

std::vector<std::size_t> Diagram::output_objects() const {
  std::vector<std::size_t> out;
  out.reserve(output_boundary_.size());
  for (std::size_t w : output_boundary_) out.push_back(wires_[w].object);
  return out;
}

// ---------------------------------------------------------------------------
// Combinators

Diagram copy_composition(SignaturePtr sig,
                         const std::vector<std::string>& generator_names) {
  std::set<std::string> seen;
  std::vector<const Generator*> gens;
  for (const std::string& name : generator_names) {
    if (!seen.insert(name).second)
      throw std::invalid_argument("duplicate generator in composition: " +
                                  name);
    gens.push_back(&sig->generator(name));
  }
  // Deterministic occurrence order: ascending by output objects, then name.
  std::sort(gens.begin(), gens.end(),
            [](const Generator* a, const Generator* b) {
              if (a->outputs != b->outputs) return a->outputs < b->outputs;
              return a->name < b->name;
            });

  std::set<std::size_t> out_set;
  for (const Generator* g : gens)
    for (std::size_t o : g->outputs)
      if (!out_set.insert(o).second)
        throw std::invalid_argument(
            "copy composition requires disjoint generator outputs");
  std::set<std::size_t> in_set;
  for (const Generator* g : gens)
    for (std::size_t o : g->inputs)
      if (!out_set.count(o)) in_set.insert(o);

  std::vector<std::size_t> verts;
  for (std::size_t o : in_set) verts.push_back(o);
  for (std::size_t o : out_set) verts.push_back(o);
  std::sort(verts.begin(), verts.end());

  std::vector<Wire> wires;
  std::map<std::size_t, std::size_t> wire_of;
  for (std::size_t o : verts) {
    wire_of[o] = wires.size();
    wires.push_back(Wire{wires.size(), o});
  }
  std::vector<Occurrence> occs;
  for (const Generator* g : gens) {
    Occurrence oc;
    oc.generator = g->name;
    for (std::size_t o : g->inputs) oc.in_wires.push_back(wire_of.at(o));
    for (std::size_t o : g->outputs) oc.out_wires.push_back(wire_of.at(o));
    occs.push_back(std::move(oc));
  }
  std::vector<std::size_t> in_b, out_b;
  for (std::size_t o : in_set) in_b.push_back(wire_of.at(o));
  for (std::size_t o : out_set) out_b.push_back(wire_of.at(o));
  return Diagram(std::move(sig), std::move(wires), std::move(occs),
                 std::move(in_b), std::move(out_b));
}

Diagram compare_composition(SignaturePtr sig,
                            const std::vector<Diagram>& factors) {
  if (sig->flavor() != Flavor::Hypergraph)
    throw std::invalid_argument("compare composition requires the loose flavor");
  for (const Diagram& f : factors) {
    if (!(*f.signature() == *sig))
      throw std::invalid_argument(
          "compare composition factors must share the signature");
    if (!f.input_boundary().empty())
      throw std::invalid_argument(
          "compare composition requires empty-input factors");
  }
  std::set<std::size_t> var_set;
  for (const Diagram& f : factors)
    for (std::size_t o : f.output_objects()) var_set.insert(o);

  std::vector<Wire> wires;
  std::map<std::size_t, std::size_t> wire_of_var;
  for (std::size_t o : var_set) {
    wire_of_var[o] = wires.size();
    wires.push_back(Wire{wires.size(), o});
  }
  std::vector<Occurrence> occs;
  for (const Diagram& f : factors) {
    // Boundary wires of a factor collapse onto the shared variable wires;
    // interior wires stay private and are appended fresh.
    std::vector<char> on_boundary(f.wires().size(), 0);
    for (std::size_t w : f.output_boundary()) on_boundary[w] = 1;
    std::vector<std::size_t> remap(f.wires().size());
    for (std::size_t w = 0; w < f.wires().size(); ++w) {
      if (on_boundary[w]) {
        remap[w] = wire_of_var.at(f.wires()[w].object);
      } else {
        remap[w] = wires.size();
        wires.push_back(Wire{wires.size(), f.wires()[w].object});
      }
    }
    for (const Occurrence& oc : f.occurrences()) {
      Occurrence noc;
      noc.generator = oc.generator;
      for (std::size_t w : oc.in_wires) noc.in_wires.push_back(remap[w]);
      for (std::size_t w : oc.out_wires) noc.out_wires.push_back(remap[w]);
      occs.push_back(std::move(noc));
    }
  }
  std::vector<std::size_t> out_b;
  for (std::size_t o : var_set) out_b.push_back(wire_of_var.at(o));
  return Diagram(std::move(sig), std::move(wires), std::move(occs), {},
                 std::move(out_b));
}

Diagram compare_composition(SignaturePtr sig,
                            const std::vector<std::string>& factor_names) {
  std::set<std::string> seen;
  std::vector<std::string> names = factor_names;
  for (const std::string& name : names) {
    if (!seen.insert(name).second)
      throw std::invalid_argument("duplicate factor in composition: " + name);
    if (!sig->generator(name).inputs.empty())
      throw std::invalid_argument(
          "compare composition requires factor generators: " + name);
  }
  std::sort(names.begin(), names.end(),
            [&](const std::string& a, const std::string& b) {
              return sig->generator_index(a) < sig->generator_index(b);
            });
  std::vector<Diagram> factors;
  factors.reserve(names.size());
  for (const std::string& name : names)
    factors.push_back(Diagram::single(sig, name));
  return compare_composition(std::move(sig), factors);
}

Diagram graph_of(const Diagram& d) {
  if (d.flavor() != Flavor::Hypergraph)
    throw std::invalid_argument("graph construction requires the loose flavor");
  std::vector<std::size_t> combined = d.input_boundary();
  combined.insert(combined.end(), d.output_boundary().begin(),
                  d.output_boundary().end());
  std::stable_sort(combined.begin(), combined.end(),
                   [&](std::size_t a, std::size_t b) {
                     return d.wires()[a].object < d.wires()[b].object;
                   });
  return Diagram(d.signature(), d.wires(), d.occurrences(), {},
                 std::move(combined));
}

// ---------------------------------------------------------------------------
// Generator maps

GeneratorMap GeneratorMap::identity(SignaturePtr sig) {
  GeneratorMap map;
  map.source = sig;
  map.target = sig;
  for (std::size_t o = 0; o < sig->objects().size(); ++o)
    map.object_map[o] = {o};
  for (const Generator& g : sig->generators())
    map.images.emplace(g.name, Diagram::single(sig, g.name));
  return map;
}

GeneratorMap cdsyn_hom(const DagHom& alpha) {
  const OrderedDag& g = alpha.source();
  const OrderedDag& gp = alpha.target();
  auto source_sig = std::make_shared<const Signature>(Signature::from_dag(gp));
  auto target_sig = std::make_shared<const Signature>(Signature::from_dag(g));

  GeneratorMap map;
  map.source = source_sig;
  map.target = target_sig;
  for (std::size_t vp = 0; vp < gp.size(); ++vp)
    map.object_map[vp] = alpha.preimage(vp);

  for (std::size_t vp = 0; vp < gp.size(); ++vp) {
    const std::vector<std::size_t> fiber = alpha.preimage(vp);
    std::vector<std::size_t> expanded_parents;
    for (std::size_t up : parents(gp, vp)) {
      const std::vector<std::size_t> pf = alpha.preimage(up);
      expanded_parents.insert(expanded_parents.end(), pf.begin(), pf.end());
    }
    // Order preservation makes the concatenated fibers ascending and keeps
    // them strictly below the fiber of vp.
    std::vector<std::size_t> verts = expanded_parents;
    verts.insert(verts.end(), fiber.begin(), fiber.end());
    std::vector<Wire> wires;
    std::map<std::size_t, std::size_t> wire_of;
    for (std::size_t v : verts) {
      wire_of[v] = wires.size();
      wires.push_back(Wire{wires.size(), v});
    }
    std::vector<Occurrence> occs;
    for (std::size_t w : fiber) {
      Occurrence oc;
      oc.generator = "f[" + g.vertex(w).label + "]";
      for (std::size_t u : parents(g, w)) {
        auto it = wire_of.find(u);
        assert(it != wire_of.end());
        oc.in_wires.push_back(it->second);
      }
      oc.out_wires.push_back(wire_of.at(w));
      occs.push_back(std::move(oc));
    }
    std::vector<std::size_t> in_b, out_b;
    for (std::size_t v : expanded_parents) in_b.push_back(wire_of.at(v));
    for (std::size_t v : fiber) out_b.push_back(wire_of.at(v));
    map.images.emplace(
        "f[" + gp.vertex(vp).label + "]",
        Diagram(target_sig, std::move(wires), std::move(occs),
                std::move(in_b), std::move(out_b)));
  }
  return map;
}

GeneratorMap syn_hom(const UGraphHom& alpha) {
  const OrderedUGraph& h = alpha.source();
  const OrderedUGraph& hp = alpha.target();
  auto source_sig =
      std::make_shared<const Signature>(Signature::from_ugraph(hp));
  auto target_sig =
      std::make_shared<const Signature>(Signature::from_ugraph(h));

  GeneratorMap map;
  map.source = source_sig;
  map.target = target_sig;
  for (std::size_t vp = 0; vp < hp.size(); ++vp)
    map.object_map[vp] = alpha.preimage(vp);

  const std::vector<std::vector<std::size_t>> source_cliques =
      enumerate_cliques(hp);
  const std::vector<std::vector<std::size_t>> target_cliques =
      enumerate_cliques(h);

  for (const std::vector<std::size_t>& cp : source_cliques) {
    std::vector<std::size_t> expanded;
    for (std::size_t vp : cp) {
      const std::vector<std::size_t> pf = alpha.preimage(vp);
      expanded.insert(expanded.end(), pf.begin(), pf.end());
    }
    std::vector<Wire> wires;
    std::map<std::size_t, std::size_t> wire_of;
    for (std::size_t v : expanded) {
      wire_of[v] = wires.size();
      wires.push_back(Wire{wires.size(), v});
    }
    std::vector<Occurrence> occs;
    for (const std::vector<std::size_t>& d : target_cliques) {
      std::set<std::size_t> image;
      for (std::size_t v : d) image.insert(alpha(v));
      std::vector<std::size_t> image_sorted(image.begin(), image.end());
      if (image_sorted != cp) continue;
      Occurrence oc;
      std::string name = "phi[";
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (i > 0) name += ",";
        name += h.vertex(d[i]).label;
      }
      name += "]";
      oc.generator = std::move(name);
      for (std::size_t v : d) oc.out_wires.push_back(wire_of.at(v));
      occs.push_back(std::move(oc));
    }
    std::vector<std::size_t> out_b;
    for (std::size_t v : expanded) out_b.push_back(wire_of.at(v));
    std::string cp_name = "phi[";
    for (std::size_t i = 0; i < cp.size(); ++i) {
      if (i > 0) cp_name += ",";
      cp_name += hp.vertex(cp[i]).label;
    }
    cp_name += "]";
    map.images.emplace(std::move(cp_name),
                       Diagram(target_sig, std::move(wires), std::move(occs),
                               {}, std::move(out_b)));
  }
  return map;
}

Diagram substitute(const Diagram& d, const GeneratorMap& map) {
  if (!map.source || !map.target)
    throw std::runtime_error("generator map is missing signatures");
  if (!(d.signature()->objects() == map.source->objects() &&
        d.signature()->generators() == map.source->generators()))
    throw std::runtime_error(
        "generator map does not match the diagram's signature");

  // Slot layout: expansions of the outer wires first, then the wires of each
  // occurrence's image diagram, in occurrence order.
  std::vector<std::size_t> wire_base(d.wires().size());
  std::vector<std::vector<std::size_t>> expansion(d.wires().size());
  std::size_t n_slots = 0;
  for (std::size_t w = 0; w < d.wires().size(); ++w) {
    auto it = map.object_map.find(d.wires()[w].object);
    if (it == map.object_map.end())
      throw std::runtime_error("no image for object of wire");
    expansion[w] = it->second;
    wire_base[w] = n_slots;
    n_slots += expansion[w].size();
  }
  std::vector<const Diagram*> images(d.occurrences().size(), nullptr);
  std::vector<std::size_t> occ_base(d.occurrences().size());
  for (std::size_t j = 0; j < d.occurrences().size(); ++j) {
    auto it = map.images.find(d.occurrences()[j].generator);
    if (it == map.images.end())
      throw std::runtime_error("no image for generator: " +
                               d.occurrences()[j].generator);
    images[j] = &it->second;
    occ_base[j] = n_slots;
    n_slots += images[j]->wires().size();
  }

  // Object carried by each slot.
  std::vector<std::size_t> slot_object(n_slots);
  for (std::size_t w = 0; w < d.wires().size(); ++w)
    for (std::size_t i = 0; i < expansion[w].size(); ++i)
      slot_object[wire_base[w] + i] = expansion[w][i];
  for (std::size_t j = 0; j < images.size(); ++j)
    for (std::size_t k = 0; k < images[j]->wires().size(); ++k)
      slot_object[occ_base[j] + k] = images[j]->wires()[k].object;

  Dsu dsu(n_slots);
  for (std::size_t j = 0; j < d.occurrences().size(); ++j) {
    const Occurrence& oc = d.occurrences()[j];
    const Diagram& img = *images[j];
    auto splice = [&](const std::vector<std::size_t>& outer_wires,
                      const std::vector<std::size_t>& image_boundary) {
      std::vector<std::size_t> outer_slots;
      for (std::size_t w : outer_wires)
        for (std::size_t i = 0; i < expansion[w].size(); ++i)
          outer_slots.push_back(wire_base[w] + i);
      if (outer_slots.size() != image_boundary.size())
        throw std::runtime_error("image boundary arity mismatch: " +
                                 oc.generator);
      for (std::size_t k = 0; k < outer_slots.size(); ++k) {
        std::size_t image_slot = occ_base[j] + image_boundary[k];
        if (slot_object[outer_slots[k]] != slot_object[image_slot])
          throw std::runtime_error("image boundary type mismatch: " +
                                   oc.generator);
        dsu.unite(outer_slots[k], image_slot);
      }
    };
    splice(oc.in_wires, img.input_boundary());
    splice(oc.out_wires, img.output_boundary());
  }

  // Result wires: one per class, ordered by smallest slot id.
  std::vector<std::size_t> class_of_slot(n_slots);
  std::map<std::size_t, std::size_t> wire_of_root;
  std::vector<Wire> wires;
  for (std::size_t s = 0; s < n_slots; ++s) {
    std::size_t root = dsu.find(s);
    auto it = wire_of_root.find(root);
    if (it == wire_of_root.end()) {
      it = wire_of_root.emplace(root, wires.size()).first;
      wires.push_back(Wire{wires.size(), slot_object[s]});
    }
    assert(wires[it->second].object == slot_object[s]);
    class_of_slot[s] = it->second;
  }

  std::vector<Occurrence> occs;
  for (std::size_t j = 0; j < d.occurrences().size(); ++j) {
    for (const Occurrence& ioc : images[j]->occurrences()) {
      Occurrence noc;
      noc.generator = ioc.generator;
      for (std::size_t w : ioc.in_wires)
        noc.in_wires.push_back(class_of_slot[occ_base[j] + w]);
      for (std::size_t w : ioc.out_wires)
        noc.out_wires.push_back(class_of_slot[occ_base[j] + w]);
      occs.push_back(std::move(noc));
    }
  }
  auto expand_boundary = [&](const std::vector<std::size_t>& boundary) {
    std::vector<std::size_t> out;
    for (std::size_t w : boundary)
      for (std::size_t i = 0; i < expansion[w].size(); ++i)
        out.push_back(class_of_slot[wire_base[w] + i]);
    return out;
  };
  return Diagram(map.target, std::move(wires), std::move(occs),
                 expand_boundary(d.input_boundary()),
                 expand_boundary(d.output_boundary()));
}

// ---------------------------------------------------------------------------
// Evaluation

Tensor evaluate(const Diagram& d, const SemanticsAssignment& assignment) {
  const Signature& sig = *d.signature();
  for (std::size_t o = 0; o < sig.objects().size(); ++o) {
    auto it = assignment.objects.find(o);
    if (it == assignment.objects.end())
      throw std::runtime_error("missing finite set for object: " +
                               sig.objects()[o].label);
    validate_finite_set(it->second);
  }
  for (const Generator& gen : sig.generators()) {
    auto it = assignment.generators.find(gen.name);
    if (it == assignment.generators.end())
      throw std::runtime_error("missing tensor for generator: " + gen.name);
    std::vector<FiniteSet> dom, cod;
    for (std::size_t o : gen.inputs) dom.push_back(assignment.objects.at(o));
    for (std::size_t o : gen.outputs) cod.push_back(assignment.objects.at(o));
    if (!(it->second.domain() == dom) || !(it->second.codomain() == cod))
      throw std::runtime_error("tensor shape mismatch for generator: " +
                               gen.name);
    if (assignment.require_stochastic && !it->second.is_stochastic())
      throw std::invalid_argument("non-stochastic tensor for generator: " +
                                  gen.name);
  }

  std::vector<std::size_t> card_by_wire(d.wires().size());
  for (std::size_t w = 0; w < d.wires().size(); ++w)
    card_by_wire[w] = assignment.objects.at(d.wires()[w].object).size();

  std::vector<std::size_t> uses(d.wires().size(), 0);
  for (const Occurrence& oc : d.occurrences()) {
    for (std::size_t w : oc.in_wires) ++uses[w];
    for (std::size_t w : oc.out_wires) ++uses[w];
  }
  const std::vector<std::size_t> total_uses = uses;
  std::vector<char> on_boundary(d.wires().size(), 0);
  for (std::size_t w : d.input_boundary()) on_boundary[w] = 1;
  for (std::size_t w : d.output_boundary()) on_boundary[w] = 1;

  Joint joint;
  joint.data = {1.0};
  for (const Occurrence& oc : d.occurrences()) {
    const Tensor& tensor = assignment.generators.at(oc.generator);
    std::set<std::size_t> touched_set(oc.in_wires.begin(), oc.in_wires.end());
    touched_set.insert(oc.out_wires.begin(), oc.out_wires.end());
    std::vector<std::size_t> fresh;
    for (std::size_t w : touched_set)
      if (!std::binary_search(joint.wires.begin(), joint.wires.end(), w))
        fresh.push_back(w);
    multiply_in(joint, fresh, &oc, &tensor, card_by_wire);
    for (std::size_t w : oc.in_wires) --uses[w];
    for (std::size_t w : oc.out_wires) --uses[w];
    for (std::size_t w : touched_set)
      if (uses[w] == 0 && !on_boundary[w]) sum_out(joint, w);
  }

  // Wires no occurrence touches: boundary ones become free dimensions, the
  // rest contribute a cardinality factor (a producerless wire summed over).
  double untouched_scale = 1.0;
  std::vector<std::size_t> free_wires;
  for (std::size_t w = 0; w < d.wires().size(); ++w) {
    if (total_uses[w] > 0) continue;
    if (on_boundary[w])
      free_wires.push_back(w);
    else
      untouched_scale *= static_cast<double>(card_by_wire[w]);
  }
  if (!free_wires.empty())
    multiply_in(joint, free_wires, nullptr, nullptr, card_by_wire);
  if (untouched_scale != 1.0)
    for (double& v : joint.data) v *= untouched_scale;

  std::vector<FiniteSet> dom, cod;
  for (std::size_t w : d.input_boundary())
    dom.push_back(assignment.objects.at(d.wires()[w].object));
  for (std::size_t w : d.output_boundary())
    cod.push_back(assignment.objects.at(d.wires()[w].object));
  const std::size_t dom_size = product_size(dom);
  const std::size_t cod_size = product_size(cod);

  std::vector<std::size_t> joint_pos(d.wires().size(),
                                     std::numeric_limits<std::size_t>::max());
  for (std::size_t k = 0; k < joint.wires.size(); ++k)
    joint_pos[joint.wires[k]] = k;

  std::vector<double> entries(cod_size * dom_size, 0.0);
  std::vector<std::ptrdiff_t> pin(joint.wires.size());
  for (std::size_t cod_lin = 0; cod_lin < cod_size; ++cod_lin) {
    const std::vector<std::size_t> cod_tup = unravel_index(cod, cod_lin);
    for (std::size_t dom_lin = 0; dom_lin < dom_size; ++dom_lin) {
      const std::vector<std::size_t> dom_tup = unravel_index(dom, dom_lin);
      std::fill(pin.begin(), pin.end(), std::ptrdiff_t{-1});
      bool consistent = true;
      auto pin_slot = [&](std::size_t w, std::size_t value) {
        std::size_t p = joint_pos[w];
        assert(p != std::numeric_limits<std::size_t>::max());
        if (pin[p] >= 0 && pin[p] != static_cast<std::ptrdiff_t>(value)) {
          consistent = false;
          return;
        }
        pin[p] = static_cast<std::ptrdiff_t>(value);
      };
      for (std::size_t k = 0; k < d.input_boundary().size() && consistent; ++k)
        pin_slot(d.input_boundary()[k], dom_tup[k]);
      for (std::size_t k = 0; k < d.output_boundary().size() && consistent;
           ++k)
        pin_slot(d.output_boundary()[k], cod_tup[k]);
      double value = 0.0;
      if (consistent) {
        std::size_t lin = 0;
        for (std::size_t k = 0; k < joint.wires.size(); ++k) {
          assert(pin[k] >= 0);
          lin = lin * joint.card[k] + static_cast<std::size_t>(pin[k]);
        }
        value = joint.data[lin];
      }
      entries[cod_lin * dom_size + dom_lin] = value;
    }
  }
  return Tensor(std::move(dom), std::move(cod), std::move(entries));
}

// ---------------------------------------------------------------------------
// Rendering and equality

std::string dump(const Diagram& d) {
  std::ostringstream out;
  out << "flavor: "
      << (d.flavor() == Flavor::CD ? "strict" : "loose") << '\n';
  out << "wires:";
  for (const Wire& w : d.wires())
    out << ' ' << w.id << ':' << d.signature()->objects()[w.object].label;
  out << '\n';
  for (const Occurrence& oc : d.occurrences())
    out << "occ: " << oc.generator << " (" << join_ids(oc.in_wires) << " -> "
        << join_ids(oc.out_wires) << ")\n";
  out << "in: " << join_ids(d.input_boundary()) << '\n';
  out << "out: " << join_ids(d.output_boundary()) << '\n';
  return out.str();
}

SemanticsAssignment random_assignment(const Signature& sig,
                                      unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SemanticsAssignment asg;
  for (std::size_t o = 0; o < sig.objects().size(); ++o) {
    std::size_t card = 2 + static_cast<std::size_t>(rng() % 2);
    FiniteSet set;
    set.var_name = sig.objects()[o].label;
    for (std::size_t i = 0; i < card; ++i)
      set.elements.push_back("e" + std::to_string(i));
    asg.objects.emplace(o, std::move(set));
  }
  for (const Generator& gen : sig.generators()) {
    std::vector<FiniteSet> dom, cod;
    for (std::size_t o : gen.inputs) dom.push_back(asg.objects.at(o));
    for (std::size_t o : gen.outputs) cod.push_back(asg.objects.at(o));
    std::vector<double> entries(product_size(dom) * product_size(cod));
    for (double& v : entries) v = 1.0 - unit(rng) * 0.999;
    asg.generators.emplace(gen.name,
                           Tensor(std::move(dom), std::move(cod),
                                  std::move(entries)));
  }
  return asg;
}

bool diagrams_equal(const Diagram& a, const Diagram& b,
                    unsigned long long seed, int trials, double tol) {
  const Signature& sa = *a.signature();
  const Signature& sb = *b.signature();
  if (!(sa.objects() == sb.objects() && sa.generators() == sb.generators()))
    return false;
  if (a.input_objects() != b.input_objects() ||
      a.output_objects() != b.output_objects())
    return false;
  for (int t = 0; t < trials; ++t) {
    SemanticsAssignment asg =
        random_assignment(sa, seed + static_cast<unsigned long long>(t));
    const Tensor ta = evaluate(a, asg);
    const Tensor tb = evaluate(b, asg);
    if (max_abs_diff(ta, tb) > tol) return false;
  }
  return true;
}

}  // namespace gmdiag
