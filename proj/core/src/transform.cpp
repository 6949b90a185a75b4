#include "gmdiag/transform.hpp"

#include <algorithm>
#include <cassert>
#include <memory>
#include <set>
#include <stdexcept>

namespace gmdiag {

namespace {

std::string kernel_name(const OrderedDag& g, std::size_t v) {
  return "f[" + g.vertex(v).label + "]";
}

std::string factor_name(const OrderedUGraph& h,
                        const std::vector<std::size_t>& clique) {
  std::string name = "phi[";
  for (std::size_t i = 0; i < clique.size(); ++i) {
    if (i > 0) name += ",";
    name += h.vertex(clique[i]).label;
  }
  return name + "]";
}

// The clique carrying the kernel of its maximum vertex, if any: C is a
// kernel clique exactly when C = {max(C)} union parents(max(C)).
bool is_kernel_clique(const OrderedDag& g,
                      const std::vector<std::size_t>& clique) {
  const std::size_t v = clique.back();
  std::vector<std::size_t> expected = parents(g, v);
  expected.push_back(v);
  return expected == clique;
}

}  // namespace

// ---------------------------------------------------------------------------
// Moralisation

MoralisationMap make_moralisation_map(const OrderedDag& g) {
  OrderedUGraph moral = moralise_graph(g);
  auto source_sig =
      std::make_shared<const Signature>(Signature::from_ugraph(moral));
  auto target_sig = std::make_shared<const Signature>(
      Signature::from_dag(g).with_flavor(Flavor::Hypergraph));

  GeneratorMap map;
  map.source = source_sig;
  map.target = target_sig;
  for (std::size_t v = 0; v < g.size(); ++v) map.object_map[v] = {v};

  for (const std::vector<std::size_t>& clique : enumerate_cliques(moral)) {
    const std::string name = factor_name(moral, clique);
    if (is_kernel_clique(g, clique)) {
      map.images.emplace(
          name,
          graph_of(Diagram::single(target_sig,
                                   kernel_name(g, clique.back()))));
    } else {
      // Producerless wires on the clique's variables: the uniform-weight
      // (omni) factor.
      std::vector<Wire> wires;
      std::vector<std::size_t> out_b;
      for (std::size_t v : clique) {
        out_b.push_back(wires.size());
        wires.push_back(Wire{wires.size(), v});
      }
      map.images.emplace(name, Diagram(target_sig, std::move(wires), {}, {},
                                       std::move(out_b)));
    }
  }
  return MoralisationMap{g, std::move(moral), std::move(map)};
}

MarkovNetwork moralise_bn(const BayesianNetwork& bn) {
  MoralisationMap mm = make_moralisation_map(bn.dag());
  const SemanticsAssignment asg = bn.assignment();
  std::map<std::vector<std::size_t>, Tensor> factors;
  for (const std::vector<std::size_t>& clique : enumerate_cliques(mm.moral)) {
    if (!is_kernel_clique(bn.dag(), clique)) continue;
    const Diagram& image =
        mm.map.images.at(factor_name(mm.moral, clique));
    factors.emplace(clique, evaluate(image, asg));
  }
  return MarkovNetwork(std::move(mm.moral), bn.sets(), std::move(factors));
}

// ---------------------------------------------------------------------------
// Triangulation

TriangulationMap make_triangulation_map(const OrderedUGraph& h) {
  OrderedDag tri = triangulate_graph(h);
  auto source_sig = std::make_shared<const Signature>(
      Signature::from_dag(tri).with_flavor(Flavor::Hypergraph));
  auto target_sig =
      std::make_shared<const Signature>(Signature::from_ugraph(h));

  std::map<std::size_t, std::vector<std::vector<std::size_t>>> cliques_by_max;
  for (const std::vector<std::size_t>& clique : enumerate_cliques(h))
    cliques_by_max[clique.back()].push_back(clique);

  GeneratorMap map;
  map.source = source_sig;
  map.target = target_sig;
  for (std::size_t v = 0; v < h.size(); ++v) map.object_map[v] = {v};

  for (std::size_t v = 0; v < h.size(); ++v) {
    const std::vector<std::size_t> pa = parents(tri, v);
    std::vector<std::size_t> verts = pa;
    verts.push_back(v);
    std::vector<Wire> wires;
    std::map<std::size_t, std::size_t> wire_of;
    for (std::size_t u : verts) {
      wire_of[u] = wires.size();
      wires.push_back(Wire{wires.size(), u});
    }
    std::vector<Occurrence> occs;
    for (const std::vector<std::size_t>& clique : cliques_by_max[v]) {
      Occurrence oc;
      oc.generator = factor_name(h, clique);
      for (std::size_t u : clique) {
        auto it = wire_of.find(u);
        // The triangulation makes every co-member of a clique with maximum v
        // a parent of v.
        assert(it != wire_of.end());
        oc.out_wires.push_back(it->second);
      }
      occs.push_back(std::move(oc));
    }
    std::vector<std::size_t> in_b;
    for (std::size_t u : pa) in_b.push_back(wire_of.at(u));
    map.images.emplace(
        kernel_name(tri, v),
        Diagram(target_sig, std::move(wires), std::move(occs), std::move(in_b),
                {wire_of.at(v)}));
  }
  return TriangulationMap{h, std::move(tri), std::move(map),
                          std::move(cliques_by_max)};
}

NormalizeFamilyResult normalize_family(
    const OrderedDag& dag, const std::vector<FiniteSet>& sets,
    const std::map<std::size_t, Tensor>& family) {
  const std::size_t n = dag.size();
  if (sets.size() != n)
    throw std::invalid_argument("one finite set per vertex required");
  std::map<std::size_t, Tensor> f = family;
  for (std::size_t v = 0; v < n; ++v) {
    auto it = f.find(v);
    if (it == f.end())
      throw std::invalid_argument("family tensor missing for vertex: " +
                                  dag.vertex(v).label);
    std::vector<FiniteSet> dom;
    for (std::size_t p : parents(dag, v)) dom.push_back(sets[p]);
    if (!(it->second.domain() == dom) ||
        !(it->second.codomain() == std::vector<FiniteSet>{sets[v]}))
      throw std::invalid_argument("family tensor shape mismatch at vertex: " +
                                  dag.vertex(v).label);
  }

  NormalizeFamilyResult result;
  result.Z = 1.0;
  result.kernels.resize(n);
  for (std::size_t v = n; v-- > 0;) {
    const Tensor& fv = f.at(v);
    const std::size_t ds = fv.domain_size();
    const std::size_t card = sets[v].size();
    std::vector<double> colsum(ds, 0.0);
    for (std::size_t y = 0; y < card; ++y)
      for (std::size_t x = 0; x < ds; ++x) colsum[x] += fv(y, x);

    std::vector<double> g_entries(card * ds);
    for (std::size_t y = 0; y < card; ++y)
      for (std::size_t x = 0; x < ds; ++x)
        g_entries[y * ds + x] = colsum[x] > 0.0
                                    ? fv(y, x) / colsum[x]
                                    : 1.0 / static_cast<double>(card);
    result.kernels[v] = StochasticKernel(
        Tensor(fv.domain(), fv.codomain(), std::move(g_entries)));
    result.lambdas.emplace(v, Tensor(fv.domain(), {}, colsum));

    const std::vector<std::size_t> pa = parents(dag, v);
    if (pa.empty()) {
      result.Z *= colsum[0];
      continue;
    }
    // Absorb the column sums into the tensor of the largest parent.  The
    // remaining parents of v must be parents of that parent, so the column
    // sum is a function of the absorbing tensor's assignment.
    const std::size_t w = pa.back();
    const std::vector<std::size_t> paw = parents(dag, w);
    std::vector<std::size_t> slot_in_paw;  // per remaining parent of v
    for (std::size_t i = 0; i + 1 < pa.size(); ++i) {
      auto it = std::find(paw.begin(), paw.end(), pa[i]);
      if (it == paw.end())
        throw std::invalid_argument(
            "kernel family parents must be pairwise adjacent");
      slot_in_paw.push_back(static_cast<std::size_t>(it - paw.begin()));
    }
    const Tensor& fw = f.at(w);
    const std::size_t wds = fw.domain_size();
    const std::size_t wcard = sets[w].size();
    std::vector<double> new_entries(fw.entries());
    for (std::size_t x = 0; x < wds; ++x) {
      const std::vector<std::size_t> xs = unravel_index(fw.domain(), x);
      for (std::size_t y = 0; y < wcard; ++y) {
        std::vector<std::size_t> pav_values;
        for (std::size_t i = 0; i + 1 < pa.size(); ++i)
          pav_values.push_back(xs[slot_in_paw[i]]);
        pav_values.push_back(y);
        new_entries[y * wds + x] *=
            colsum[ravel_index(fv.domain(), pav_values)];
      }
    }
    f.at(w) = Tensor(fw.domain(), fw.codomain(), std::move(new_entries));
  }
  if (result.Z == 0.0)
    throw DegenerateError("degenerate family: normalizing constant is zero");
  return result;
}

TriangulateResult triangulate_mn(const MarkovNetwork& mn) {
  TriangulationMap tm = make_triangulation_map(mn.graph());
  const SemanticsAssignment asg = mn.assignment();
  std::map<std::size_t, Tensor> family;
  for (std::size_t v = 0; v < mn.graph().size(); ++v)
    family.emplace(v, evaluate(tm.map.images.at(kernel_name(tm.tri, v)), asg));

  NormalizeFamilyResult norm = normalize_family(tm.tri, mn.sets(), family);
  BayesianNetwork bn(tm.tri, mn.sets(), std::move(norm.kernels));
  return TriangulateResult{std::move(bn), std::move(family),
                           std::move(norm.lambdas), norm.Z};
}

// ---------------------------------------------------------------------------
// Round trips and morphism transport

BnEmbedding tr_mor_embedding(const BayesianNetwork& bn) {
  TriangulateResult tri = triangulate_mn(moralise_bn(bn));
  std::vector<std::size_t> id_map(bn.dag().size());
  for (std::size_t v = 0; v < id_map.size(); ++v) id_map[v] = v;
  DagHom alpha(bn.dag(), tri.bn.dag(), std::move(id_map));
  StochasticKernel eta(Tensor::identity(bn.sets()));
  return BnEmbedding{std::move(tri.bn),
                     BnMorphism{std::move(alpha), std::move(eta)}};
}

MnEmbedding mor_tr_embedding(const MarkovNetwork& mn) {
  MarkovNetwork transformed = moralise_bn(triangulate_mn(mn).bn);
  std::vector<std::size_t> id_map(mn.graph().size());
  for (std::size_t v = 0; v < id_map.size(); ++v) id_map[v] = v;
  UGraphHom alpha(mn.graph(), transformed.graph(), std::move(id_map));
  StochasticKernel eta(Tensor::identity(mn.sets()));
  return MnEmbedding{std::move(transformed),
                     MnMorphism{std::move(alpha), std::move(eta)}};
}

MnMorphism moralise_morphism(const BnMorphism& m) {
  return MnMorphism{UGraphHom(moralise_graph(m.alpha.source()),
                              moralise_graph(m.alpha.target()),
                              m.alpha.vertex_map()),
                    m.eta};
}

BnMorphism triangulate_morphism(const MnMorphism& m) {
  return BnMorphism{DagHom(triangulate_graph(m.alpha.source()),
                           triangulate_graph(m.alpha.target()),
                           m.alpha.vertex_map()),
                    m.eta};
}

}  // namespace gmdiag
