#include "gmdiag/network.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <stdexcept>

namespace gmdiag {

namespace {

void validate_sets(const std::vector<FiniteSet>& sets, std::size_t n) {
  if (sets.size() != n)
    throw std::invalid_argument("one finite set per vertex required");
  std::set<std::string> names;
  for (const FiniteSet& fs : sets) {
    validate_finite_set(fs);
    if (!names.insert(fs.var_name).second)
      throw std::invalid_argument("duplicate variable name: " + fs.var_name);
  }
}

std::vector<std::string> all_generator_names(const Signature& sig) {
  std::vector<std::string> names;
  names.reserve(sig.generators().size());
  for (const Generator& g : sig.generators()) names.push_back(g.name);
  return names;
}

}  // namespace

// ---------------------------------------------------------------------------
// BayesianNetwork

BayesianNetwork::BayesianNetwork(OrderedDag dag, std::vector<FiniteSet> sets,
                                 std::vector<StochasticKernel> kernels)
    : dag_(std::move(dag)),
      sets_(std::move(sets)),
      kernels_(std::move(kernels)) {
  validate_sets(sets_, dag_.size());
  if (kernels_.size() != dag_.size())
    throw std::invalid_argument("one kernel per vertex required");
  for (std::size_t v = 0; v < dag_.size(); ++v) {
    std::vector<FiniteSet> dom;
    for (std::size_t p : parents(dag_, v)) dom.push_back(sets_[p]);
    const std::vector<FiniteSet> cod = {sets_[v]};
    if (!(kernels_[v].domain() == dom) || !(kernels_[v].codomain() == cod))
      throw std::invalid_argument("kernel shape mismatch at vertex: " +
                                  dag_.vertex(v).label);
  }
  sig_ = std::make_shared<const Signature>(Signature::from_dag(dag_));
}

SemanticsAssignment BayesianNetwork::assignment() const {
  SemanticsAssignment asg;
  asg.require_stochastic = true;
  for (std::size_t v = 0; v < dag_.size(); ++v) {
    asg.objects.emplace(v, sets_[v]);
    asg.generators.emplace("f[" + dag_.vertex(v).label + "]",
                           static_cast<const Tensor&>(kernels_[v]));
  }
  return asg;
}

// ---------------------------------------------------------------------------
// MarkovNetwork

MarkovNetwork::MarkovNetwork(OrderedUGraph graph, std::vector<FiniteSet> sets,
                             std::map<std::vector<std::size_t>, Tensor> factors)
    : graph_(std::move(graph)),
      sets_(std::move(sets)),
      factors_(std::move(factors)) {
  validate_sets(sets_, graph_.size());
  for (const auto& [clique, factor] : factors_) {
    if (clique.empty())
      throw std::invalid_argument("factor scope must be non-empty");
    for (std::size_t i = 0; i < clique.size(); ++i) {
      if (clique[i] >= graph_.size())
        throw std::invalid_argument("factor scope vertex out of range");
      if (i > 0 && clique[i - 1] >= clique[i])
        throw std::invalid_argument("factor scope must be strictly ascending");
    }
    for (std::size_t i = 0; i < clique.size(); ++i)
      for (std::size_t j = i + 1; j < clique.size(); ++j)
        if (!graph_.has_edge(clique[i], clique[j]))
          throw std::invalid_argument("factor scope is not a clique");
    std::vector<FiniteSet> cod;
    for (std::size_t v : clique) cod.push_back(sets_[v]);
    if (!factor.domain().empty() || !(factor.codomain() == cod))
      throw std::invalid_argument("factor shape mismatch");
  }
  sig_ = std::make_shared<const Signature>(Signature::from_ugraph(graph_));
}

Tensor MarkovNetwork::factor_for(const std::vector<std::size_t>& clique) const {
  auto it = factors_.find(clique);
  if (it != factors_.end()) return it->second;
  std::vector<FiniteSet> cod;
  for (std::size_t v : clique) cod.push_back(sets_.at(v));
  return Tensor::constant({}, std::move(cod), 1.0);
}

SemanticsAssignment MarkovNetwork::assignment() const {
  SemanticsAssignment asg;
  for (std::size_t v = 0; v < graph_.size(); ++v) asg.objects.emplace(v, sets_[v]);
  for (const Generator& g : sig_->generators())
    asg.generators.emplace(g.name, factor_for(g.outputs));
  return asg;
}

// ---------------------------------------------------------------------------
// Joints

Diagram bn_joint_diagram(const BayesianNetwork& bn) {
  return copy_composition(bn.signature(),
                          all_generator_names(*bn.signature()));
}

Distribution bn_joint(const BayesianNetwork& bn) {
  return Distribution(evaluate(bn_joint_diagram(bn), bn.assignment()));
}

Diagram mn_joint_diagram(const MarkovNetwork& mn) {
  return compare_composition(mn.signature(),
                             all_generator_names(*mn.signature()));
}

Tensor mn_unnormalized(const MarkovNetwork& mn) {
  return evaluate(mn_joint_diagram(mn), mn.assignment());
}

NormalizeResult mn_joint(const MarkovNetwork& mn) {
  return normalize_tensor(mn_unnormalized(mn));
}

// ---------------------------------------------------------------------------
// Morphisms

namespace {

MorphismReport deviation_report(const Tensor& mapped, const Tensor& expected,
                                double tol) {
  MorphismReport report;
  report.max_deviation = max_abs_diff(mapped, expected);
  report.pass = report.max_deviation <= tol;
  report.detail = report.pass ? "kernel maps source joint to destination joint"
                              : "mapped source joint deviates from destination";
  return report;
}

void check_eta_shape(const StochasticKernel& eta,
                     const std::vector<FiniteSet>& src_sets,
                     const std::vector<FiniteSet>& dst_sets) {
  if (!(eta.domain() == src_sets))
    throw std::invalid_argument("morphism kernel domain mismatch");
  if (!(eta.codomain() == dst_sets))
    throw std::invalid_argument("morphism kernel codomain mismatch");
}

}  // namespace

MorphismReport check_morphism(const BayesianNetwork& src,
                              const BayesianNetwork& dst,
                              const BnMorphism& morphism, double tol) {
  if (!(morphism.alpha.source() == dst.dag()) ||
      !(morphism.alpha.target() == src.dag()))
    throw std::invalid_argument(
        "morphism graph map must run from destination to source");
  check_eta_shape(morphism.eta, src.sets(), dst.sets());
  const Tensor mapped = kernel_compose(bn_joint(src), morphism.eta);
  return deviation_report(mapped, bn_joint(dst), tol);
}

MorphismReport check_morphism(const MarkovNetwork& src,
                              const MarkovNetwork& dst,
                              const MnMorphism& morphism, double tol) {
  if (!(morphism.alpha.source() == dst.graph()) ||
      !(morphism.alpha.target() == src.graph()))
    throw std::invalid_argument(
        "morphism graph map must run from destination to source");
  check_eta_shape(morphism.eta, src.sets(), dst.sets());
  const NormalizeResult src_joint = mn_joint(src);
  const NormalizeResult dst_joint = mn_joint(dst);
  if (src_joint.degenerate() || dst_joint.degenerate())
    throw std::runtime_error("degenerate network joint");
  const Tensor mapped = kernel_compose(*src_joint.dist, morphism.eta);
  return deviation_report(mapped, *dst_joint.dist, tol);
}

BnMorphism compose_morphism(const BnMorphism& first, const BnMorphism& second) {
  return BnMorphism{
      hom_compose(second.alpha, first.alpha),
      StochasticKernel(kernel_compose(first.eta, second.eta))};
}

MnMorphism compose_morphism(const MnMorphism& first, const MnMorphism& second) {
  return MnMorphism{
      hom_compose(second.alpha, first.alpha),
      StochasticKernel(kernel_compose(first.eta, second.eta))};
}

// ---------------------------------------------------------------------------
// Revealing a variable

RevealResult reveal_variable(const BayesianNetwork& bn,
                             const std::string& label,
                             const std::vector<std::size_t>& parent_ids,
                             const StochasticKernel& f) {
  const std::size_t n = bn.dag().size();
  if (n == 0)
    throw std::invalid_argument("cannot reveal on an empty network");
  for (std::size_t i = 0; i < parent_ids.size(); ++i) {
    if (parent_ids[i] >= n)
      throw std::invalid_argument("parent vertex out of range");
    if (i > 0 && parent_ids[i - 1] >= parent_ids[i])
      throw std::invalid_argument("parents must be strictly ascending");
  }
  std::vector<FiniteSet> expected_dom;
  for (std::size_t p : parent_ids) expected_dom.push_back(bn.sets()[p]);
  if (!(f.domain() == expected_dom) || f.codomain().size() != 1)
    throw std::invalid_argument("revealing kernel shape mismatch");

  std::vector<std::string> labels;
  for (std::size_t v = 0; v < n; ++v) labels.push_back(bn.dag().vertex(v).label);
  labels.push_back(label);
  std::vector<Edge> edges(bn.dag().edges().begin(), bn.dag().edges().end());
  for (std::size_t p : parent_ids) edges.emplace_back(p, n);
  OrderedDag extended_dag(std::move(labels), std::move(edges));

  std::vector<FiniteSet> sets = bn.sets();
  sets.push_back(f.codomain()[0]);
  std::vector<StochasticKernel> kernels = bn.kernels();
  kernels.push_back(f);
  BayesianNetwork extended(extended_dag, std::move(sets), std::move(kernels));

  // Kernel that copies the old variables and samples the new one from f.
  const std::vector<FiniteSet>& dom = bn.sets();
  const std::vector<FiniteSet>& cod = extended.sets();
  const std::size_t dom_size = product_size(dom);
  const std::size_t new_card = f.codomain()[0].size();
  std::vector<double> entries(product_size(cod) * dom_size, 0.0);
  for (std::size_t x = 0; x < dom_size; ++x) {
    const std::vector<std::size_t> xs = unravel_index(dom, x);
    std::vector<std::size_t> pa_values;
    for (std::size_t p : parent_ids) pa_values.push_back(xs[p]);
    const std::size_t pa_lin = ravel_index(expected_dom, pa_values);
    std::vector<std::size_t> ys = xs;
    ys.push_back(0);
    for (std::size_t v = 0; v < new_card; ++v) {
      ys.back() = v;
      entries[ravel_index(cod, ys) * dom_size + x] = f(v, pa_lin);
    }
  }
  StochasticKernel eta(Tensor(dom, cod, std::move(entries)));

  // The graph map of the extension morphism collapses the new last vertex
  // downward; the first order- and edge-preserving saturation wins (the
  // constant map always qualifies).
  for (std::size_t k = n; k-- > 0;) {
    std::vector<std::size_t> vmap(n + 1);
    for (std::size_t i = 0; i <= n; ++i) vmap[i] = std::min(i, k);
    try {
      DagHom alpha(extended.dag(), bn.dag(), vmap);
      return RevealResult{std::move(extended),
                          BnMorphism{std::move(alpha), std::move(eta)}};
    } catch (const std::invalid_argument&) {
      continue;
    }
  }
  throw std::logic_error("no valid graph map for the extension");
}

// ---------------------------------------------------------------------------
// Factorization checks

bool verify_factorization(const Distribution& omega,
                          const BayesianNetwork& bn, double tol) {
  if (!(omega.codomain() == bn_joint(bn).codomain()))
    throw std::invalid_argument("state shape mismatch");
  return max_abs_diff(omega, bn_joint(bn)) <= tol;
}

bool verify_factorization(const Distribution& omega, const MarkovNetwork& mn,
                          double tol) {
  const Tensor unnorm = mn_unnormalized(mn);
  if (!(omega.codomain() == unnorm.codomain()))
    throw std::invalid_argument("state shape mismatch");
  return proportional_eq(unnorm, omega, tol);
}

}  // namespace gmdiag
