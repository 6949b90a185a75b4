// Microbenchmarks for the hot paths: joint contraction, the two graph
// transforms, kernel composition, and clique enumeration.

#include <benchmark/benchmark.h>

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <gmdiag/graphs.hpp>
#include <gmdiag/network.hpp>
#include <gmdiag/semantics.hpp>
#include <gmdiag/transform.hpp>

namespace {

using namespace gmdiag;

FiniteSet binary(const std::string& name) {
  return FiniteSet{name, {"e0", "e1"}};
}

// An eight-variable binary network: a chain 0 -> 1 -> ... -> 7 with extra
// edges from vertex 0 to every even vertex, deterministic kernel entries.
BayesianNetwork chain_bn() {
  const std::size_t n = 8;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  for (std::size_t v = 0; v < n; ++v) {
    labels.push_back("V" + std::to_string(v));
    if (v + 1 < n) edges.emplace_back(v, v + 1);
    if (v >= 4 && v % 2 == 0) edges.emplace_back(0, v);
  }
  OrderedDag dag(labels, edges);
  std::vector<FiniteSet> sets;
  for (const std::string& l : labels) sets.push_back(binary(l));
  std::vector<StochasticKernel> kernels;
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<FiniteSet> dom;
    for (std::size_t p : parents(dag, v)) dom.push_back(sets[p]);
    const std::size_t ds = product_size(dom);
    std::vector<double> entries(2 * ds);
    for (std::size_t x = 0; x < ds; ++x) {
      const double p = 0.2 + 0.05 * static_cast<double>((x + v) % 13);
      entries[x] = p;
      entries[ds + x] = 1.0 - p;
    }
    kernels.emplace_back(Tensor(dom, {sets[v]}, entries));
  }
  return BayesianNetwork(dag, sets, kernels);
}

MarkovNetwork four_cycle_mn() {
  OrderedUGraph graph({"A", "B", "C", "D"}, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  std::vector<FiniteSet> sets;
  for (const char* l : {"A", "B", "C", "D"}) sets.push_back(binary(l));
  std::map<std::vector<std::size_t>, Tensor> factors;
  factors.emplace(std::vector<std::size_t>{0, 1},
                  Tensor({}, {sets[0], sets[1]}, {10, 1, 5, 30}));
  factors.emplace(std::vector<std::size_t>{1, 2},
                  Tensor({}, {sets[1], sets[2]}, {100, 1, 1, 100}));
  factors.emplace(std::vector<std::size_t>{2, 3},
                  Tensor({}, {sets[2], sets[3]}, {1, 100, 100, 1}));
  factors.emplace(std::vector<std::size_t>{0, 3},
                  Tensor({}, {sets[0], sets[3]}, {100, 1, 1, 100}));
  return MarkovNetwork(graph, sets, factors);
}

Tensor square_tensor(std::size_t card, const std::string& in,
                     const std::string& out) {
  std::vector<std::string> elems;
  for (std::size_t i = 0; i < card; ++i) elems.push_back(std::to_string(i));
  FiniteSet x{in, elems};
  FiniteSet y{out, elems};
  std::vector<double> entries(card * card);
  for (std::size_t i = 0; i < entries.size(); ++i)
    entries[i] = 1.0 + static_cast<double>(i % 7);
  return Tensor({x}, {y}, entries);
}

void BM_bn_joint(benchmark::State& state) {
  const BayesianNetwork bn = chain_bn();
  for (auto _ : state) benchmark::DoNotOptimize(bn_joint(bn));
}
BENCHMARK(BM_bn_joint);

void BM_moralise_bn(benchmark::State& state) {
  const BayesianNetwork bn = chain_bn();
  for (auto _ : state) benchmark::DoNotOptimize(moralise_bn(bn));
}
BENCHMARK(BM_moralise_bn);

void BM_triangulate_mn(benchmark::State& state) {
  const MarkovNetwork mn = four_cycle_mn();
  for (auto _ : state) benchmark::DoNotOptimize(triangulate_mn(mn));
}
BENCHMARK(BM_triangulate_mn);

void BM_kernel_compose(benchmark::State& state) {
  const std::size_t card = static_cast<std::size_t>(state.range(0));
  const Tensor f = square_tensor(card, "X", "Y");
  const Tensor g = square_tensor(card, "Y", "Z");
  for (auto _ : state) benchmark::DoNotOptimize(kernel_compose(f, g));
}
BENCHMARK(BM_kernel_compose)->Arg(8)->Arg(32)->Arg(64);

void BM_enumerate_cliques(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  for (std::size_t v = 0; v < n; ++v) labels.push_back("V" + std::to_string(v));
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if ((u + v) % 3 != 0) edges.emplace_back(u, v);
  const OrderedUGraph h(labels, edges);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_cliques(h));
}
BENCHMARK(BM_enumerate_cliques)->Arg(8)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
