#include <doctest.h>

#include <gmdiag/network.hpp>
#include <gmdiag/semantics.hpp>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "random_gen.hpp"

using namespace gmdiag;

namespace {

FiniteSet fs(const std::string& name, std::size_t card) {
  std::vector<std::string> elems;
  for (std::size_t i = 0; i < card; ++i) elems.push_back("e" + std::to_string(i));
  return FiniteSet{name, elems};
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("single-vertex enumeration returns the prior verbatim") {
  OrderedDag dag({"A"}, {});
  std::vector<FiniteSet> sets{fs("A", 3)};
  std::vector<StochasticKernel> kernels;
  kernels.emplace_back(Tensor({}, {sets[0]}, {0.2, 0.3, 0.5}));
  Distribution d = gmdiag_oracle::brute_bn_joint(
      BayesianNetwork(dag, sets, kernels));
  CHECK(d.entries() == std::vector<double>{0.2, 0.3, 0.5});
}

TEST_CASE("independent vertices enumerate to the product measure") {
  OrderedDag dag({"A", "B"}, {});
  std::vector<FiniteSet> sets{fs("A", 2), fs("B", 3)};
  std::vector<StochasticKernel> kernels;
  kernels.emplace_back(Tensor({}, {sets[0]}, {0.25, 0.75}));
  kernels.emplace_back(Tensor({}, {sets[1]}, {0.5, 0.3, 0.2}));
  Distribution d = gmdiag_oracle::brute_bn_joint(
      BayesianNetwork(dag, sets, kernels));
  REQUIRE(d.entries().size() == 6);
  // Linear order: first variable slowest.
  CHECK(d.entries()[0] == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(d.entries()[1] == doctest::Approx(0.075).epsilon(1e-15));
  CHECK(d.entries()[2] == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(d.entries()[3] == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(d.entries()[5] == doctest::Approx(0.15).epsilon(1e-15));
}

TEST_CASE("the four-vertex fan-in network matches the wired evaluation") {
  OrderedDag dag({"B", "E", "A", "R"}, {{0, 2}, {1, 2}, {1, 3}});
  std::vector<FiniteSet> sets{fs("B", 2), fs("E", 2), fs("A", 2), fs("R", 2)};
  std::vector<StochasticKernel> kernels;
  kernels.emplace_back(Tensor({}, {sets[0]}, {0.02, 0.98}));
  kernels.emplace_back(Tensor({}, {sets[1]}, {0.01, 0.99}));
  kernels.emplace_back(Tensor({sets[0], sets[1]}, {sets[2]},
                              {0.95, 0.94, 0.29, 0.001,
                               0.05, 0.06, 0.71, 0.999}));
  kernels.emplace_back(
      Tensor({sets[1]}, {sets[3]}, {0.9, 0.0001, 0.1, 0.9999}));
  BayesianNetwork bn(dag, sets, kernels);
  Distribution oracle = gmdiag_oracle::brute_bn_joint(bn);
  CHECK(max_abs_diff(oracle, bn_joint(bn)) <= 1e-12);
  // Spot value: P(B=0, E=0, A=0, R=0) = .02 * .01 * .95 * .9.
  CHECK(oracle.entries()[0] == doctest::Approx(0.000171).epsilon(1e-12));
}

TEST_CASE("undirected enumeration with explicit and default factors") {
  OrderedUGraph graph({"A", "B", "C", "D"}, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  std::vector<FiniteSet> sets;
  for (const char* n : {"A", "B", "C", "D"})
    sets.push_back(FiniteSet{n, {"x", "xbar"}});
  std::map<std::vector<std::size_t>, Tensor> factors;
  factors.emplace(std::vector<std::size_t>{0, 1},
                  Tensor({}, {sets[0], sets[1]}, {10, 1, 5, 30}));
  factors.emplace(std::vector<std::size_t>{1, 2},
                  Tensor({}, {sets[1], sets[2]}, {100, 1, 1, 100}));
  factors.emplace(std::vector<std::size_t>{2, 3},
                  Tensor({}, {sets[2], sets[3]}, {1, 100, 100, 1}));
  factors.emplace(std::vector<std::size_t>{0, 3},
                  Tensor({}, {sets[0], sets[3]}, {100, 1, 1, 100}));
  MarkovNetwork mn(graph, sets, factors);
  gmdiag_oracle::BruteMnResult res = gmdiag_oracle::brute_mn_joint(mn);
  REQUIRE_FALSE(res.degenerate());
  CHECK(res.Z == doctest::Approx(7201840.0).epsilon(1e-12));
  CHECK(res.unnormalized[0] == doctest::Approx(100000.0).epsilon(1e-12));
  double sum = 0.0;
  for (double v : res.dist->entries()) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a factorless network enumerates to the uniform distribution") {
  OrderedUGraph graph({"A", "B"}, {{0, 1}});
  std::vector<FiniteSet> sets{fs("A", 2), fs("B", 3)};
  MarkovNetwork mn(graph, sets, {});
  gmdiag_oracle::BruteMnResult res = gmdiag_oracle::brute_mn_joint(mn);
  REQUIRE_FALSE(res.degenerate());
  CHECK(res.Z == doctest::Approx(6.0).epsilon(1e-15));
  for (double v : res.dist->entries())
    CHECK(v == doctest::Approx(1.0 / 6).epsilon(1e-15));
}

TEST_CASE("an all-zero factor is reported as degenerate") {
  OrderedUGraph graph({"A", "B"}, {{0, 1}});
  std::vector<FiniteSet> sets{fs("A", 2), fs("B", 2)};
  std::map<std::vector<std::size_t>, Tensor> factors;
  factors.emplace(std::vector<std::size_t>{0, 1},
                  Tensor({}, {sets[0], sets[1]}, {0, 0, 0, 0}));
  gmdiag_oracle::BruteMnResult res =
      gmdiag_oracle::brute_mn_joint(MarkovNetwork(graph, sets, factors));
  CHECK(res.degenerate());
  CHECK(res.Z == 0.0);
  CHECK_FALSE(res.dist.has_value());
  CHECK(res.unnormalized == std::vector<double>(4, 0.0));
}

TEST_CASE("the state-space cap rejects oversized enumerations") {
  SUBCASE("a wide directed network overflows the default cap") {
    std::vector<std::string> labels;
    for (int i = 0; i < 21; ++i) labels.push_back("V" + std::to_string(i));
    OrderedDag dag(labels, {});
    std::vector<FiniteSet> sets;
    std::vector<StochasticKernel> kernels;
    for (int i = 0; i < 21; ++i) {
      sets.push_back(fs(labels[i], 2));
      kernels.emplace_back(Tensor({}, {sets.back()}, {0.5, 0.5}));
    }
    BayesianNetwork bn(dag, sets, kernels);
    CHECK_THROWS_WITH_AS(gmdiag_oracle::brute_bn_joint(bn),
                         "state space exceeds the oracle cap",
                         std::runtime_error);
    CHECK_NOTHROW(gmdiag_oracle::brute_bn_joint(bn, std::size_t{1} << 21));
  }
  SUBCASE("an explicit small cap applies to undirected networks") {
    OrderedUGraph graph({"A", "B"}, {{0, 1}});
    std::vector<FiniteSet> sets{fs("A", 2), fs("B", 2)};
    MarkovNetwork mn(graph, sets, {});
    CHECK_THROWS_WITH_AS(gmdiag_oracle::brute_mn_joint(mn, 3),
                         "state space exceeds the oracle cap",
                         std::runtime_error);
    CHECK_NOTHROW(gmdiag_oracle::brute_mn_joint(mn, 4));
  }
}

TEST_CASE("random cross-checks between enumeration and wiring") {
  gmdiag_testgen::Rng rng(606);
  for (int i = 0; i < 15; ++i) {
    BayesianNetwork bn = gmdiag_testgen::random_bn(rng);
    CAPTURE(i);
    CHECK(max_abs_diff(gmdiag_oracle::brute_bn_joint(bn), bn_joint(bn)) <=
          1e-12);
  }
  for (int i = 0; i < 15; ++i) {
    MarkovNetwork mn = gmdiag_testgen::random_mn(rng);
    gmdiag_oracle::BruteMnResult res = gmdiag_oracle::brute_mn_joint(mn);
    NormalizeResult lib = mn_joint(mn);
    CAPTURE(i);
    REQUIRE(res.degenerate() == lib.degenerate());
    if (!res.degenerate()) {
      CHECK(std::abs(res.Z - lib.Z) <= 1e-12 * std::max(1.0, lib.Z));
      CHECK(max_abs_diff(*res.dist, *lib.dist) <= 1e-12);
    }
  }
}

}  // TEST_SUITE("oracle")
