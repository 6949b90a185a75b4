#include <doctest.h>

#include <gmdiag/diagram.hpp>
#include <gmdiag/graphs.hpp>
#include <gmdiag/semantics.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "random_gen.hpp"

using namespace gmdiag;

namespace {

OrderedDag bear_dag() {
  return OrderedDag({"B", "E", "A", "R"}, {{0, 2}, {1, 2}, {1, 3}});
}

OrderedUGraph triangle() {
  return OrderedUGraph({"A", "B", "C"}, {{0, 1}, {1, 2}, {0, 2}});
}

FiniteSet fs(const std::string& name, std::size_t card) {
  std::vector<std::string> elems;
  for (std::size_t i = 0; i < card; ++i) elems.push_back("e" + std::to_string(i));
  return FiniteSet{name, elems};
}

// A fully specified semantics for the four-vertex fan-in graph, with all
// variables binary and hand-picked kernel entries used in closed-form checks.
SemanticsAssignment bear_assignment() {
  SemanticsAssignment asg;
  asg.require_stochastic = true;
  for (std::size_t v = 0; v < 4; ++v)
    asg.objects.emplace(v, fs(std::string(1, "BEAR"[v]), 2));
  const FiniteSet B = asg.objects.at(0), E = asg.objects.at(1),
                  A = asg.objects.at(2), R = asg.objects.at(3);
  asg.generators.emplace("f[B]", Tensor({}, {B}, {0.3, 0.7}));
  asg.generators.emplace("f[E]", Tensor({}, {E}, {0.6, 0.4}));
  asg.generators.emplace(
      "f[A]", Tensor({B, E}, {A}, {0.9, 0.8, 0.25, 0.1, 0.1, 0.2, 0.75, 0.9}));
  asg.generators.emplace("f[R]", Tensor({E}, {R}, {0.7, 0.2, 0.3, 0.8}));
  return asg;
}

double bear_kernel(const SemanticsAssignment& asg, const std::string& name,
                   std::size_t out, std::vector<std::size_t> in) {
  const Tensor& t = asg.generators.at(name);
  return t.at({out}, in);
}

}  // namespace

TEST_SUITE("diagram") {

TEST_CASE("a directed graph induces one kernel generator per vertex") {
  auto sig = std::make_shared<const Signature>(Signature::from_dag(bear_dag()));
  CHECK(sig->flavor() == Flavor::CD);
  REQUIRE(sig->objects().size() == 4);
  CHECK(sig->objects()[2].label == "A");
  REQUIRE(sig->generators().size() == 4);
  CHECK(sig->generators()[0].name == "f[B]");
  CHECK(sig->generators()[1].name == "f[E]");
  CHECK(sig->generators()[2].name == "f[A]");
  CHECK(sig->generators()[3].name == "f[R]");
  // Each generator is typed parents -> vertex.
  CHECK(sig->generator("f[B]").inputs.empty());
  CHECK(sig->generator("f[B]").outputs == std::vector<std::size_t>{0});
  CHECK(sig->generator("f[A]").inputs == std::vector<std::size_t>{0, 1});
  CHECK(sig->generator("f[A]").outputs == std::vector<std::size_t>{2});
  CHECK(sig->generator("f[R]").inputs == std::vector<std::size_t>{1});
  CHECK(sig->has_generator("f[A]"));
  CHECK_FALSE(sig->has_generator("f[Z]"));
  CHECK(sig->generator_index("f[E]") == 1);
  CHECK_THROWS_AS((void)sig->generator("f[Z]"), std::invalid_argument);
}

TEST_CASE("an undirected graph induces one factor generator per clique") {
  auto sig =
      std::make_shared<const Signature>(Signature::from_ugraph(triangle()));
  CHECK(sig->flavor() == Flavor::Hypergraph);
  REQUIRE(sig->generators().size() == 7);
  std::vector<std::string> names;
  for (const Generator& g : sig->generators()) names.push_back(g.name);
  CHECK(names == std::vector<std::string>{"phi[A]", "phi[A,B]", "phi[A,B,C]",
                                          "phi[A,C]", "phi[B]", "phi[B,C]",
                                          "phi[C]"});
  for (const Generator& g : sig->generators()) CHECK(g.inputs.empty());
  CHECK(sig->generator("phi[A,B,C]").outputs ==
        std::vector<std::size_t>{0, 1, 2});
  CHECK(sig->generator("phi[B]").outputs == std::vector<std::size_t>{1});
}

TEST_CASE("flavor retagging preserves everything else") {
  Signature strict = Signature::from_dag(bear_dag());
  Signature loose = strict.with_flavor(Flavor::Hypergraph);
  CHECK(loose.flavor() == Flavor::Hypergraph);
  CHECK(loose.objects() == strict.objects());
  CHECK(loose.generators() == strict.generators());
  CHECK_FALSE(strict == loose);
  CHECK(strict == strict.with_flavor(Flavor::CD));
}

TEST_CASE("single and identity diagrams have canonical shape") {
  auto sig = std::make_shared<const Signature>(Signature::from_dag(bear_dag()));
  Diagram d = Diagram::single(sig, "f[A]");
  CHECK(d.wires().size() == 3);
  CHECK(d.input_boundary() == std::vector<std::size_t>{0, 1});
  CHECK(d.output_boundary() == std::vector<std::size_t>{2});
  CHECK(d.input_objects() == std::vector<std::size_t>{0, 1});
  CHECK(d.output_objects() == std::vector<std::size_t>{2});
  CHECK(dump(d) ==
        "flavor: strict\n"
        "wires: 0:B 1:E 2:A\n"
        "occ: f[A] (0 1 -> 2)\n"
        "in: 0 1\n"
        "out: 2\n");

  Diagram id = Diagram::identity(sig, {1, 2});
  CHECK(id.occurrences().empty());
  CHECK(id.input_boundary() == id.output_boundary());
  CHECK(id.input_objects() == std::vector<std::size_t>{1, 2});

  Diagram empty = Diagram::identity(sig, {});
  CHECK(empty.wires().empty());
}

TEST_CASE("strict wiring validation") {
  auto sig = std::make_shared<const Signature>(Signature::from_dag(bear_dag()));

  SUBCASE("two producers for one wire") {
    std::vector<Wire> wires{{0, 0}};
    std::vector<Occurrence> occs{{"f[B]", {}, {0}}, {"f[B]", {}, {0}}};
    CHECK_THROWS_WITH_AS(Diagram(sig, wires, occs, {}, {0}),
                         "strict flavor requires exactly one producer per wire",
                         std::invalid_argument);
  }
  SUBCASE("a wire with no producer") {
    std::vector<Wire> wires{{0, 0}, {1, 1}};
    std::vector<Occurrence> occs{{"f[B]", {}, {0}}};
    CHECK_THROWS_WITH_AS(Diagram(sig, wires, occs, {}, {0, 1}),
                         "strict flavor requires exactly one producer per wire",
                         std::invalid_argument);
  }
  SUBCASE("cyclic wiring") {
    auto loop_sig = std::make_shared<const Signature>(
        Signature(Flavor::CD, {Vertex{0, "X"}},
                  {Generator{"g", {0}, {0}}}));
    std::vector<Wire> wires{{0, 0}};
    std::vector<Occurrence> occs{{"g", {0}, {0}}};
    CHECK_THROWS_WITH_AS(Diagram(loop_sig, wires, occs, {}, {}),
                         "strict flavor requires acyclic wiring",
                         std::invalid_argument);
  }
  SUBCASE("the same wirings are legal under the loose flavor") {
    auto loose = std::make_shared<const Signature>(
        sig->with_flavor(Flavor::Hypergraph));
    std::vector<Wire> wires{{0, 0}};
    std::vector<Occurrence> occs{{"f[B]", {}, {0}}, {"f[B]", {}, {0}}};
    CHECK_NOTHROW(Diagram(loose, wires, occs, {}, {0}));
    CHECK_NOTHROW(Diagram(loose, {{0, 0}, {1, 1}}, {{"f[B]", {}, {0}}}, {},
                          {0, 1}));
  }
}

TEST_CASE("occurrence and boundary validation") {
  auto sig = std::make_shared<const Signature>(Signature::from_dag(bear_dag()));
  std::vector<Wire> bea{{0, 0}, {1, 1}, {2, 2}};

  CHECK_THROWS_WITH_AS(
      Diagram(sig, bea, {{"f[A]", {0}, {2}}}, {0, 1}, {2}),
      "occurrence arity mismatch: f[A]", std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      Diagram(sig, {{0, 0}, {1, 0}, {2, 2}}, {{"f[A]", {0, 1}, {2}}}, {0, 1},
              {2}),
      "occurrence input type mismatch: f[A]", std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      Diagram(sig, {{0, 0}, {1, 1}, {2, 3}}, {{"f[A]", {0, 1}, {2}}}, {0, 1},
              {2}),
      "occurrence output type mismatch: f[A]", std::invalid_argument);
  CHECK_THROWS_AS(Diagram(sig, bea, {{"f[Z]", {0, 1}, {2}}}, {0, 1}, {2}),
                  std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      Diagram(sig, bea, {{"f[A]", {0, 1}, {2}}}, {0, 1}, {5}),
      "wire id out of range", std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      Diagram(sig, {{0, 0}, {2, 1}}, {}, {0}, {0}),
      "wire ids must be dense and ordered", std::invalid_argument);
}

TEST_CASE("evaluation of identity and single-box diagrams") {
  auto sig = std::make_shared<const Signature>(Signature::from_dag(bear_dag()));
  SemanticsAssignment asg = bear_assignment();

  Tensor id = evaluate(Diagram::identity(sig, {2}), asg);
  CHECK(id.domain().size() == 1);
  CHECK(id.codomain().size() == 1);
  CHECK(id.entries() == std::vector<double>{1.0, 0.0, 0.0, 1.0});

  Tensor fa = evaluate(Diagram::single(sig, "f[A]"), asg);
  CHECK(fa.entries() == asg.generators.at("f[A]").entries());
  CHECK(fa.domain() == asg.generators.at("f[A]").domain());
  CHECK(fa.codomain() == asg.generators.at("f[A]").codomain());

  Tensor scalar = evaluate(Diagram::identity(sig, {}), asg);
  CHECK(scalar.entries() == std::vector<double>{1.0});
}

TEST_CASE("evaluation checks assignment coverage against the signature") {
  auto sig = std::make_shared<const Signature>(Signature::from_dag(bear_dag()));
  Diagram d = Diagram::single(sig, "f[B]");

  SemanticsAssignment missing_set = bear_assignment();
  missing_set.objects.erase(3);
  CHECK_THROWS_WITH_AS(evaluate(d, missing_set),
                       "missing finite set for object: R", std::runtime_error);

  SemanticsAssignment missing_gen = bear_assignment();
  missing_gen.generators.erase("f[R]");
  CHECK_THROWS_WITH_AS(evaluate(d, missing_gen),
                       "missing tensor for generator: f[R]",
                       std::runtime_error);

  SemanticsAssignment bad_shape = bear_assignment();
  bad_shape.generators.erase("f[R]");
  bad_shape.generators.emplace(
      "f[R]", Tensor({}, {bad_shape.objects.at(3)}, {0.5, 0.5}));
  CHECK_THROWS_WITH_AS(evaluate(d, bad_shape),
                       "tensor shape mismatch for generator: f[R]",
                       std::runtime_error);

  SemanticsAssignment not_stoch = bear_assignment();
  not_stoch.generators.erase("f[B]");
  not_stoch.generators.emplace("f[B]",
                               Tensor({}, {not_stoch.objects.at(0)}, {2, 3}));
  CHECK_THROWS_WITH_AS(evaluate(d, not_stoch),
                       "non-stochastic tensor for generator: f[B]",
                       std::invalid_argument);
  not_stoch.require_stochastic = false;
  Tensor t = evaluate(d, not_stoch);
  CHECK(t.entries() == std::vector<double>{2.0, 3.0});
}

TEST_CASE("shared wires copy, dropped wires sum out") {
  // s : I -> X, f : X -> Y, g : X -> Z over a three-object strict signature.
  auto sig = std::make_shared<const Signature>(Signature(
      Flavor::CD, {Vertex{0, "X"}, Vertex{1, "Y"}, Vertex{2, "Z"}},
      {Generator{"s", {}, {0}}, Generator{"f", {0}, {1}},
       Generator{"g", {0}, {2}}}));
  SemanticsAssignment asg;
  asg.require_stochastic = false;
  asg.objects.emplace(0, fs("X", 3));
  asg.objects.emplace(1, fs("Y", 2));
  asg.objects.emplace(2, fs("Z", 2));
  std::vector<double> sv{0.2, 0.3, 0.5};
  std::vector<double> fv{0.9, 0.5, 0.25, 0.1, 0.5, 0.75};   // f(y|x)
  std::vector<double> gv{0.6, 0.3, 0.5, 0.4, 0.7, 0.5};     // g(z|x)
  asg.generators.emplace("s", Tensor({}, {asg.objects.at(0)}, sv));
  asg.generators.emplace(
      "f", Tensor({asg.objects.at(0)}, {asg.objects.at(1)}, fv));
  asg.generators.emplace(
      "g", Tensor({asg.objects.at(0)}, {asg.objects.at(2)}, gv));

  SUBCASE("one source feeding two consumers multiplies along the shared wire") {
    Diagram d(sig, {{0, 0}, {1, 1}, {2, 2}},
              {{"s", {}, {0}}, {"f", {0}, {1}}, {"g", {0}, {2}}}, {}, {1, 2});
    Tensor t = evaluate(d, asg);
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t z = 0; z < 2; ++z) {
        double want = 0.0;
        for (std::size_t x = 0; x < 3; ++x)
          want += sv[x] * fv[y * 3 + x] * gv[z * 3 + x];
        CHECK(t.at({y, z}, {}) == doctest::Approx(want).epsilon(1e-12));
      }
  }
  SUBCASE("a wire absent from the boundary is marginalized") {
    Diagram d(sig, {{0, 0}, {1, 1}},
              {{"s", {}, {0}}, {"f", {0}, {1}}}, {}, {1});
    Tensor t = evaluate(d, asg);
    for (std::size_t y = 0; y < 2; ++y) {
      double want = 0.0;
      for (std::size_t x = 0; x < 3; ++x) want += sv[x] * fv[y * 3 + x];
      CHECK(t.at({y}, {}) == doctest::Approx(want).epsilon(1e-12));
    }
  }
  SUBCASE("a fully discarded diagram evaluates to the total mass") {
    Diagram d(sig, {{0, 0}}, {{"s", {}, {0}}}, {}, {});
    Tensor t = evaluate(d, asg);
    REQUIRE(t.entries().size() == 1);
    CHECK(t.entries()[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("loose wiring multiplies producers and exposes bare wires") {
  auto sig = std::make_shared<const Signature>(Signature(
      Flavor::Hypergraph, {Vertex{0, "X"}},
      {Generator{"a", {}, {0}}, Generator{"b", {}, {0}}}));
  SemanticsAssignment asg;
  asg.require_stochastic = false;
  asg.objects.emplace(0, fs("X", 2));
  asg.generators.emplace("a", Tensor({}, {asg.objects.at(0)}, {2.0, 3.0}));
  asg.generators.emplace("b", Tensor({}, {asg.objects.at(0)}, {5.0, 7.0}));

  SUBCASE("two producers on one wire multiply pointwise") {
    Diagram d(sig, {{0, 0}}, {{"a", {}, {0}}, {"b", {}, {0}}}, {}, {0});
    CHECK(evaluate(d, asg).entries() == std::vector<double>{10.0, 21.0});
  }
  SUBCASE("a bare boundary wire broadcasts ones") {
    Diagram d(sig, {{0, 0}}, {}, {}, {0});
    CHECK(evaluate(d, asg).entries() == std::vector<double>{1.0, 1.0});
  }
  SUBCASE("a bare closed wire contributes its cardinality") {
    Diagram d(sig, {{0, 0}}, {}, {}, {});
    CHECK(evaluate(d, asg).entries() == std::vector<double>{2.0});
  }
  SUBCASE("one wire exposed twice pins equal boundary values") {
    Diagram d(sig, {{0, 0}}, {}, {}, {0, 0});
    Tensor t = evaluate(d, asg);
    CHECK(t.at({0, 0}, {}) == 1.0);
    CHECK(t.at({0, 1}, {}) == 0.0);
    CHECK(t.at({1, 0}, {}) == 0.0);
    CHECK(t.at({1, 1}, {}) == 1.0);
  }
  SUBCASE("a produced wire exposed twice multiplies onto the diagonal") {
    Diagram d(sig, {{0, 0}}, {{"a", {}, {0}}}, {}, {0, 0});
    Tensor t = evaluate(d, asg);
    CHECK(t.at({0, 0}, {}) == 2.0);
    CHECK(t.at({0, 1}, {}) == 0.0);
    CHECK(t.at({1, 1}, {}) == 3.0);
  }
}

TEST_CASE("copy composition wires kernels along the graph") {
  auto sig = std::make_shared<const Signature>(Signature::from_dag(bear_dag()));
  SemanticsAssignment asg = bear_assignment();

  SUBCASE("all kernels yield the full joint state") {
    Diagram d = copy_composition(
        sig, {"f[B]", "f[E]", "f[A]", "f[R]"});
    CHECK(d.input_boundary().empty());
    CHECK(d.output_objects() == std::vector<std::size_t>{0, 1, 2, 3});
    Tensor t = evaluate(d, asg);
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t e = 0; e < 2; ++e)
        for (std::size_t a = 0; a < 2; ++a)
          for (std::size_t r = 0; r < 2; ++r) {
            double want = bear_kernel(asg, "f[B]", b, {}) *
                          bear_kernel(asg, "f[E]", e, {}) *
                          bear_kernel(asg, "f[A]", a, {b, e}) *
                          bear_kernel(asg, "f[R]", r, {e});
            CHECK(t.at({b, e, a, r}, {}) ==
                  doctest::Approx(want).epsilon(1e-12));
          }
  }
  SUBCASE("a singleton composition is the generator itself") {
    Diagram d = copy_composition(sig, {"f[A]"});
    CHECK(d.input_objects() == std::vector<std::size_t>{0, 1});
    CHECK(d.output_objects() == std::vector<std::size_t>{2});
    CHECK(evaluate(d, asg).entries() == asg.generators.at("f[A]").entries());
  }
  SUBCASE("unproduced parents become inputs") {
    Diagram d = copy_composition(sig, {"f[A]", "f[B]"});
    CHECK(d.input_objects() == std::vector<std::size_t>{1});
    CHECK(d.output_objects() == std::vector<std::size_t>{0, 2});
    Tensor t = evaluate(d, asg);
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t e = 0; e < 2; ++e) {
          double want = bear_kernel(asg, "f[B]", b, {}) *
                        bear_kernel(asg, "f[A]", a, {b, e});
          CHECK(t.at({b, a}, {e}) == doctest::Approx(want).epsilon(1e-12));
        }
  }
  SUBCASE("the empty composition is the monoidal unit") {
    Diagram d = copy_composition(sig, {});
    CHECK(d.wires().empty());
    CHECK(evaluate(d, asg).entries() == std::vector<double>{1.0});
  }
  SUBCASE("name order does not matter") {
    Diagram a = copy_composition(sig, {"f[R]", "f[B]"});
    Diagram b = copy_composition(sig, {"f[B]", "f[R]"});
    CHECK(dump(a) == dump(b));
  }
  SUBCASE("duplicates and unknown names are rejected") {
    CHECK_THROWS_AS(copy_composition(sig, {"f[B]", "f[B]"}),
                    std::invalid_argument);
    CHECK_THROWS_AS(copy_composition(sig, {"f[Z]"}), std::invalid_argument);
  }
  SUBCASE("the loose flavor composes the same wiring") {
    auto loose = std::make_shared<const Signature>(
        sig->with_flavor(Flavor::Hypergraph));
    Diagram strict_d = copy_composition(sig, {"f[B]", "f[E]", "f[A]"});
    Diagram loose_d = copy_composition(loose, {"f[B]", "f[E]", "f[A]"});
    Tensor ts = evaluate(strict_d, asg);
    Tensor tl = evaluate(loose_d, asg);
    CHECK(max_abs_diff(ts, tl) == 0.0);
  }
}

TEST_CASE("compare composition multiplies factors over shared variables") {
  auto sig =
      std::make_shared<const Signature>(Signature::from_ugraph(
          OrderedUGraph({"A", "B", "C", "D"},
                        {{0, 1}, {1, 2}, {2, 3}, {0, 3}})));
  SemanticsAssignment asg;
  asg.require_stochastic = false;
  for (std::size_t v = 0; v < 4; ++v)
    asg.objects.emplace(v, fs(std::string(1, "ABCD"[v]), 2));
  for (const Generator& g : sig->generators()) {
    std::vector<FiniteSet> cod;
    std::size_t card = 1;
    for (std::size_t o : g.outputs) {
      cod.push_back(asg.objects.at(o));
      card *= 2;
    }
    std::vector<double> entries(card);
    for (std::size_t i = 0; i < card; ++i)
      entries[i] = 1.0 + double(i) + 0.25 * double(g.name.size());
    asg.generators.emplace(g.name, Tensor({}, cod, entries));
  }

  SUBCASE("two overlapping factors") {
    Diagram d = compare_composition(
        sig, std::vector<std::string>{"phi[A,B]", "phi[B,C]"});
    CHECK(d.input_boundary().empty());
    CHECK(d.output_objects() == std::vector<std::size_t>{0, 1, 2});
    Tensor t = evaluate(d, asg);
    const Tensor& ab = asg.generators.at("phi[A,B]");
    const Tensor& bc = asg.generators.at("phi[B,C]");
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t c = 0; c < 2; ++c)
          CHECK(t.at({a, b, c}, {}) ==
                doctest::Approx(ab.at({a, b}, {}) * bc.at({b, c}, {}))
                    .epsilon(1e-12));
  }
  SUBCASE("factor order does not matter") {
    Diagram x = compare_composition(
        sig, std::vector<std::string>{"phi[B,C]", "phi[A,B]", "phi[D]"});
    Diagram y = compare_composition(
        sig, std::vector<std::string>{"phi[D]", "phi[A,B]", "phi[B,C]"});
    CHECK(dump(x) == dump(y));
  }
  SUBCASE("rejects the strict flavor and non-factor generators") {
    auto strict = std::make_shared<const Signature>(
        Signature::from_dag(bear_dag()));
    CHECK_THROWS_AS(
        compare_composition(strict, std::vector<std::string>{"f[B]"}),
        std::invalid_argument);
    auto loose_dag = std::make_shared<const Signature>(
        Signature::from_dag(bear_dag()).with_flavor(Flavor::Hypergraph));
    CHECK_THROWS_AS(
        compare_composition(loose_dag, std::vector<std::string>{"f[A]"}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        compare_composition(
            sig, std::vector<std::string>{"phi[A]", "phi[A]"}),
        std::invalid_argument);
  }
  SUBCASE("the empty composition evaluates to the unit scalar") {
    Diagram d = compare_composition(sig, std::vector<std::string>{});
    CHECK(evaluate(d, asg).entries() == std::vector<double>{1.0});
  }
}

TEST_CASE("graph_of bends inputs onto the output side") {
  auto loose = std::make_shared<const Signature>(
      Signature::from_dag(bear_dag()).with_flavor(Flavor::Hypergraph));
  SemanticsAssignment asg = bear_assignment();

  Diagram g = graph_of(Diagram::single(loose, "f[A]"));
  CHECK(g.input_boundary().empty());
  CHECK(g.output_objects() == std::vector<std::size_t>{0, 1, 2});
  Tensor t = evaluate(g, asg);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t e = 0; e < 2; ++e)
      for (std::size_t a = 0; a < 2; ++a)
        CHECK(t.at({b, e, a}, {}) ==
              doctest::Approx(bear_kernel(asg, "f[A]", a, {b, e}))
                  .epsilon(1e-12));

  SUBCASE("the graph of an identity wire is the equality relation") {
    Diagram cup = graph_of(Diagram::identity(loose, {2}));
    Tensor u = evaluate(cup, asg);
    CHECK(u.at({0, 0}, {}) == 1.0);
    CHECK(u.at({0, 1}, {}) == 0.0);
    CHECK(u.at({1, 0}, {}) == 0.0);
    CHECK(u.at({1, 1}, {}) == 1.0);
  }
  SUBCASE("the strict flavor has no graphs") {
    auto strict =
        std::make_shared<const Signature>(Signature::from_dag(bear_dag()));
    CHECK_THROWS_AS(graph_of(Diagram::single(strict, "f[A]")),
                    std::invalid_argument);
  }
}

TEST_CASE("graphs turn sequential wiring into factor products") {
  // For any subset S of kernels, the graph of their wired composite equals
  // the compare-composition of their individual graphs.
  gmdiag_testgen::Rng rng(424242);
  for (int iter = 0; iter < 50; ++iter) {
    OrderedDag g = gmdiag_testgen::random_dag(rng, 1 + gmdiag_testgen::pick(rng, 5));
    auto sig = std::make_shared<const Signature>(
        Signature::from_dag(g).with_flavor(Flavor::Hypergraph));
    std::vector<std::string> subset;
    for (const Generator& gen : sig->generators())
      if (gmdiag_testgen::pick(rng, 4) != 0) subset.push_back(gen.name);

    Diagram lhs = graph_of(copy_composition(sig, subset));
    std::vector<Diagram> graphs;
    for (const std::string& name : subset)
      graphs.push_back(graph_of(Diagram::single(sig, name)));
    Diagram rhs = compare_composition(sig, graphs);
    CAPTURE(iter);
    CHECK(diagrams_equal(lhs, rhs, 0x5eed + iter));
  }
}

TEST_CASE("generator maps from directed graph homs") {
  SUBCASE("the identity hom maps every kernel to itself") {
    OrderedDag g = bear_dag();
    GeneratorMap m = cdsyn_hom(DagHom::identity(g));
    auto sig = std::make_shared<const Signature>(Signature::from_dag(g));
    for (const Generator& gen : sig->generators()) {
      CHECK(diagrams_equal(m.images.at(gen.name),
                           Diagram::single(sig, gen.name)));
    }
  }
  SUBCASE("collapsing a chain composes its kernels") {
    OrderedDag chain({"A", "B"}, {{0, 1}});
    OrderedDag point({"X"}, {});
    GeneratorMap m = cdsyn_hom(DagHom(chain, point, {0, 0}));
    // Contravariant: the map sends the point's kernel into the chain theory.
    CHECK(m.images.size() == 1);
    const Diagram& img = m.images.at("f[X]");
    CHECK(img.input_boundary().empty());
    CHECK(img.output_objects() == std::vector<std::size_t>{0, 1});

    auto chain_sig =
        std::make_shared<const Signature>(Signature::from_dag(chain));
    CHECK(diagrams_equal(img, copy_composition(chain_sig, {"f[A]", "f[B]"})));
  }
  SUBCASE("expanded parents missing from a fiber are discarded") {
    // source A -> B, A -> C;   target X -> Y;   A,B |-> X, C |-> Y.
    OrderedDag src({"A", "B", "C"}, {{0, 1}, {0, 2}});
    OrderedDag tgt({"X", "Y"}, {{0, 1}});
    GeneratorMap m = cdsyn_hom(DagHom(src, tgt, {0, 0, 1}));
    const Diagram& img = m.images.at("f[Y]");
    // f[Y] is typed X -> Y; X expands to [A, B], Y to [C]. The fiber kernel
    // f[C] only reads A, so the B input must be dropped inside the image.
    CHECK(img.input_objects() == std::vector<std::size_t>{0, 1});
    CHECK(img.output_objects() == std::vector<std::size_t>{2});

    SemanticsAssignment asg;
    asg.require_stochastic = true;
    asg.objects.emplace(0, fs("A", 2));
    asg.objects.emplace(1, fs("B", 3));
    asg.objects.emplace(2, fs("C", 2));
    asg.generators.emplace("f[A]", Tensor({}, {asg.objects.at(0)}, {0.4, 0.6}));
    asg.generators.emplace(
        "f[B]", Tensor({asg.objects.at(0)}, {asg.objects.at(1)},
                       {0.2, 0.5, 0.3, 0.25, 0.5, 0.25}));
    asg.generators.emplace(
        "f[C]", Tensor({asg.objects.at(0)}, {asg.objects.at(2)},
                       {0.9, 0.3, 0.1, 0.7}));
    Tensor t = evaluate(img, asg);
    const Tensor& fc = asg.generators.at("f[C]");
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 3; ++b)
        for (std::size_t c = 0; c < 2; ++c)
          CHECK(t.at({c}, {a, b}) ==
                doctest::Approx(fc.at({c}, {a})).epsilon(1e-12));
  }
}

TEST_CASE("generator maps from undirected graph homs") {
  SUBCASE("the identity hom maps every factor to itself") {
    OrderedUGraph h = triangle();
    GeneratorMap m = syn_hom(UGraphHom::identity(h));
    auto sig = std::make_shared<const Signature>(Signature::from_ugraph(h));
    for (const Generator& gen : sig->generators())
      CHECK(diagrams_equal(m.images.at(gen.name),
                           Diagram::single(sig, gen.name)));
  }
  SUBCASE("collapsing an edge multiplies every factor above it") {
    OrderedUGraph k2({"A", "B"}, {{0, 1}});
    OrderedUGraph point({"X"}, {});
    GeneratorMap m = syn_hom(UGraphHom(k2, point, {0, 0}));
    const Diagram& img = m.images.at("phi[X]");
    CHECK(img.output_objects() == std::vector<std::size_t>{0, 1});

    SemanticsAssignment asg;
    asg.require_stochastic = false;
    asg.objects.emplace(0, fs("A", 2));
    asg.objects.emplace(1, fs("B", 2));
    asg.generators.emplace("phi[A]",
                           Tensor({}, {asg.objects.at(0)}, {2.0, 3.0}));
    asg.generators.emplace("phi[B]",
                           Tensor({}, {asg.objects.at(1)}, {5.0, 7.0}));
    asg.generators.emplace(
        "phi[A,B]", Tensor({}, {asg.objects.at(0), asg.objects.at(1)},
                           {1.0, 2.0, 4.0, 8.0}));
    Tensor t = evaluate(img, asg);
    const Tensor& ab = asg.generators.at("phi[A,B]");
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b) {
        double want = (a == 0 ? 2.0 : 3.0) * (b == 0 ? 5.0 : 7.0) *
                      ab.at({a, b}, {});
        CHECK(t.at({a, b}, {}) == doctest::Approx(want).epsilon(1e-12));
      }
  }
  SUBCASE("a clique with an empty fiber maps to the all-ones state") {
    // source: two isolated vertices; target: one edge. No source clique
    // covers the target edge, so its factor image carries no boxes at all.
    OrderedUGraph src({"A", "B"}, {});
    OrderedUGraph tgt({"X", "Y"}, {{0, 1}});
    GeneratorMap m = syn_hom(UGraphHom(src, tgt, {0, 1}));
    const Diagram& img = m.images.at("phi[X,Y]");
    CHECK(img.occurrences().empty());
    CHECK(img.output_objects() == std::vector<std::size_t>{0, 1});

    SemanticsAssignment asg;
    asg.require_stochastic = false;
    asg.objects.emplace(0, fs("A", 2));
    asg.objects.emplace(1, fs("B", 3));
    asg.generators.emplace("phi[A]",
                           Tensor({}, {asg.objects.at(0)}, {2.0, 3.0}));
    asg.generators.emplace("phi[B]",
                           Tensor({}, {asg.objects.at(1)}, {1.0, 2.0, 3.0}));
    Tensor t = evaluate(img, asg);
    CHECK(t.entries() == std::vector<double>(6, 1.0));
  }
}

TEST_CASE("substitution along generator maps") {
  OrderedDag g = bear_dag();
  auto sig = std::make_shared<const Signature>(Signature::from_dag(g));

  SUBCASE("the identity map leaves evaluation unchanged") {
    GeneratorMap id = GeneratorMap::identity(sig);
    Diagram d = copy_composition(sig, {"f[B]", "f[E]", "f[A]", "f[R]"});
    CHECK(diagrams_equal(substitute(d, id), d));
  }
  SUBCASE("a map whose source mismatches the diagram is rejected") {
    OrderedDag chain({"A", "B"}, {{0, 1}});
    auto other = std::make_shared<const Signature>(Signature::from_dag(chain));
    GeneratorMap id = GeneratorMap::identity(other);
    Diagram d = Diagram::single(sig, "f[B]");
    CHECK_THROWS_WITH_AS(substitute(d, id),
                         "generator map does not match the diagram's signature",
                         std::runtime_error);
  }
  SUBCASE("substitution respects hom composition on random diagrams") {
    gmdiag_testgen::Rng rng(777);
    int done = 0;
    while (done < 25) {
      auto pair = gmdiag_testgen::random_dag_hom_pair(rng, 4);
      GeneratorMap m_first = cdsyn_hom(pair.first);
      GeneratorMap m_second = cdsyn_hom(pair.second);
      GeneratorMap m_comp = cdsyn_hom(hom_compose(pair.first, pair.second));
      auto top = std::make_shared<const Signature>(
          Signature::from_dag(pair.second.target()));
      for (const Generator& gen : top->generators()) {
        Diagram lhs = m_comp.images.at(gen.name);
        Diagram rhs = substitute(m_second.images.at(gen.name), m_first);
        CAPTURE(done);
        CAPTURE(gen.name);
        CHECK(diagrams_equal(lhs, rhs, 0xabc + done));
      }
      ++done;
    }
  }
}

TEST_CASE("randomized diagram equality is deterministic and type-aware") {
  auto sig = std::make_shared<const Signature>(Signature::from_dag(bear_dag()));
  Diagram b = Diagram::single(sig, "f[B]");
  Diagram e = Diagram::single(sig, "f[E]");
  CHECK(diagrams_equal(b, b));
  CHECK_FALSE(diagrams_equal(b, e));  // boundary types differ

  SemanticsAssignment a1 = random_assignment(*sig, 99);
  SemanticsAssignment a2 = random_assignment(*sig, 99);
  REQUIRE(a1.objects.size() == a2.objects.size());
  for (const auto& [o, set] : a1.objects) {
    CHECK(set.size() == a2.objects.at(o).size());
    CHECK(set.size() >= 2);
    CHECK(set.size() <= 3);
  }
  for (const auto& [name, t] : a1.generators) {
    CHECK(t.entries() == a2.generators.at(name).entries());
    for (double v : t.entries()) {
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
    }
  }
}

}  // TEST_SUITE("diagram")
