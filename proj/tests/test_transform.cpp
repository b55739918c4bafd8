#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "protoalg/model_io.hpp"
#include "protoalg/transform.hpp"
#include "support/fixtures.hpp"

using namespace protoalg;
using namespace protoalg::test;

TEST_CASE("sequentializing the countdown fixture") {
  ProtoAlgorithm a = f1();
  SequentializationResult res = sequentialize(a);

  SECTION("shape of the output") {
    CHECK(res.output.sequential);
    CHECK(res.output.alphabet.classical());
    CHECK(res.output.components[0].nondet_allowed);
    // n = 1: the product mirrors the source graph vertex-for-vertex
    CHECK(res.product_vertices == 4);
    CHECK(res.output.components[0].deterministic());
    CHECK_FALSE(res.output.nondet_components);
  }
  SECTION("indexed symbol copies") {
    std::set<std::string> names(res.output.alphabet.processing.begin(),
                                res.output.alphabet.processing.end());
    CHECK(names.count("ini"));
    CHECK(names.count("fin"));
    CHECK(names.count("dec@1"));
    CHECK(res.output.alphabet.predicate == std::vector<std::string>{"z@1"});
  }
  SECTION("certificate") {
    REQUIRE(res.certificate.verdict);
    REQUIRE(res.certificate.witness.has_value());
    CHECK(verify_simulation(*res.certificate.witness).empty());
    CHECK(verify_simulation(inverse_witness(*res.certificate.witness)).empty());
  }
}

TEST_CASE("sequentializing the handoff fixture") {
  ProtoAlgorithm a = f2();
  SequentializationResult res = sequentialize(a);
  const ProtoAlgorithm& out = res.output;

  SECTION("classifier expectations") {
    CHECK(out.sequential);
    CHECK(out.alphabet.classical());
    CHECK(out.nondet_components);  // scheduling fan-out makes functions branch
    CHECK_FALSE(out.classical);
  }
  SECTION("vertex bound: at most |V_1|*|V_2|*n product vertices") {
    CHECK(res.product_vertices <= 5 * 5 * 2);
    CHECK(res.product_vertices == static_cast<std::size_t>(out.components[0].vertex_count()));
  }
  SECTION("function product vertices fan out over the next-scheduled component") {
    const ComponentGraph& g = out.components[0];
    for (int v = 0; v < g.vertex_count(); ++v) {
      if (g.label_kind[v] == SymbolKind::Predicate) {
        CHECK(g.outdegree(v) == 2);
      } else if (g.label[v] == kFin) {
        CHECK(g.outdegree(v) == 0);
      } else {
        CHECK(g.outdegree(v) == 2);  // one out-edge in the source, n = 2
      }
    }
  }
  SECTION("certificate relation is a bijection on the mapped states") {
    REQUIRE(res.certificate.verdict);
    const auto& pairs = res.certificate.witness->pairs;
    std::set<int> lefts, rights;
    for (auto [x, y] : pairs) {
      CHECK(lefts.insert(x).second);   // functional
      CHECK(rights.insert(y).second);  // injective
    }
    CHECK(verify_simulation(*res.certificate.witness).empty());
    CHECK(verify_simulation(inverse_witness(*res.certificate.witness)).empty());
  }
  SECTION("identity translations") {
    for (ValueId d = 0; d < a.interp.input_domain.size(); ++d)
      CHECK(res.certificate.gamma_i[d] == d);
    for (ValueId d = 0; d < out.interp.output_domain.size(); ++d)
      CHECK(res.certificate.gamma_o[d] == d);
  }
  SECTION("the output revalidates from its serialized form at the lenient level") {
    std::string text = serialize_model(out);
    auto reloaded = load_model_text(text, LoadOptions{ValidationLevel::Lenient, std::nullopt});
    REQUIRE(reloaded.ok());
    CHECK(reloaded->component_count() == 1);
    CHECK(reloaded->alphabet.classical());
  }
}

TEST_CASE("theorem 3 check: certificate plus entrywise-equal computed functions") {
  SECTION("countdown") {
    Theorem3Report rep = check_theorem3(f1());
    CHECK(rep.holds);
    CHECK(rep.certificate_true);
    CHECK(rep.computed_functions_match);
  }
  SECTION("handoff: both sides undefined everywhere, matching partials") {
    ProtoAlgorithm a = f2();
    Theorem3Report rep = check_theorem3(a);
    CHECK(rep.holds);
    ComputedFunction fa = computed_function(a);
    ComputedFunction fb = computed_function(rep.result.output);
    for (std::size_t i = 0; i < fa.entries.size(); ++i) {
      CHECK_FALSE(fa.entries[i].defined);
      CHECK_FALSE(fb.entries[i].defined);
      CHECK(fa.entries[i].partial_outputs == fb.entries[i].partial_outputs);
    }
  }
  SECTION("random two- and three-component models") {
    for (std::uint64_t seed = 500; seed < 506; ++seed) {
      RandomModelParams p;
      p.classical = false;
      p.components = 2 + static_cast<int>(seed % 2);
      p.domain_size = 3;
      p.max_vertices = 4;
      ProtoAlgorithm a = random_model(seed, p);
      Theorem3Report rep = check_theorem3(a);
      CHECK(rep.holds);
    }
  }
}

TEST_CASE("run-length preservation carries over to the output") {
  ProtoAlgorithm a = f1();
  SequentializationResult res = sequentialize(a);
  REQUIRE(res.certificate.verdict);
  for (ValueId d = 0; d < a.interp.input_domain.size(); ++d) {
    auto runs = enumerate_runs(a, d, Variant::Algorithmic);
    for (const Run& r : runs) {
      Run lifted = lift_run(*res.certificate.witness, r, res.certificate.gamma_i);
      CHECK(lifted.states.size() == r.states.size());
      if (r.terminal == Run::Terminal::Final)
        CHECK(lifted.states.back().kind() == State::Kind::Final);
    }
  }
}

TEST_CASE("the product vertex map names every output vertex") {
  SequentializationResult res = sequentialize(f2());
  CHECK(res.vertex_map.size() == res.product_vertices);
  std::set<std::string> ids;
  for (const auto& [desc, id] : res.vertex_map) {
    CHECK(ids.insert(id).second);
    CHECK(res.output.components[0].index_of(id) >= 0);
  }
  // the root pairs all component roots with the main index
  CHECK(res.vertex_map.front().first == "(m0,wr)@1");
}
