#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "pathgat/graph.hpp"

using namespace pathgat;

TEST_CASE("canonical pathway wiring") {
  PathwayConfig cfg = PathwayConfig::canonical_p53();
  PathwayGraph g = cfg.build();

  CHECK(g.num_genes() == 3);
  CHECK(g.num_relations() == 3);
  CHECK(g.genes() == std::vector<std::string>{"TP53", "MDM2", "MDM4"});

  const std::size_t act = g.relation_index("activatory");
  const std::size_t inh = g.relation_index("inhibitory");
  const std::size_t self = g.relation_index("self");
  const std::size_t tp53 = g.gene_index("TP53");
  const std::size_t mdm2 = g.gene_index("MDM2");
  const std::size_t mdm4 = g.gene_index("MDM4");

  // edge(relation, target, source)
  CHECK(g.edge(act, mdm2, tp53) == 1);
  CHECK(g.edge(act, mdm4, tp53) == 1);
  CHECK(g.edge(inh, tp53, mdm2) == 1);
  CHECK(g.edge(inh, tp53, mdm4) == 1);
  CHECK(g.edge(inh, mdm4, mdm2) == 1);
  // nothing activates TP53, MDM4 inhibits nobody but TP53
  CHECK(g.edge(act, tp53, mdm2) == 0);
  CHECK(g.edge(inh, mdm2, mdm4) == 0);

  // "self" relation is the identity
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(g.edge(self, i, j) == (i == j ? 1 : 0));

  // 5 directed edges across activatory+inhibitory
  int count = 0;
  for (std::size_t r : {act, inh})
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) count += g.edge(r, i, j);
  CHECK(count == 5);

  CHECK(g.neighbors(inh, tp53) == std::set<std::size_t>{mdm2, mdm4});
  CHECK(g.neighbors(act, tp53).empty());
}

TEST_CASE("unknown names raise data errors") {
  PathwayGraph g = PathwayConfig::canonical_p53().build();
  CHECK_THROWS_AS(g.gene_index("TP63"), DataError);
  CHECK_THROWS_AS(g.relation_index("phosphorylates"), DataError);
  CHECK_THROWS_AS((void)PathwayGraph({"A", "A"}, {"all"}), DataError);
  CHECK_THROWS_AS(PathwayGraph::fully_connected({}, true), DataError);
}

TEST_CASE("fully connected graph with and without self loops") {
  PathwayGraph with = PathwayGraph::fully_connected({"A", "B", "C"}, true);
  CHECK(with.num_relations() == 1);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(with.edge(0, i, j) == 1);

  PathwayGraph without = PathwayGraph::fully_connected({"A", "B", "C"}, false);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(without.edge(0, i, j) == (i == j ? 0 : 1));
}

TEST_CASE("interventions edit a copy, not the original") {
  PathwayGraph g = PathwayConfig::canonical_p53().build();
  const std::size_t inh = g.relation_index("inhibitory");
  const std::size_t tp53 = g.gene_index("TP53");
  const std::size_t mdm2 = g.gene_index("MDM2");

  Intervention nutlin{"inhibitory", "MDM2", "TP53", Intervention::Action::kRemove};
  PathwayGraph cut = g.with_intervention(nutlin);
  CHECK(cut.edge(inh, tp53, mdm2) == 0);
  CHECK(g.edge(inh, tp53, mdm2) == 1);  // original untouched
  CHECK_FALSE(cut == g);

  // removing twice is idempotent; adding restores equality
  CHECK(cut.with_intervention(nutlin) == cut);
  Intervention undo = nutlin;
  undo.action = Intervention::Action::kAdd;
  CHECK(cut.with_intervention(undo) == g);

  // unknown names in an intervention fail loudly
  Intervention bogus{"inhibitory", "NOPE", "TP53", Intervention::Action::kRemove};
  CHECK_THROWS_AS(g.with_intervention(bogus), DataError);

  // batch application equals sequential application
  Intervention extra{"activatory", "TP53", "MDM2", Intervention::Action::kRemove};
  CHECK(g.with_interventions({nutlin, extra}) ==
        g.with_intervention(nutlin).with_intervention(extra));
}

TEST_CASE("adjacency mask matches edges") {
  PathwayGraph g = PathwayConfig::canonical_p53().build();
  for (std::size_t r = 0; r < g.num_relations(); ++r) {
    auto mask = g.adjacency_mask(r);
    REQUIRE(mask.size() == 9);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(mask[i * 3 + j] == double(g.edge(r, i, j)));
  }
}

TEST_CASE("pathway config json round-trip") {
  PathwayConfig cfg = PathwayConfig::canonical_p53();
  PathwayConfig back = PathwayConfig::from_json(cfg.to_json());
  CHECK(back.genes == cfg.genes);
  CHECK(back.relations == cfg.relations);
  CHECK(back.edges == cfg.edges);
  REQUIRE(back.interventions.count("Nutlin") == 1);
  CHECK(back.interventions.at("Nutlin").size() == 1);
  CHECK(back.interventions.at("Nutlin")[0].source_gene == "MDM2");
  CHECK(back.build() == cfg.build());

  CHECK_THROWS_AS(PathwayConfig::from_json("{not json"), DataError);
  CHECK_THROWS_AS(PathwayConfig::load("/nonexistent/path.json"), DataError);

  const std::string path = "test_graph_roundtrip.json";
  cfg.save(path);
  CHECK(PathwayConfig::load(path).build() == cfg.build());
  std::remove(path.c_str());
}
