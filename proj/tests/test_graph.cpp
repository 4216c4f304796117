#include <functional>
#include <random>

#include "doctest.h"
#include "forge/error.h"
#include "forge/graph.h"
#include "forge/rng.h"
#include "test_support.h"

using namespace forge;
using forge::test::dbr;

namespace {

KnowledgeGraph synthetic_graph(int nodes, const std::vector<std::pair<int, int>>& links) {
  std::map<EntityId, Entity> entities;
  auto id = [](int i) { return EntityId("urn:test:n" + std::to_string(i)); };
  for (int i = 0; i < nodes; ++i) {
    Entity e;
    e.id = id(i);
    e.label = "n" + std::to_string(i);
    e.kind = EntityKind::kPerson;
    entities.emplace(e.id, e);
  }
  std::vector<Edge> edges;
  for (const auto& [a, b] : links) edges.push_back({id(a), Predicate::kColleague, id(b)});
  return KnowledgeGraph(std::move(entities), std::move(edges));
}

// Every simple path, minimum by (edge count, node IRI sequence).
std::optional<std::vector<EntityId>> brute_force_path(const KnowledgeGraph& g, const EntityId& src,
                                                      const EntityId& dst, int max_len) {
  std::optional<std::vector<EntityId>> best;
  std::vector<EntityId> current{src};
  std::set<EntityId> on_path{src};
  std::function<void()> walk = [&] {
    const EntityId& last = current.back();
    if (last == dst) {
      if (!best || current.size() < best->size() || (current.size() == best->size() && current < *best)) {
        best = current;
      }
      return;
    }
    if (static_cast<int>(current.size()) - 1 >= max_len) return;
    for (const auto& next : g.neighbors(last)) {
      if (on_path.count(next)) continue;
      current.push_back(next);
      on_path.insert(next);
      walk();
      on_path.erase(next);
      current.pop_back();
    }
  };
  walk();
  return best;
}

}  // namespace

TEST_CASE("build_graph depth 0 is the seed alone") {
  const KnowledgeGraph g = build_graph(*test::standard(), dbr("Justin_Bieber"), 0);
  CHECK(g.size() == 1);
  CHECK(g.edges().empty());
}

TEST_CASE("build_graph depth 1 with fan-out 8") {
  // Justin Bieber has 17 distinct linked entities in the standard fixture.
  const KnowledgeGraph g = build_graph(*test::standard(), dbr("Justin_Bieber"), 1, 8);
  CHECK(g.size() == 1 + std::min(8, 17));
  const KnowledgeGraph full = build_graph(*test::standard(), dbr("Justin_Bieber"), 1, 64);
  CHECK(full.size() == 1 + 17);
}

TEST_CASE("build_graph node sets grow with depth") {
  for (int fan_out : {4, 8, 16}) {
    const KnowledgeGraph d1 = build_graph(*test::standard(), dbr("Justin_Bieber"), 1, fan_out);
    const KnowledgeGraph d2 = build_graph(*test::standard(), dbr("Justin_Bieber"), 2, fan_out);
    for (const auto& [id, entity] : d1.entities()) CHECK(d2.contains(id));
    CHECK(d2.size() >= d1.size());
  }
}

TEST_CASE("graph construction rejects self-loops and dangling endpoints") {
  CHECK_THROWS_AS(synthetic_graph(2, {{0, 0}}), Error);
  CHECK_THROWS_AS(synthetic_graph(2, {{0, 5}}), Error);
}

TEST_CASE("find_path basics") {
  const KnowledgeGraph g = synthetic_graph(4, {{0, 1}, {1, 2}});
  const EntityId n0("urn:test:n0");
  const ArticlePath self = find_path(g, n0, n0, 6);
  CHECK(self.nodes == std::vector<EntityId>{n0});
  CHECK(self.length() == 0);
  try {
    find_path(g, n0, EntityId("urn:test:n3"), 6);
    FAIL("expected no-path");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoPath);
  }
  CHECK_THROWS_AS(find_path(g, n0, EntityId("urn:test:n2"), 1), Error);
  CHECK(find_path(g, n0, EntityId("urn:test:n2"), 2).length() == 2);
}

TEST_CASE("find_path prefers the lexicographically smallest of equal-length paths") {
  // 0-3-1 and 0-2-1 are both length 2; 0,2,1 < 0,3,1.
  const KnowledgeGraph g = synthetic_graph(4, {{0, 3}, {3, 1}, {0, 2}, {2, 1}});
  const ArticlePath path = find_path(g, EntityId("urn:test:n0"), EntityId("urn:test:n1"), 6);
  CHECK(path.nodes == std::vector<EntityId>{EntityId("urn:test:n0"), EntityId("urn:test:n2"), EntityId("urn:test:n1")});
  CHECK(path.edges == std::vector<Predicate>{Predicate::kColleague, Predicate::kColleague});
}

TEST_CASE("find_path on the small12 fixture equals exhaustive enumeration") {
  const KnowledgeGraph g = build_graph(*test::small12(), dbr("Vera_Victim"), 3);
  REQUIRE(g.size() == 12);
  for (const auto& [a, ea] : g.entities()) {
    for (const auto& [b, eb] : g.entities()) {
      const auto expected = brute_force_path(g, a, b, 6);
      REQUIRE(expected);
      CHECK(find_path(g, a, b, 6).nodes == *expected);
    }
  }
}

TEST_CASE("find_path on random graphs equals exhaustive enumeration, no-path included") {
  Rng rng(20240501);
  int no_path_cases = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(9));
    std::vector<std::pair<int, int>> links;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (rng.below(100) < 25) links.emplace_back(a, b);
      }
    }
    const KnowledgeGraph g = synthetic_graph(n, links);
    const EntityId src("urn:test:n" + std::to_string(rng.below(n)));
    const EntityId dst("urn:test:n" + std::to_string(rng.below(n)));
    const int max_len = 1 + static_cast<int>(rng.below(6));
    const auto expected = brute_force_path(g, src, dst, max_len);
    if (!expected) {
      ++no_path_cases;
      CHECK_THROWS_AS(find_path(g, src, dst, max_len), Error);
    } else {
      CHECK(find_path(g, src, dst, max_len).nodes == *expected);
    }
  }
  CHECK(no_path_cases > 0);
}

TEST_CASE("relatedness") {
  const KnowledgeGraph g = build_graph(*test::small12(), dbr("Vera_Victim"), 3);
  CHECK(relatedness(g, dbr("Ada_One"), dbr("Ada_One")) == 1.0);
  // tests/oracles/oracles.py relatedness (networkx over the raw corpus files):
  //   Ed_Five ~ Vera_Victim: one shared neighbor, not adjacent, distance 2.
  CHECK(relatedness(g, dbr("Ed_Five"), dbr("Vera_Victim")) == doctest::Approx(0.109523809524).epsilon(1e-11));
  CHECK(relatedness(g, dbr("Ada_One"), dbr("Vera_Victim")) == doctest::Approx(0.700000000000).epsilon(1e-11));
  CHECK(relatedness(g, dbr("Flo_Six"), dbr("Gus_Seven")) == doctest::Approx(0.050000000000).epsilon(1e-11));

  const KnowledgeGraph isolated = synthetic_graph(2, {});
  CHECK(relatedness(isolated, EntityId("urn:test:n0"), EntityId("urn:test:n1")) == 0.0);
}

TEST_CASE("relatedness is symmetric and bounded") {
  const KnowledgeGraph g = build_graph(*test::standard(), dbr("Justin_Bieber"), 2);
  std::vector<EntityId> ids;
  for (const auto& [id, e] : g.entities()) ids.push_back(id);
  for (std::size_t i = 0; i < ids.size(); i += 3) {
    for (std::size_t j = 0; j < ids.size(); j += 5) {
      const double r = relatedness(g, ids[i], ids[j]);
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
      CHECK(r == relatedness(g, ids[j], ids[i]));
    }
  }
}

TEST_CASE("neighbors are symmetric") {
  const KnowledgeGraph g = build_graph(*test::standard(), dbr("Justin_Bieber"), 2);
  for (const auto& [id, e] : g.entities()) {
    for (const auto& n : g.neighbors(id)) CHECK(g.adjacent(n, id));
  }
}

TEST_CASE("relatedness weights are validated") {
  RelatednessWeights bad{0.8, 0.3, 0.2};
  CHECK_THROWS_AS(bad.validate(), Error);
  RelatednessWeights negative{-0.1, 0.3, 0.2};
  CHECK_THROWS_AS(negative.validate(), Error);
  CHECK_NOTHROW(RelatednessWeights{}.validate());
}
