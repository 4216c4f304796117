#pragma once

#include <map>
#include <optional>
#include <vector>

#include "forge/entity.h"
#include "forge/ingest.h"

namespace forge {

struct Edge {
  EntityId source;
  Predicate predicate = Predicate::kGenericLink;
  EntityId target;
  auto operator<=>(const Edge&) const = default;
};

// Typed multigraph. Edges are stored directed; traversal treats them as
// undirected. Immutable once constructed.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  // Sorts and deduplicates edges; kInvalidArgument if an endpoint is missing
  // or an edge is a self-loop.
  KnowledgeGraph(std::map<EntityId, Entity> entities, std::vector<Edge> edges);

  const std::map<EntityId, Entity>& entities() const { return entities_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return ids_.size(); }

  bool contains(const EntityId& id) const { return index_.count(id) > 0; }
  const Entity& entity(const EntityId& id) const;

  // Undirected neighbors sorted by IRI.
  const std::vector<EntityId>& neighbors(const EntityId& id) const;
  bool adjacent(const EntityId& a, const EntityId& b) const;
  // Smallest predicate over edges between a and b in either direction.
  std::optional<Predicate> link_predicate(const EntityId& a, const EntityId& b) const;
  // The stored edge realizing link_predicate (source/target as stored).
  std::optional<Edge> link_edge(const EntityId& a, const EntityId& b) const;

  // Undirected hop distance; nullopt when disconnected.
  std::optional<int> distance(const EntityId& a, const EntityId& b) const;
  // Hop distances from `from` to every reachable node.
  std::map<EntityId, int> distances_from(const EntityId& from) const;

 private:
  std::size_t index_of(const EntityId& id) const;
  std::vector<int> bfs(std::size_t from) const;

  std::map<EntityId, Entity> entities_;
  std::vector<Edge> edges_;
  std::vector<EntityId> ids_;
  std::map<EntityId, std::size_t> index_;
  std::vector<std::vector<EntityId>> adjacency_;
  std::vector<std::vector<std::size_t>> adjacency_index_;
};

inline constexpr int kDefaultFanOut = 16;

// Breadth-first expansion from `seed` to `depth` hops. Each expanded node
// contributes at most `fan_out` new neighbor targets, taken in sorted IRI
// order; targets that fail to resolve are skipped. The result is the induced
// subgraph over all reached entities.
KnowledgeGraph build_graph(const DataSource& source, const EntityId& seed, int depth, int fan_out = kDefaultFanOut);

struct ArticlePath {
  std::vector<EntityId> nodes;
  std::vector<Predicate> edges;

  std::size_t length() const { return edges.size(); }
  bool operator==(const ArticlePath&) const = default;
};

// Shortest path; among equal lengths the lexicographically smallest node-IRI
// sequence. kNoPath if disconnected or longer than max_len edges.
ArticlePath find_path(const KnowledgeGraph& graph, const EntityId& src, const EntityId& dst, int max_len);

struct RelatednessWeights {
  double direct = 0.5;
  double shared = 0.3;
  double path = 0.2;

  // Non-negative with a positive sum of at most 1, so scores stay in [0, 1].
  void validate() const;
};

// w.direct * [a~b] + w.shared * Jaccard(N(a)\{b}, N(b)\{a}) + w.path / (1 + d(a, b)),
// with the path term 0 when disconnected and relatedness(x, x) = 1.
double relatedness(const KnowledgeGraph& graph, const EntityId& a, const EntityId& b,
                   const RelatednessWeights& weights = {});

Json graph_to_json(const KnowledgeGraph& graph);
// Compact nodes/links structure for map overlays.
Json graph_node_link_json(const KnowledgeGraph& graph);

}  // namespace forge
