#include "forge/graph.h"

#include <algorithm>
#include <deque>
#include <set>

#include "forge/error.h"

namespace forge {

KnowledgeGraph::KnowledgeGraph(std::map<EntityId, Entity> entities, std::vector<Edge> edges)
    : entities_(std::move(entities)), edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (const auto& [id, entity] : entities_) {
    index_.emplace(id, ids_.size());
    ids_.push_back(id);
  }
  std::vector<std::set<std::size_t>> adjacency(ids_.size());
  for (const auto& edge : edges_) {
    const auto s = index_.find(edge.source);
    const auto t = index_.find(edge.target);
    if (s == index_.end() || t == index_.end()) {
      throw Error(ErrorCode::kInvalidArgument, "edge endpoint missing: " + edge.source.iri() + " -> " + edge.target.iri());
    }
    if (s->second == t->second) throw Error(ErrorCode::kInvalidArgument, "self-loop on " + edge.source.iri());
    adjacency[s->second].insert(t->second);
    adjacency[t->second].insert(s->second);
  }
  adjacency_.resize(ids_.size());
  adjacency_index_.resize(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    // Indices follow sorted IRI order, so set order is IRI order.
    adjacency_index_[i].assign(adjacency[i].begin(), adjacency[i].end());
    for (std::size_t j : adjacency[i]) adjacency_[i].push_back(ids_[j]);
  }
}

std::size_t KnowledgeGraph::index_of(const EntityId& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::kNotFound, "not in graph: " + id.iri(), "graph");
  return it->second;
}

const Entity& KnowledgeGraph::entity(const EntityId& id) const {
  const auto it = entities_.find(id);
  if (it == entities_.end()) throw Error(ErrorCode::kNotFound, "not in graph: " + id.iri(), "graph");
  return it->second;
}

const std::vector<EntityId>& KnowledgeGraph::neighbors(const EntityId& id) const {
  return adjacency_[index_of(id)];
}

bool KnowledgeGraph::adjacent(const EntityId& a, const EntityId& b) const {
  const auto& list = adjacency_index_[index_of(a)];
  return std::binary_search(list.begin(), list.end(), index_of(b));
}

std::optional<Edge> KnowledgeGraph::link_edge(const EntityId& a, const EntityId& b) const {
  std::optional<Edge> best;
  auto consider = [&](const EntityId& s, const EntityId& t) {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{s, Predicate::kBirthDate, EntityId{}},
                               [](const Edge& x, const Edge& y) { return x.source < y.source; });
    for (; it != edges_.end() && it->source == s; ++it) {
      if (it->target == t && (!best || it->predicate < best->predicate ||
                              (it->predicate == best->predicate && *it < *best))) {
        best = *it;
      }
    }
  };
  consider(a, b);
  consider(b, a);
  return best;
}

std::optional<Predicate> KnowledgeGraph::link_predicate(const EntityId& a, const EntityId& b) const {
  const auto edge = link_edge(a, b);
  if (!edge) return std::nullopt;
  return edge->predicate;
}

std::vector<int> KnowledgeGraph::bfs(std::size_t from) const {
  std::vector<int> dist(ids_.size(), -1);
  std::deque<std::size_t> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : adjacency_index_[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

std::optional<int> KnowledgeGraph::distance(const EntityId& a, const EntityId& b) const {
  const int d = bfs(index_of(a))[index_of(b)];
  if (d < 0) return std::nullopt;
  return d;
}

std::map<EntityId, int> KnowledgeGraph::distances_from(const EntityId& from) const {
  const auto dist = bfs(index_of(from));
  std::map<EntityId, int> out;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] >= 0) out.emplace(ids_[i], dist[i]);
  }
  return out;
}

KnowledgeGraph build_graph(const DataSource& source, const EntityId& seed, int depth, int fan_out) {
  if (depth < 0) throw Error(ErrorCode::kInvalidArgument, "depth must be >= 0", "graph");
  if (fan_out < 0) throw Error(ErrorCode::kInvalidArgument, "fan-out must be >= 0", "graph");
  std::map<EntityId, Entity> nodes;
  nodes.emplace(seed, source.fetch_entity(seed));
  std::vector<EntityId> frontier{seed};
  for (int level = 0; level < depth && !frontier.empty(); ++level) {
    std::vector<EntityId> next;
    for (const auto& node : frontier) {
      std::vector<EntityId> targets;
      for (const auto& neighbor : source.fetch_neighbors(node, std::nullopt)) {
        if (neighbor.target != node) targets.push_back(neighbor.target);
      }
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
      if (targets.size() > static_cast<std::size_t>(fan_out)) targets.resize(static_cast<std::size_t>(fan_out));
      for (const auto& target : targets) {
        if (nodes.count(target)) continue;
        try {
          nodes.emplace(target, source.fetch_entity(target));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kNotFound) throw;
          continue;
        }
        next.push_back(target);
      }
    }
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }
  std::vector<Edge> edges;
  for (const auto& [id, entity] : nodes) {
    for (const auto& fact : entity.facts) {
      const auto* target = object_entity(fact);
      if (target && *target != id && nodes.count(*target)) edges.push_back({id, fact.predicate, *target});
    }
  }
  return KnowledgeGraph(std::move(nodes), std::move(edges));
}

ArticlePath find_path(const KnowledgeGraph& graph, const EntityId& src, const EntityId& dst, int max_len) {
  if (!graph.contains(src) || !graph.contains(dst)) {
    throw Error(ErrorCode::kNotFound, "path endpoint not in graph", "graph");
  }
  const auto to_dst = graph.distances_from(dst);
  const auto it = to_dst.find(src);
  if (it == to_dst.end()) throw Error(ErrorCode::kNoPath, "no path " + src.iri() + " -> " + dst.iri(), "graph");
  if (it->second > max_len) {
    throw Error(ErrorCode::kNoPath, "shortest path " + src.iri() + " -> " + dst.iri() + " exceeds max length", "graph");
  }
  // Walking greedily to the smallest neighbor that is one hop closer yields
  // the lexicographically smallest shortest path.
  ArticlePath path;
  path.nodes.push_back(src);
  EntityId current = src;
  int remaining = it->second;
  while (remaining > 0) {
    for (const auto& next : graph.neighbors(current)) {
      const auto d = to_dst.find(next);
      if (d != to_dst.end() && d->second == remaining - 1) {
        path.edges.push_back(*graph.link_predicate(current, next));
        path.nodes.push_back(next);
        current = next;
        break;
      }
    }
    --remaining;
  }
  return path;
}

void RelatednessWeights::validate() const {
  const double sum = direct + shared + path;
  if (direct < 0 || shared < 0 || path < 0 || !(sum > 0) || sum > 1.0 + 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "relatedness weights must be non-negative with 0 < sum <= 1");
  }
}

double relatedness(const KnowledgeGraph& graph, const EntityId& a, const EntityId& b,
                   const RelatednessWeights& weights) {
  if (!graph.contains(a) || !graph.contains(b)) {
    throw Error(ErrorCode::kNotFound, "relatedness endpoint not in graph", "graph");
  }
  if (a == b) return 1.0;
  const double direct = graph.adjacent(a, b) ? 1.0 : 0.0;
  std::vector<EntityId> na;
  std::vector<EntityId> nb;
  for (const auto& n : graph.neighbors(a)) if (n != b) na.push_back(n);
  for (const auto& n : graph.neighbors(b)) if (n != a) nb.push_back(n);
  std::vector<EntityId> shared;
  std::vector<EntityId> all;
  std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(shared));
  std::set_union(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(all));
  const double jaccard = all.empty() ? 0.0 : static_cast<double>(shared.size()) / static_cast<double>(all.size());
  const auto d = graph.distance(a, b);
  const double path = d ? 1.0 / (1.0 + *d) : 0.0;
  return std::clamp(weights.direct * direct + weights.shared * jaccard + weights.path * path, 0.0, 1.0);
}

Json graph_to_json(const KnowledgeGraph& graph) {
  Json out = Json::object();
  Json entities = Json::array();
  for (const auto& [id, entity] : graph.entities()) entities.push_back(entity_to_json(entity));
  out["entities"] = std::move(entities);
  Json edges = Json::array();
  for (const auto& edge : graph.edges()) {
    Json item = Json::object();
    item["source"] = edge.source.iri();
    item["predicate"] = predicate_name(edge.predicate);
    item["target"] = edge.target.iri();
    edges.push_back(std::move(item));
  }
  out["edges"] = std::move(edges);
  return out;
}

Json graph_node_link_json(const KnowledgeGraph& graph) {
  Json out = Json::object();
  Json nodes = Json::array();
  for (const auto& [id, entity] : graph.entities()) {
    Json node = Json::object();
    node["id"] = id.iri();
    node["label"] = entity.label;
    node["kind"] = entity_kind_name(entity.kind);
    if (entity.geo) {
      node["lat"] = entity.geo->lat;
      node["lon"] = entity.geo->lon;
    }
    nodes.push_back(std::move(node));
  }
  out["nodes"] = std::move(nodes);
  Json links = Json::array();
  for (const auto& edge : graph.edges()) {
    Json link = Json::object();
    link["source"] = edge.source.iri();
    link["target"] = edge.target.iri();
    link["predicate"] = predicate_name(edge.predicate);
    links.push_back(std::move(link));
  }
  out["links"] = std::move(links);
  return out;
}

}  // namespace forge
