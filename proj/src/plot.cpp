#include "forge/plot.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "forge/error.h"
#include "forge/rng.h"

namespace forge {

// ---------------------------------------------------------------- theme filter

namespace {

std::string object_value(const Fact& fact) {
  if (const auto* literal = object_literal(fact)) return literal->value;
  return object_entity(fact)->iri();
}

Predicate predicate_field(const Json& json, std::string_view key, const std::string& origin) {
  const auto name = require_string(json, key, origin);
  const auto predicate = parse_predicate(name);
  if (!predicate) throw Error(ErrorCode::kInvalidArgument, origin + ": unknown predicate '" + name + "'");
  return *predicate;
}

}  // namespace

bool ThemeFilter::matches(const Entity& entity) const {
  for (const auto& constraint : constraints) {
    bool found = false;
    for (const auto* fact : entity.facts_with(constraint.predicate)) {
      if (!constraint.qualifier.empty() && fact->raw_predicate != constraint.qualifier) continue;
      if (object_value(*fact) == constraint.value) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  if (date) {
    bool found = false;
    for (const auto* fact : entity.facts_with(date_predicate)) {
      const auto* literal = object_literal(*fact);
      const auto parsed = literal ? Date::parse(literal->value) : std::nullopt;
      if (parsed && parsed->month == date->month && parsed->day == date->day) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

Json ThemeFilter::to_json() const {
  Json out = Json::object();
  Json list = Json::array();
  for (const auto& c : constraints) {
    Json item = Json::object();
    item["predicate"] = predicate_name(c.predicate);
    item["qualifier"] = c.qualifier;
    item["value"] = c.value;
    list.push_back(std::move(item));
  }
  out["constraints"] = std::move(list);
  out["date"] = date ? Json(date->str()) : Json(nullptr);
  out["date_predicate"] = predicate_name(date_predicate);
  return out;
}

ThemeFilter ThemeFilter::from_json(const Json& json, const std::string& origin) {
  if (!json.is_object()) throw Error(ErrorCode::kInvalidArgument, origin + ": theme must be an object");
  ThemeFilter filter;
  if (json.contains("constraints")) {
    for (const auto& item : require_array(json, "constraints", origin)) {
      FactConstraint c;
      c.predicate = predicate_field(item, "predicate", origin);
      if (item.contains("qualifier")) c.qualifier = require_string(item, "qualifier", origin);
      c.value = require_string(item, "value", origin);
      filter.constraints.push_back(std::move(c));
    }
  }
  if (json.contains("date") && !json["date"].is_null()) {
    filter.date = Date::parse(require_string(json, "date", origin));
    if (!filter.date) throw Error(ErrorCode::kInvalidArgument, origin + ": theme date must be YYYY-MM-DD");
  }
  if (json.contains("date_predicate")) filter.date_predicate = predicate_field(json, "date_predicate", origin);
  return filter;
}

// ------------------------------------------------------------ generator config

void GeneratorConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, "config: " + what); };
  if (k < 2) fail("k must be >= 2");
  if (pool_cap < k) fail("pool_cap must be >= k");
  if (depth < 1) fail("depth must be >= 1");
  if (fan_out < 1) fail("fan_out must be >= 1");
  if (max_path_len < 1) fail("max_path_len must be >= 1");
  if (location_cap < 2) fail("location_cap must be >= 2");
  if (!(map_radius_km > 0)) fail("map_radius_km must be > 0");
  weights.validate();
  if (evolution.population < 2) fail("evolution.population must be >= 2");
  if (evolution.generations < 0) fail("evolution.generations must be >= 0");
  if (evolution.tournament < 1) fail("evolution.tournament must be >= 1");
  if (evolution.elitism < 0 || evolution.elitism > evolution.population) fail("evolution.elitism out of range");
  if (!(evolution.mutation_rate >= 0 && evolution.mutation_rate <= 1)) fail("evolution.mutation_rate must be in [0, 1]");
}

Json GeneratorConfig::to_json() const {
  Json out = Json::object();
  out["k"] = k;
  out["pool_cap"] = pool_cap;
  out["depth"] = depth;
  out["fan_out"] = fan_out;
  out["max_path_len"] = max_path_len;
  out["location_cap"] = location_cap;
  out["map_radius_km"] = map_radius_km;
  out["weights"] = {{"direct", weights.direct}, {"shared", weights.shared}, {"path", weights.path}};
  out["evolution"] = {{"population", evolution.population},
                      {"generations", evolution.generations},
                      {"tournament", evolution.tournament},
                      {"elitism", evolution.elitism},
                      {"mutation_rate", evolution.mutation_rate}};
  out["fidelity"] = fidelity_name(fidelity);
  out["theme"] = theme ? theme->to_json() : Json(nullptr);
  out["goal"] = goal ? Json(*goal) : Json(nullptr);
  return out;
}

namespace {

void reject_unknown_keys(const Json& json, std::initializer_list<std::string_view> known, const std::string& origin) {
  for (const auto& [key, value] : json.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::kInvalidArgument, origin + ": unknown config key '" + key + "'");
    }
  }
}

int int_field(const Json& json, std::string_view key, const std::string& origin) {
  return static_cast<int>(require_int(json, key, origin));
}

}  // namespace

GeneratorConfig GeneratorConfig::from_json(const Json& json, const std::string& origin) {
  if (!json.is_object()) throw Error(ErrorCode::kInvalidArgument, origin + ": config must be an object");
  reject_unknown_keys(json,
                      {"k", "pool_cap", "depth", "fan_out", "max_path_len", "location_cap", "map_radius_km", "weights",
                       "evolution", "fidelity", "theme", "goal"},
                      origin);
  GeneratorConfig config;
  if (json.contains("k")) config.k = int_field(json, "k", origin);
  if (json.contains("pool_cap")) config.pool_cap = int_field(json, "pool_cap", origin);
  if (json.contains("depth")) config.depth = int_field(json, "depth", origin);
  if (json.contains("fan_out")) config.fan_out = int_field(json, "fan_out", origin);
  if (json.contains("max_path_len")) config.max_path_len = int_field(json, "max_path_len", origin);
  if (json.contains("location_cap")) config.location_cap = int_field(json, "location_cap", origin);
  if (json.contains("map_radius_km")) config.map_radius_km = require_number(json, "map_radius_km", origin);
  if (json.contains("weights")) {
    const auto& w = json["weights"];
    reject_unknown_keys(w, {"direct", "shared", "path"}, origin + ".weights");
    if (w.contains("direct")) config.weights.direct = require_number(w, "direct", origin);
    if (w.contains("shared")) config.weights.shared = require_number(w, "shared", origin);
    if (w.contains("path")) config.weights.path = require_number(w, "path", origin);
  }
  if (json.contains("evolution")) {
    const auto& e = json["evolution"];
    reject_unknown_keys(e, {"population", "generations", "tournament", "elitism", "mutation_rate"},
                        origin + ".evolution");
    if (e.contains("population")) config.evolution.population = int_field(e, "population", origin);
    if (e.contains("generations")) config.evolution.generations = int_field(e, "generations", origin);
    if (e.contains("tournament")) config.evolution.tournament = int_field(e, "tournament", origin);
    if (e.contains("elitism")) config.evolution.elitism = int_field(e, "elitism", origin);
    if (e.contains("mutation_rate")) config.evolution.mutation_rate = require_number(e, "mutation_rate", origin);
  }
  if (json.contains("fidelity")) {
    const auto f = parse_fidelity(require_string(json, "fidelity", origin));
    if (!f) throw Error(ErrorCode::kInvalidArgument, origin + ": fidelity must be verbatim or template");
    config.fidelity = *f;
  }
  if (json.contains("theme") && !json["theme"].is_null()) config.theme = ThemeFilter::from_json(json["theme"], origin);
  if (json.contains("goal") && !json["goal"].is_null()) config.goal = require_string(json, "goal", origin);
  config.validate();
  return config;
}

// ------------------------------------------------------------------ suspects

std::vector<EntityId> build_suspect_pool(const KnowledgeGraph& graph, const EntityId& victim,
                                         const ThemeFilter* filter, const ExclusionList& excluded, int k,
                                         int pool_cap, const RelatednessWeights& weights) {
  if (!graph.contains(victim) || graph.entity(victim).kind != EntityKind::kPerson) {
    throw Error(ErrorCode::kInvalidArgument, "victim must be a person in the graph", "pool");
  }
  std::vector<std::pair<double, EntityId>> scored;
  for (const auto& [id, entity] : graph.entities()) {
    if (id == victim || entity.kind != EntityKind::kPerson || excluded.count(id)) continue;
    if (filter && !filter->matches(entity)) continue;
    const double r = relatedness(graph, victim, id, weights);
    if (r > 0) scored.emplace_back(r, id);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (scored.size() < static_cast<std::size_t>(std::max(k, 0))) {
    throw Error(ErrorCode::kPoolTooSmall,
                "only " + std::to_string(scored.size()) + " related persons, need " + std::to_string(k), "pool");
  }
  if (scored.size() > static_cast<std::size_t>(pool_cap)) scored.resize(static_cast<std::size_t>(pool_cap));
  std::vector<EntityId> pool;
  for (auto& [r, id] : scored) pool.push_back(std::move(id));
  return pool;
}

SuspectPool SuspectPool::from_graph(const KnowledgeGraph& graph, const EntityId& victim,
                                    std::vector<EntityId> candidates, const RelatednessWeights& weights) {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  SuspectPool pool;
  const std::size_t n = candidates.size();
  pool.to_victim.resize(n);
  pool.pairwise.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    pool.to_victim[i] = relatedness(graph, victim, candidates[i], weights);
    pool.pairwise[i][i] = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      pool.pairwise[i][j] = pool.pairwise[j][i] = relatedness(graph, candidates[i], candidates[j], weights);
    }
  }
  pool.candidates = std::move(candidates);
  return pool;
}

double suspect_fitness(const SuspectPool& pool, const std::vector<std::size_t>& members) {
  if (members.empty()) return 0.0;
  double pair_sum = 0.0;
  std::size_t pairs = 0;
  double victim_sum = 0.0;
  for (std::size_t a = 0; a < members.size(); ++a) {
    victim_sum += pool.to_victim[members[a]];
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      pair_sum += pool.pairwise[members[a]][members[b]];
      ++pairs;
    }
  }
  const double pair_mean = pairs == 0 ? 0.0 : pair_sum / static_cast<double>(pairs);
  return pair_mean + victim_sum / static_cast<double>(members.size());
}

namespace {

using Genome = std::vector<std::size_t>;  // sorted pool indices

SuspectSet to_set(const SuspectPool& pool, const Genome& genome) {
  SuspectSet set;
  for (std::size_t i : genome) set.members.push_back({pool.candidates[i], false});
  set.fitness = suspect_fitness(pool, genome);
  return set;
}

void check_k(const SuspectPool& pool, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1", "evolve");
  if (pool.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kPoolTooSmall, "pool smaller than k", "evolve");
  }
}

Genome greedy_genome(const SuspectPool& pool, int k) {
  Genome chosen;
  std::vector<bool> used(pool.size(), false);
  for (int step = 0; step < k; ++step) {
    std::size_t best = pool.size();
    double best_fitness = 0.0;
    for (std::size_t c = 0; c < pool.size(); ++c) {
      if (used[c]) continue;
      Genome trial = chosen;
      trial.insert(std::upper_bound(trial.begin(), trial.end(), c), c);
      const double f = suspect_fitness(pool, trial);
      if (best == pool.size() || f > best_fitness) {
        best = c;
        best_fitness = f;
      }
    }
    used[best] = true;
    chosen.insert(std::upper_bound(chosen.begin(), chosen.end(), best), best);
  }
  return chosen;
}

struct Scored {
  Genome genome;
  double fitness = 0.0;
};

// Index order equals IRI order, so comparing genomes compares member IRIs.
bool ranks_before(const Scored& a, const Scored& b) {
  if (a.fitness != b.fitness) return a.fitness > b.fitness;
  return a.genome < b.genome;
}

std::size_t pick_outsider(const Genome& members, std::size_t pool_size, Rng& rng) {
  std::vector<std::size_t> outsiders;
  for (std::size_t i = 0; i < pool_size; ++i) {
    if (!std::binary_search(members.begin(), members.end(), i)) outsiders.push_back(i);
  }
  return outsiders[static_cast<std::size_t>(rng.below(outsiders.size()))];
}

}  // namespace

SuspectSet greedy_suspect_set(const SuspectPool& pool, int k) {
  check_k(pool, k);
  return to_set(pool, greedy_genome(pool, k));
}

SuspectSet evolve_suspect_set(const SuspectPool& pool, int k, std::uint64_t seed, const EvolutionParams& params) {
  check_k(pool, k);
  const std::size_t n = pool.size();
  const auto uk = static_cast<std::size_t>(k);
  if (n == uk) {
    Genome all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return to_set(pool, all);
  }
  Rng rng(derive_seed(seed, "evolve"));
  auto score = [&](Genome g) { return Scored{g, suspect_fitness(pool, g)}; };

  std::vector<Scored> population;
  population.push_back(score(greedy_genome(pool, k)));
  while (population.size() < static_cast<std::size_t>(params.population)) {
    Genome all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    rng.shuffle(all);
    all.resize(uk);
    std::sort(all.begin(), all.end());
    population.push_back(score(std::move(all)));
  }
  std::sort(population.begin(), population.end(), ranks_before);

  auto tournament = [&]() -> const Scored& {
    const Scored* best = nullptr;
    for (int t = 0; t < params.tournament; ++t) {
      const Scored& entrant = population[static_cast<std::size_t>(rng.below(population.size()))];
      if (!best || ranks_before(entrant, *best)) best = &entrant;
    }
    return *best;
  };

  for (int generation = 0; generation < params.generations; ++generation) {
    std::vector<Scored> next(population.begin(), population.begin() + params.elitism);
    while (next.size() < population.size()) {
      const Genome& a = tournament().genome;
      const Genome& b = tournament().genome;
      Genome child;
      const std::size_t cut = uk > 1 ? 1 + static_cast<std::size_t>(rng.below(uk - 1)) : 0;
      child.insert(child.end(), a.begin(), a.begin() + static_cast<std::ptrdiff_t>(cut));
      child.insert(child.end(), b.begin() + static_cast<std::ptrdiff_t>(cut), b.end());
      std::sort(child.begin(), child.end());
      child.erase(std::unique(child.begin(), child.end()), child.end());
      while (child.size() < uk) {
        const std::size_t fill = pick_outsider(child, n, rng);
        child.insert(std::upper_bound(child.begin(), child.end(), fill), fill);
      }
      if (rng.unit() < params.mutation_rate) {
        const std::size_t slot = static_cast<std::size_t>(rng.below(uk));
        const std::size_t incoming = pick_outsider(child, n, rng);
        child.erase(child.begin() + static_cast<std::ptrdiff_t>(slot));
        child.insert(std::upper_bound(child.begin(), child.end(), incoming), incoming);
      }
      next.push_back(score(std::move(child)));
    }
    std::sort(next.begin(), next.end(), ranks_before);
    population = std::move(next);
  }
  return to_set(pool, population.front().genome);
}

SuspectSet assign_culprit(SuspectSet set, std::uint64_t seed) {
  if (set.members.empty()) throw Error(ErrorCode::kInvalidArgument, "empty suspect set", "culprit");
  if (set.culprit_flags() != 0) throw Error(ErrorCode::kInvalidArgument, "culprit already assigned", "culprit");
  std::sort(set.members.begin(), set.members.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  Rng rng(derive_seed(seed, "culprit"));
  set.members[static_cast<std::size_t>(rng.below(set.members.size()))].culprit = true;
  return set;
}

// ------------------------------------------------------------------ evidence

namespace {

bool usable_object(const Fact& fact, const KnowledgeGraph& graph) {
  if (object_literal(fact)) return true;
  return graph.contains(*object_entity(fact));
}

}  // namespace

std::vector<EvidenceItem> assign_evidence(const SuspectSet& set, const KnowledgeGraph& graph,
                                          const std::vector<EntityId>& locations, std::uint64_t seed,
                                          const LabelFn& labels, Fidelity fidelity) {
  if (set.culprit_flags() != 1) throw Error(ErrorCode::kInvalidArgument, "culprit not assigned", "evidence");
  if (locations.empty()) throw Error(ErrorCode::kInvalidArgument, "no locations for evidence", "evidence");
  Rng rng(derive_seed(seed, "evidence"));
  std::vector<EntityId> slots = locations;
  rng.shuffle(slots);
  std::vector<EvidenceItem> items;
  auto innocents = set.innocents();
  std::sort(innocents.begin(), innocents.end());
  for (const auto& innocent : innocents) {
    const Entity& entity = graph.entity(innocent);
    std::vector<const Fact*> usable;
    for (Predicate predicate : kEvidencePreference) {
      for (const auto* fact : entity.facts_with(predicate)) {
        if (usable_object(*fact, graph)) usable.push_back(fact);
      }
      if (!usable.empty()) break;
    }
    if (usable.empty()) {
      throw Error(ErrorCode::kInsufficientFacts, innocent.iri() + " has no usable evidence fact", "evidence");
    }
    const Fact& fact = *usable[static_cast<std::size_t>(rng.below(usable.size()))];
    EvidenceItem item;
    item.id = evidence_id(items.size() + 1);
    item.about = innocent;
    item.fact = fact;
    item.placed_at = slots[items.size() % slots.size()];
    item.text = render_fact_line(fact, Topic::kSuspectHint, labels, {fidelity, {}, nullptr}).text;
    items.push_back(std::move(item));
  }
  return items;
}

// ----------------------------------------------------------------------- lie

LiedFact inject_lie(const Entity& culprit, const KnowledgeGraph& graph, std::uint64_t seed) {
  struct Option {
    const Fact* truth;
    std::vector<FactObject> alternatives;
  };
  std::vector<Option> options;
  for (const auto& fact : culprit.facts) {
    if (fact.predicate == Predicate::kBirthDate) {
      const auto* literal = object_literal(fact);
      const auto date = literal ? Date::parse(literal->value) : std::nullopt;
      if (!date) continue;
      Option option{&fact, {}};
      for (int offset : {-3, -2, -1, 1, 2, 3}) {
        Date shifted = *date;
        shifted.year += offset;
        if (shifted.year < 0 || shifted.year > 9999) continue;
        shifted.day = std::min(shifted.day, Date::days_in_month(shifted.year, shifted.month));
        FactObject object = Literal{shifted.str(), LiteralType::kDate};
        bool held = false;
        for (const auto* own : culprit.facts_with(fact.predicate)) held = held || own->object == object;
        if (!held) option.alternatives.push_back(std::move(object));
      }
      if (!option.alternatives.empty()) options.push_back(std::move(option));
    } else if (fact.predicate == Predicate::kOccupation) {
      std::set<FactObject> seen;
      for (const auto& [id, entity] : graph.entities()) {
        if (id == culprit.id) continue;
        for (const auto* other : entity.facts_with(Predicate::kOccupation)) {
          if (other->object.index() != fact.object.index() || !usable_object(*other, graph)) continue;
          seen.insert(other->object);
        }
      }
      for (const auto* own : culprit.facts_with(Predicate::kOccupation)) seen.erase(own->object);
      if (!seen.empty()) options.push_back({&fact, std::vector<FactObject>(seen.begin(), seen.end())});
    }
  }
  if (options.empty()) {
    throw Error(ErrorCode::kNoLiableFact, culprit.id.iri() + " has no fact that can be altered", "lie");
  }
  Rng rng(derive_seed(seed, "lie"));
  const Option& chosen = options[static_cast<std::size_t>(rng.below(options.size()))];
  LiedFact lie;
  lie.culprit = culprit.id;
  lie.truth = *chosen.truth;
  lie.altered = *chosen.truth;
  lie.altered.object = chosen.alternatives[static_cast<std::size_t>(rng.below(chosen.alternatives.size()))];
  return lie;
}

// --------------------------------------------------------------- clue chain

namespace {

Fact edge_fact(const KnowledgeGraph& graph, const EntityId& a, const EntityId& b) {
  const auto edge = graph.link_edge(a, b);
  if (!edge) throw Error(ErrorCode::kNoPath, a.iri() + " and " + b.iri() + " are not linked", "clue-chain");
  for (const auto* fact : graph.entity(edge->source).facts_with(edge->predicate)) {
    const auto* target = object_entity(*fact);
    if (target && *target == edge->target) return *fact;
  }
  throw Error(ErrorCode::kInvalidArgument, "edge without backing fact", "clue-chain");
}

std::string location_label(const EntityId& id, const LabelFn& labels) { return labels(id); }

}  // namespace

ClueChain build_clue_chain(const KnowledgeGraph& graph, const ChainPlan& plan, const LabelFn& labels,
                           Fidelity fidelity) {
  if (plan.locations.size() < 2) {
    throw Error(ErrorCode::kInsufficientLocations, "a clue chain needs at least two locations", "clue-chain");
  }
  const std::set<EntityId> in_game(plan.locations.begin(), plan.locations.end());
  if (!in_game.count(plan.start)) throw Error(ErrorCode::kInvalidArgument, "start is not a location", "clue-chain");
  const bool mystery = plan.mode != GameMode::kLinkpath;

  ClueChain chain;
  chain.host[plan.victim] = plan.start;
  chain.element[plan.victim] = mystery ? EntityId(kCaseFileId) : plan.victim;

  auto host_of = [&](const EntityId& node, const EntityId& parent) {
    if (in_game.count(node)) return node;
    for (Predicate predicate : {Predicate::kBirthPlace, Predicate::kLocatedIn}) {
      for (const auto* fact : graph.entity(node).facts_with(predicate)) {
        const auto* target = object_entity(*fact);
        if (target && in_game.count(*target)) return *target;
      }
    }
    return chain.host.at(parent);
  };

  for (const auto& target : plan.targets) {
    if (target == plan.victim) throw Error(ErrorCode::kInvalidArgument, "target equals victim", "clue-chain");
    ArticlePath path;
    try {
      path = find_path(graph, plan.victim, target, plan.max_path_len);
    } catch (const Error& e) {
      throw e.with_stage("clue-chain");
    }
    for (std::size_t j = 1; j < path.nodes.size(); ++j) {
      const EntityId& parent = path.nodes[j - 1];
      const EntityId& node = path.nodes[j];
      if (!chain.host.count(node)) {
        chain.host[node] = host_of(node, parent);
        chain.element[node] = node;
      }
      const EntityId& giver = chain.element.at(parent);
      const bool seen = std::any_of(chain.records.begin(), chain.records.end(), [&](const ClueRecord& r) {
        return r.kind == ClueKind::kLink && r.giver == giver && r.about == node;
      });
      if (seen) continue;
      ClueRecord record;
      record.kind = ClueKind::kLink;
      record.at_location = chain.host.at(parent);
      record.giver = giver;
      record.about = node;
      record.element = chain.element.at(node);
      record.unlocks = chain.host.at(node);
      record.fact = edge_fact(graph, parent, node);
      record.text = render_fact_line(*record.fact, Topic::kClue, labels,
                                     {fidelity, location_label(*record.unlocks, labels), nullptr})
                        .text;
      chain.records.push_back(std::move(record));
    }
    chain.paths.push_back(std::move(path));
  }

  // Extra reveals ride on the first record that reveals their subject.
  for (const auto& [innocent, evidence] : plan.evidence_for) {
    auto it = std::find_if(chain.records.begin(), chain.records.end(),
                           [&](const ClueRecord& r) { return r.about == innocent; });
    if (it == chain.records.end()) {
      throw Error(ErrorCode::kNoPath, "no clue reveals " + innocent.iri(), "clue-chain");
    }
    it->evidence = evidence;
  }
  if (plan.lie) {
    auto it = std::find_if(chain.records.begin(), chain.records.end(),
                           [&](const ClueRecord& r) { return r.about == plan.lie->culprit; });
    if (it == chain.records.end()) {
      throw Error(ErrorCode::kNoPath, "no clue reveals the culprit", "clue-chain");
    }
    ClueRecord truth;
    truth.kind = ClueKind::kFact;
    truth.at_location = it->at_location;
    truth.giver = it->giver;
    truth.about = plan.lie->culprit;
    truth.fact = plan.lie->truth;
    DialogLine line = render_fact_line(plan.lie->truth, Topic::kSuspectHint, labels, {fidelity, {}, nullptr});
    truth.text = line.text;
    chain.records.insert(it + 1, std::move(truth));
  }
  for (std::size_t i = 0; i < chain.records.size(); ++i) chain.records[i].id = clue_id(i + 1);
  return chain;
}

// ------------------------------------------------------------------ assembly

namespace {

template <typename F>
auto staged(const char* stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw e.with_stage(stage);
  }
}

bool has_geo_place(const KnowledgeGraph& graph, const EntityId& id) {
  if (!graph.contains(id)) return false;
  const Entity& entity = graph.entity(id);
  return entity.kind == EntityKind::kPlace && entity.geo.has_value();
}

std::optional<EntityId> first_birth_place(const KnowledgeGraph& graph, const EntityId& person) {
  for (const auto* fact : graph.entity(person).facts_with(Predicate::kBirthPlace)) {
    const auto* target = object_entity(*fact);
    if (target && has_geo_place(graph, *target)) return *target;
  }
  return std::nullopt;
}

EntityId resolve_person(const DataSource& source, const std::string& name) {
  std::vector<EntityId> persons;
  for (const auto& id : source.find_by_label(name)) {
    if (source.fetch_entity(id).kind == EntityKind::kPerson) persons.push_back(id);
  }
  if (persons.empty()) throw Error(ErrorCode::kNotFound, "no person labeled '" + name + "'");
  if (persons.size() > 1) {
    throw Error(ErrorCode::kAmbiguousVictim,
                "'" + name + "' matches " + std::to_string(persons.size()) + " persons");
  }
  return persons.front();
}

EntityId farthest_person(const KnowledgeGraph& graph, const EntityId& from, int max_len) {
  std::optional<EntityId> best;
  int best_distance = 0;
  for (const auto& [id, d] : graph.distances_from(from)) {
    if (id == from || d > max_len || graph.entity(id).kind != EntityKind::kPerson) continue;
    if (d > best_distance) {
      best = id;
      best_distance = d;
    }
  }
  if (!best) throw Error(ErrorCode::kNoPath, "no other person reachable from " + from.iri());
  return *best;
}

void add_fact_refs(std::set<EntityId>& refs, const Fact& fact) {
  refs.insert(fact.subject);
  if (const auto* target = object_entity(fact)) refs.insert(*target);
}

}  // namespace

GameSpec assemble_game(const DataSource& source, const std::string& victim_name, GameMode mode, std::uint64_t seed,
                       const GeneratorConfig& config, const ExclusionList& excluded) {
  staged("config", [&] { config.validate(); });
  const bool mystery = mode != GameMode::kLinkpath;

  const EntityId victim = staged("resolve", [&] { return resolve_person(source, victim_name); });
  const KnowledgeGraph graph =
      staged("graph", [&] { return build_graph(source, victim, config.depth, config.fan_out); });
  const LabelFn labels = [&graph](const EntityId& id) {
    return graph.contains(id) ? graph.entity(id).label : id.iri();
  };

  GameSpec spec;
  spec.mode = mode;
  spec.victim = victim;
  spec.seed = seed;
  spec.generator_version = kGeneratorVersion;
  spec.config = config.to_json();

  std::vector<EntityId> targets;
  if (mystery) {
    const auto pool = staged("pool", [&] {
      return build_suspect_pool(graph, victim, config.theme ? &*config.theme : nullptr, excluded, config.k,
                                config.pool_cap, config.weights);
    });
    SuspectSet set = staged("evolve", [&] {
      return evolve_suspect_set(SuspectPool::from_graph(graph, victim, pool, config.weights), config.k, seed,
                                config.evolution);
    });
    spec.suspects = staged("culprit", [&] { return assign_culprit(std::move(set), seed); });
    targets = spec.suspects.ids();
  } else {
    spec.goal = staged("pool", [&] {
      if (!config.goal) return farthest_person(graph, victim, config.max_path_len);
      for (const auto& [id, entity] : graph.entities()) {
        if (entity.label == *config.goal && entity.kind == EntityKind::kPerson && id != victim) return id;
      }
      throw Error(ErrorCode::kNotFound, "goal '" + *config.goal + "' is not a person in the graph");
    });
    targets = {*spec.goal};
  }

  // Victim's birth place, places on the paths, the targets' birth places,
  // then birth places of the other persons on the paths.
  std::vector<EntityId> locations = staged("locations", [&] {
    std::vector<EntityId> out;
    auto add = [&](const EntityId& id) {
      if (out.size() < static_cast<std::size_t>(config.location_cap) && has_geo_place(graph, id) &&
          std::find(out.begin(), out.end(), id) == out.end()) {
        out.push_back(id);
      }
    };
    if (const auto home = first_birth_place(graph, victim)) add(*home);
    for (const auto& target : targets) {
      for (const auto& node : find_path(graph, victim, target, config.max_path_len).nodes) add(node);
    }
    for (const auto& target : targets) {
      if (const auto home = first_birth_place(graph, target)) add(*home);
    }
    // Persons met along the way, so short linkpath games still travel.
    for (const auto& target : targets) {
      for (const auto& node : find_path(graph, victim, target, config.max_path_len).nodes) {
        if (graph.entity(node).kind != EntityKind::kPerson) continue;
        if (const auto home = first_birth_place(graph, node)) add(*home);
      }
    }
    if (out.size() < 2) {
      throw Error(ErrorCode::kInsufficientLocations, "found " + std::to_string(out.size()) + " usable locations");
    }
    return out;
  });

  ChainPlan plan;
  plan.mode = mode;
  plan.victim = victim;
  plan.start = locations.front();
  plan.targets = targets;
  plan.locations = locations;
  plan.max_path_len = config.max_path_len;

  // Locations no record unlocks are dropped before evidence is placed.
  staged("clue-chain", [&] {
    const ClueChain draft = build_clue_chain(graph, plan, labels, config.fidelity);
    std::set<EntityId> unlocked{plan.start};
    for (const auto& record : draft.records) {
      if (record.unlocks) unlocked.insert(*record.unlocks);
    }
    std::vector<EntityId> kept;
    for (const auto& id : locations) {
      if (unlocked.count(id)) kept.push_back(id);
    }
    if (kept.size() < 2) {
      throw Error(ErrorCode::kInsufficientLocations,
                  "only " + std::to_string(kept.size()) + " locations are reachable through clues");
    }
    plan.locations = kept;
  });

  if (mode == GameMode::kWikimystery) {
    spec.evidence = staged("evidence", [&] {
      return assign_evidence(spec.suspects, graph, plan.locations, seed, labels, config.fidelity);
    });
    for (const auto& item : spec.evidence) plan.evidence_for[item.about] = item.id;
  } else if (mode == GameMode::kDataAgent) {
    spec.lie = staged("lie", [&] { return inject_lie(graph.entity(*spec.suspects.culprit()), graph, seed); });
    plan.lie = spec.lie;
  }

  const ClueChain chain = staged("clue-chain", [&] { return build_clue_chain(graph, plan, labels, config.fidelity); });
  spec.start = plan.start;
  spec.paths = chain.paths;
  spec.clue_chain = chain.records;

  staged("locations", [&] {
    for (const auto& id : plan.locations) {
      spec.locations.push_back({id, fetch_map_extract(source, id, config.map_radius_km)});
    }
  });

  // Elements in first-reveal order; persons become NPCs, everything else items.
  std::vector<EntityId> order;
  if (!mystery) order.push_back(victim);
  for (const auto& record : chain.records) {
    if (record.kind == ClueKind::kLink && std::find(order.begin(), order.end(), record.about) == order.end()) {
      order.push_back(record.about);
    }
  }
  std::map<EntityId, std::vector<const ClueRecord*>> given;
  for (const auto& record : spec.clue_chain) given[record.giver].push_back(&record);

  if (mystery) {
    ItemRecord casefile;
    casefile.id = EntityId(kCaseFileId);
    casefile.entity = victim;
    casefile.location = plan.start;
    casefile.text = "Case file: " + labels(victim) + " has been murdered. The investigation starts in " +
                    labels(plan.start) + ".";
    for (const auto* record : given[casefile.id]) casefile.reveals.push_back(record->id);
    spec.items.push_back(std::move(casefile));
  }

  staged("dialog", [&] {
    for (const auto& node : order) {
      const Entity& entity = graph.entity(node);
      const EntityId home = chain.host.at(node);
      if (entity.kind != EntityKind::kPerson) {
        ItemRecord item;
        item.id = node;
        item.entity = node;
        item.location = home;
        item.text = "A record about " + entity.label + ".";
        for (const auto* record : given[node]) item.reveals.push_back(record->id);
        spec.items.push_back(std::move(item));
        continue;
      }
      std::vector<Fact> facts;
      for (const auto& fact : entity.facts) {
        if (usable_object(fact, graph)) facts.push_back(fact);
      }
      for (const auto& [id, other] : graph.entities()) {
        if (id == node) continue;
        for (const auto& fact : other.facts) {
          const auto* target = object_entity(fact);
          if (target && *target == node) facts.push_back(fact);
        }
      }
      const bool is_suspect = spec.suspects.contains(node);
      const bool is_culprit = spec.suspects.culprit() == node;
      const DialogRole role = is_culprit ? DialogRole::kCulprit : is_suspect ? DialogRole::kInnocent : DialogRole::kBystander;
      const LiedFact* lie = spec.lie && spec.lie->culprit == node ? &*spec.lie : nullptr;
      DialogResult result = render_dialog(entity, facts, role, config.fidelity, seed, labels, lie);
      for (const auto* record : given[node]) {
        const LineOptions options{config.fidelity, record->unlocks ? labels(*record->unlocks) : std::string(), nullptr};
        DialogLine line = render_fact_line(*record->fact,
                                           record->kind == ClueKind::kLink ? Topic::kClue : Topic::kSuspectHint,
                                           labels, options);
        line.topic = Topic::kClue;
        line.reveals = record->id;
        result.script.lines.push_back(std::move(line));
      }
      spec.npcs.push_back({node, home, std::move(result.script), fetch_image_candidates(entity)});
    }
  });

  // Every entity the game refers to travels with it.
  std::set<EntityId> refs{victim};
  if (spec.goal) refs.insert(*spec.goal);
  for (const auto& id : spec.suspects.ids()) refs.insert(id);
  for (const auto& path : spec.paths) refs.insert(path.nodes.begin(), path.nodes.end());
  for (const auto& location : spec.locations) refs.insert(location.id);
  for (const auto& npc : spec.npcs) {
    refs.insert(npc.entity);
    for (const auto& line : npc.dialog.lines) {
      for (const auto& fact : line.source_facts) add_fact_refs(refs, fact);
      if (line.claim) add_fact_refs(refs, *line.claim);
    }
  }
  for (const auto& item : spec.items) refs.insert(item.entity);
  for (const auto& record : spec.clue_chain) {
    refs.insert(record.about);
    if (record.fact) add_fact_refs(refs, *record.fact);
  }
  for (const auto& item : spec.evidence) add_fact_refs(refs, item.fact);
  if (spec.lie) {
    add_fact_refs(refs, spec.lie->truth);
    add_fact_refs(refs, spec.lie->altered);
  }
  for (const auto& id : refs) {
    if (graph.contains(id)) spec.bundle.emplace(id, graph.entity(id));
  }

  const ValidationReport report = validate_solvability(spec);
  if (!report.passed()) {
    std::string failed;
    for (const auto& check : report.checks) {
      if (!check.passed) failed += (failed.empty() ? "" : ", ") + check.name + " (" + check.detail + ")";
    }
    throw Error(ErrorCode::kInvalidSpec, "generated game failed validation: " + failed, "validate");
  }
  return spec;
}

std::vector<BatchResult> generate_batch(const DataSource& source, const std::string& victim_name, GameMode mode,
                                        const std::vector<std::uint64_t>& seeds, const GeneratorConfig& config,
                                        const ExclusionList& excluded, unsigned threads) {
  std::vector<BatchResult> results(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      results[i].seed = seeds[i];
      try {
        results[i].spec = assemble_game(source, victim_name, mode, seeds[i], config, excluded);
      } catch (const Error& e) {
        results[i].error = e.stage() + ": " + std::string(error_code_name(e.code())) + ": " + e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(seeds.size(), 1)));
  if (threads <= 1) {
    worker();
    return results;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& thread : pool) thread.join();
  return results;
}

// ---------------------------------------------------------------- validation

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::find(std::string_view name) const {
  for (const auto& check : checks) {
    if (check.name == name) return &check;
  }
  return nullptr;
}

Json ValidationReport::to_json() const {
  Json out = Json::object();
  out["passed"] = passed();
  Json list = Json::array();
  for (const auto& check : checks) {
    list.push_back({{"name", check.name}, {"passed", check.passed}, {"detail", check.detail}});
  }
  out["checks"] = std::move(list);
  return out;
}

namespace {

struct Closure {
  std::set<EntityId> unlocked;
  std::set<EntityId> known;      // NPC entities and item ids the player can find
  std::set<EntityId> clues;      // collected clue ids
  std::set<EntityId> evidence;   // evidence ids whose location is known
  std::set<EntityId> reachable_evidence;
};

// Everything a player can eventually learn by exhausting every dialog and
// collecting every item reachable from the start.
Closure explore(const GameSpec& spec) {
  Closure c;
  c.unlocked.insert(spec.start);
  c.known.insert(spec.mode == GameMode::kLinkpath ? spec.victim : EntityId(kCaseFileId));
  bool changed = true;
  auto learn = [&](const EntityId& clue) {
    if (!c.clues.insert(clue).second) return;
    changed = true;
    if (const auto* record = spec.clue(clue)) {
      if (record->unlocks) c.unlocked.insert(*record->unlocks);
      if (record->element) c.known.insert(*record->element);
      if (record->evidence) c.evidence.insert(*record->evidence);
    }
  };
  while (changed) {
    changed = false;
    for (const auto& npc : spec.npcs) {
      if (!c.known.count(npc.entity) || !c.unlocked.count(npc.home)) continue;
      for (const auto& line : npc.dialog.lines) {
        if (line.reveals) learn(*line.reveals);
      }
    }
    for (const auto& item : spec.items) {
      if (!c.known.count(item.id) || !c.unlocked.count(item.location)) continue;
      for (const auto& clue : item.reveals) learn(clue);
    }
  }
  for (const auto& item : spec.evidence) {
    if (c.evidence.count(item.id) && c.unlocked.count(item.placed_at)) c.reachable_evidence.insert(item.id);
  }
  return c;
}

// A claim contradicts the bundle when its subject is bundled but holds no
// fact with the same predicate and object.
bool contradicts(const GameSpec& spec, const Fact& claim) {
  const auto it = spec.bundle.find(claim.subject);
  if (it == spec.bundle.end()) return false;
  return std::none_of(it->second.facts.begin(), it->second.facts.end(),
                      [&](const Fact& f) { return same_claim(f, claim); });
}

std::string join_ids(const std::vector<EntityId>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : " ") + id.iri();
  return out;
}

}  // namespace

ValidationReport validate_solvability(const GameSpec& spec) {
  ValidationReport report;
  auto check = [&](std::string name, bool ok, std::string detail = {}) {
    report.checks.push_back({std::move(name), ok, ok ? std::string() : std::move(detail)});
  };
  const bool mystery = spec.mode != GameMode::kLinkpath;

  {
    std::vector<EntityId> missing;
    auto need = [&](const EntityId& id) {
      if (!spec.bundle.count(id) && std::find(missing.begin(), missing.end(), id) == missing.end()) {
        missing.push_back(id);
      }
    };
    auto need_fact = [&](const Fact& fact) {
      need(fact.subject);
      if (const auto* target = object_entity(fact)) need(*target);
    };
    need(spec.victim);
    if (spec.goal) need(*spec.goal);
    for (const auto& id : spec.suspects.ids()) need(id);
    for (const auto& path : spec.paths) for (const auto& node : path.nodes) need(node);
    for (const auto& location : spec.locations) need(location.id);
    for (const auto& npc : spec.npcs) {
      need(npc.entity);
      for (const auto& line : npc.dialog.lines) {
        for (const auto& fact : line.source_facts) need_fact(fact);
        if (line.claim) need_fact(*line.claim);
      }
    }
    for (const auto& item : spec.items) need(item.entity);
    for (const auto& record : spec.clue_chain) {
      need(record.about);
      if (record.fact) need_fact(*record.fact);
    }
    for (const auto& item : spec.evidence) need_fact(item.fact);
    if (spec.lie) {
      need_fact(spec.lie->truth);
      need_fact(spec.lie->altered);
    }
    check("entities-resolvable", missing.empty(), "missing: " + join_ids(missing));
  }

  check("start-location", spec.location(spec.start) != nullptr, spec.start.iri() + " is not a location");

  const Closure closure = explore(spec);
  {
    std::vector<EntityId> missing;
    for (const auto& location : spec.locations) {
      if (!closure.unlocked.count(location.id)) missing.push_back(location.id);
    }
    check("locations-reachable", missing.empty(), "unreachable: " + join_ids(missing));
  }

  auto npc_reachable = [&](const EntityId& id) {
    const auto* npc = spec.npc(id);
    return npc && closure.known.count(id) && closure.unlocked.count(npc->home);
  };

  if (!mystery) {
    check("goal-reachable", spec.goal && npc_reachable(*spec.goal),
          spec.goal ? spec.goal->iri() + " cannot be reached" : "no goal");
    return report;
  }

  check("exactly-one-culprit", spec.suspects.culprit_flags() == 1,
        std::to_string(spec.suspects.culprit_flags()) + " culprit flags");
  {
    const auto ids = spec.suspects.ids();
    std::set<EntityId> distinct(ids.begin(), ids.end());
    bool ok = ids.size() >= 2 && distinct.size() == ids.size();
    for (const auto& id : ids) {
      const auto it = spec.bundle.find(id);
      ok = ok && it != spec.bundle.end() && it->second.kind == EntityKind::kPerson && spec.npc(id) && id != spec.victim;
    }
    check("suspects-valid", ok, "suspects must be at least two distinct bundled person NPCs");
  }
  {
    std::vector<EntityId> missing;
    for (const auto& id : spec.suspects.ids()) {
      if (!npc_reachable(id)) missing.push_back(id);
    }
    check("suspects-reachable", missing.empty(), "unreachable: " + join_ids(missing));
  }

  if (spec.mode == GameMode::kWikimystery) {
    bool ok = spec.evidence.size() + 1 == spec.suspects.members.size();
    std::string detail = std::to_string(spec.evidence.size()) + " evidence items for " +
                         std::to_string(spec.suspects.members.size()) + " suspects";
    for (const auto& innocent : spec.suspects.innocents()) {
      const auto count = std::count_if(spec.evidence.begin(), spec.evidence.end(),
                                       [&](const EvidenceItem& e) { return e.about == innocent; });
      if (count != 1) {
        ok = false;
        detail = innocent.iri() + " has " + std::to_string(count) + " evidence items";
      }
    }
    for (const auto& item : spec.evidence) {
      if (!spec.suspects.contains(item.about) || spec.suspects.culprit() == item.about ||
          item.fact.subject != item.about || !spec.location(item.placed_at)) {
        ok = false;
        detail = item.id.iri() + " is malformed";
      }
    }
    check("evidence-per-innocent", ok, detail);
    std::vector<EntityId> missing;
    for (const auto& item : spec.evidence) {
      if (!closure.reachable_evidence.count(item.id)) missing.push_back(item.id);
    }
    check("evidence-reachable", missing.empty(), "unreachable: " + join_ids(missing));
  } else {
    std::vector<EntityId> liars;
    for (const auto& npc : spec.npcs) {
      const bool lies = std::any_of(npc.dialog.lines.begin(), npc.dialog.lines.end(), [&](const DialogLine& line) {
        return line.claim && contradicts(spec, *line.claim);
      });
      if (lies) liars.push_back(npc.entity);
    }
    const bool unique = spec.lie && liars.size() == 1 && liars.front() == spec.lie->culprit &&
                        spec.suspects.culprit() == spec.lie->culprit;
    check("lie-unique", unique, "contradicting NPCs: " + (liars.empty() ? std::string("none") : join_ids(liars)));
    bool collectible = false;
    if (spec.lie && !contradicts(spec, spec.lie->truth)) {
      for (const auto& record : spec.clue_chain) {
        if (record.kind == ClueKind::kFact && record.fact && same_claim(*record.fact, spec.lie->truth) &&
            closure.clues.count(record.id)) {
          collectible = true;
        }
      }
    }
    check("truth-collectible", collectible, "the true fact behind the lie cannot be collected");
  }
  return report;
}

// ------------------------------------------------------------------ feedback

std::string_view feedback_kind_name(FeedbackKind kind) { return kind == FeedbackKind::kReport ? "report" : "unsolved"; }

std::optional<FeedbackKind> parse_feedback_kind(std::string_view name) {
  if (name == "report") return FeedbackKind::kReport;
  if (name == "unsolved") return FeedbackKind::kUnsolved;
  return std::nullopt;
}

ExclusionList FeedbackLedger::record(const EntityId& suspect, FeedbackKind kind, const std::string& game_id) {
  std::lock_guard lock(mutex_);
  const std::string row = utc_now_iso8601() + "\t" + std::string(feedback_kind_name(kind)) + "\t" + suspect.iri() +
                          "\t" + (game_id.empty() ? "-" : game_id) + "\n";
  std::error_code ec;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw Error(ErrorCode::kStorageUnavailable, "cannot open " + path_.string() + ": " + std::strerror(errno),
                "feedback");
  }
  bool ok = ::flock(fd, LOCK_EX) == 0;
  std::size_t written = 0;
  while (ok && written < row.size()) {
    const ssize_t n = ::write(fd, row.data() + written, row.size() - written);
    if (n < 0 && errno == EINTR) continue;
    ok = n > 0;
    if (ok) written += static_cast<std::size_t>(n);
  }
  ok = ok && ::fsync(fd) == 0;
  ::flock(fd, LOCK_UN);
  ::close(fd);
  if (!ok) throw Error(ErrorCode::kStorageUnavailable, "cannot append to " + path_.string(), "feedback");
  return exclusions();
}

std::vector<FeedbackRow> FeedbackLedger::rows() const {
  std::vector<FeedbackRow> out;
  std::ifstream in(path_);
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream split(line);
    for (std::string field; std::getline(split, field, '\t');) fields.push_back(field);
    const auto kind = fields.size() == 4 ? parse_feedback_kind(fields[1]) : std::nullopt;
    if (!kind || !is_utc_timestamp(fields[0]) || !EntityId::is_valid(fields[2])) {
      throw Error(ErrorCode::kParseError, path_.string() + ":" + std::to_string(line_no) + ": malformed ledger row",
                  "feedback");
    }
    out.push_back({fields[0], *kind, EntityId(fields[2]), fields[3] == "-" ? std::string() : fields[3]});
  }
  return out;
}

ExclusionList FeedbackLedger::exclusions() const {
  ExclusionList out;
  for (const auto& row : rows()) out.insert(row.suspect);
  return out;
}

}  // namespace forge
