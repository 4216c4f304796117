#pragma once

// Plot generation: suspect pool and evolved suspect set, culprit, evidence of
// innocence, the culprit's lie, the clue chain, full game assembly and the
// solvability validator. Also the feedback ledger that excludes suspects from
// future pools.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forge/dialog.h"
#include "forge/gamespec.h"
#include "forge/graph.h"
#include "forge/ingest.h"

namespace forge {

// One required fact. For generic-link facts `qualifier` must equal the
// fact's raw predicate (e.g. "gender"); empty matches any.
struct FactConstraint {
  Predicate predicate = Predicate::kGenericLink;
  std::string qualifier;
  std::string value;  // literal value, or object IRI
};

struct ThemeFilter {
  std::vector<FactConstraint> constraints;
  // When set, some `date_predicate` fact must share this month and day.
  std::optional<Date> date;
  Predicate date_predicate = Predicate::kBirthDate;

  bool matches(const Entity& entity) const;
  Json to_json() const;
  static ThemeFilter from_json(const Json& json, const std::string& origin);
};

struct EvolutionParams {
  int population = 32;
  int generations = 100;
  int tournament = 3;
  int elitism = 2;
  double mutation_rate = 0.5;
};

struct GeneratorConfig {
  int k = 5;
  int pool_cap = 20;
  int depth = 2;
  int fan_out = kDefaultFanOut;
  int max_path_len = 6;
  int location_cap = 8;
  double map_radius_km = kDefaultMapRadiusKm;
  RelatednessWeights weights;
  EvolutionParams evolution;
  Fidelity fidelity = Fidelity::kTemplate;
  std::optional<ThemeFilter> theme;
  // Linkpath goal person (exact label); defaults to the farthest person.
  std::optional<std::string> goal;

  void validate() const;
  Json to_json() const;
  static GeneratorConfig from_json(const Json& json, const std::string& origin);
};

using ExclusionList = std::set<EntityId>;

// Persons in the graph (other than the victim) with relatedness > 0, not
// excluded, passing `filter`; sorted by (relatedness desc, IRI), capped.
// kPoolTooSmall when fewer than `k` remain.
std::vector<EntityId> build_suspect_pool(const KnowledgeGraph& graph, const EntityId& victim,
                                         const ThemeFilter* filter, const ExclusionList& excluded, int k,
                                         int pool_cap, const RelatednessWeights& weights = {});

// Relatedness scores the suspect search optimizes over.
struct SuspectPool {
  std::vector<EntityId> candidates;  // sorted by IRI
  std::vector<double> to_victim;
  std::vector<std::vector<double>> pairwise;

  static SuspectPool from_graph(const KnowledgeGraph& graph, const EntityId& victim,
                                std::vector<EntityId> candidates, const RelatednessWeights& weights = {});
  std::size_t size() const { return candidates.size(); }
};

// Mean pairwise relatedness (0 for a single member) plus mean relatedness to
// the victim. `members` are pool indices.
double suspect_fitness(const SuspectPool& pool, const std::vector<std::size_t>& members);

// Greedy baseline: repeatedly add the candidate maximizing fitness of the
// enlarged set (ties by IRI).
SuspectSet greedy_suspect_set(const SuspectPool& pool, int k);

// Generational search over k-subsets:
//  - population of `population` sorted index sets: the greedy baseline plus
//    seeded random subsets;
//  - `elitism` best survive; others are bred from two tournament winners
//    (`tournament` draws with replacement) by one-point crossover on the
//    sorted member lists, duplicates repaired with random outsiders, then
//    with probability `mutation_rate` one member is swapped for an outsider;
//  - individuals rank by fitness, ties by lexicographic member IRIs.
// Never worse than the greedy baseline. No culprit is flagged.
SuspectSet evolve_suspect_set(const SuspectPool& pool, int k, std::uint64_t seed, const EvolutionParams& params = {});

// Flags member Rng(derive_seed(seed, "culprit")).below(k) of the IRI-sorted
// members. kInvalidArgument if a culprit is already flagged.
SuspectSet assign_culprit(SuspectSet set, std::uint64_t seed);

// Usable evidence predicates, most preferred first.
inline constexpr Predicate kEvidencePreference[] = {Predicate::kBirthPlace, Predicate::kOccupation,
                                                    Predicate::kKnownFor, Predicate::kGenericLink};

// One item per innocent (IRI order). The fact is drawn (seeded) among the
// innocent's facts of the most preferred predicate it has; entity objects
// must have a label. Items go to distinct seeded-shuffled locations while
// they last, then wrap around. kInsufficientFacts / kInvalidArgument.
std::vector<EvidenceItem> assign_evidence(const SuspectSet& set, const KnowledgeGraph& graph,
                                          const std::vector<EntityId>& locations, std::uint64_t seed,
                                          const LabelFn& labels, Fidelity fidelity = Fidelity::kTemplate);

inline constexpr Predicate kLiablePredicates[] = {Predicate::kBirthDate, Predicate::kOccupation};

// Picks (seeded) one liable fact of the culprit and alters its object:
// dates move by a nonzero offset in [-3, 3] years keeping month and day
// (29 February becomes 28 February in a non-leap year); occupations swap to a
// different occupation object found elsewhere in the graph. kNoLiableFact.
LiedFact inject_lie(const Entity& culprit, const KnowledgeGraph& graph, std::uint64_t seed);

// Game layout decided before the chain is built.
struct ChainPlan {
  GameMode mode = GameMode::kWikimystery;
  EntityId victim;
  EntityId start;
  std::vector<EntityId> targets;  // suspects (or the linkpath goal), in order
  std::vector<EntityId> locations;
  std::optional<LiedFact> lie;
  // innocent -> evidence id (wikimystery)
  std::map<EntityId, EntityId> evidence_for;
  int max_path_len = 6;
};

struct ClueChain {
  std::vector<ArticlePath> paths;  // one per target
  std::vector<ClueRecord> records;
  std::map<EntityId, EntityId> host;     // article -> location of its game element
  std::map<EntityId, EntityId> element;  // article -> NPC entity / item id
};

// Converts the victim->target ArticlePaths into link records (one per
// distinct (giver, article) hop) and attaches the extra reveals: the
// evidence of each innocent rides on the record that first reveals them, and
// the true version of the lie follows the record that first reveals the
// culprit as a fact record given by the same giver. kNoPath.
ClueChain build_clue_chain(const KnowledgeGraph& graph, const ChainPlan& plan, const LabelFn& labels,
                           Fidelity fidelity = Fidelity::kTemplate);

// fetch -> graph -> pool -> evolve -> culprit -> locations -> evidence / lie
// -> clue chain -> dialogs -> validation. Errors carry the stage name.
// The victim name must match exactly one person's label.
GameSpec assemble_game(const DataSource& source, const std::string& victim_name, GameMode mode, std::uint64_t seed,
                       const GeneratorConfig& config, const ExclusionList& excluded = {});

struct BatchResult {
  std::uint64_t seed = 0;
  std::optional<GameSpec> spec;
  std::string error;  // "<stage>: <code>: <message>" when generation failed
};

// One game per seed, spread over `threads` workers (hardware concurrency
// when 0). Results are in seed order regardless of scheduling.
std::vector<BatchResult> generate_batch(const DataSource& source, const std::string& victim_name, GameMode mode,
                                        const std::vector<std::uint64_t>& seeds, const GeneratorConfig& config,
                                        const ExclusionList& excluded = {}, unsigned threads = 0);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool passed() const;
  const ValidationCheck* find(std::string_view name) const;
  Json to_json() const;
};

// Structural and reachability checks, computed by a fixed-point closure over
// the game spec's own records:
//   entities-resolvable, start-location, exactly-one-culprit, suspects-valid,
//   locations-reachable, suspects-reachable,
//   wikimystery: evidence-per-innocent, evidence-reachable,
//   data-agent: lie-unique, truth-collectible,
//   linkpath: goal-reachable.
ValidationReport validate_solvability(const GameSpec& spec);

enum class FeedbackKind { kReport, kUnsolved };

std::string_view feedback_kind_name(FeedbackKind kind);
std::optional<FeedbackKind> parse_feedback_kind(std::string_view name);

struct FeedbackRow {
  std::string timestamp;
  FeedbackKind kind = FeedbackKind::kReport;
  EntityId suspect;
  std::string game_id;
};

// Append-only ledger, one tab-separated row per line:
//   <timestamp>\t<kind>\t<suspect IRI>\t<game id or ->
// The exclusion list is the set of distinct suspects in it. Writers hold an
// exclusive flock on the file.
class FeedbackLedger {
 public:
  explicit FeedbackLedger(std::filesystem::path path) : path_(std::move(path)) {}

  // kStorageUnavailable when the file cannot be written.
  ExclusionList record(const EntityId& suspect, FeedbackKind kind, const std::string& game_id = {});
  std::vector<FeedbackRow> rows() const;
  ExclusionList exclusions() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
};

}  // namespace forge
