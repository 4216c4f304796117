#pragma once

// The generated adventure and its canonical, self-contained file form.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forge/entity.h"
#include "forge/graph.h"

namespace forge {

enum class GameMode { kLinkpath, kWikimystery, kDataAgent };

std::string_view game_mode_name(GameMode mode);
std::optional<GameMode> parse_game_mode(std::string_view name);

enum class Fidelity { kVerbatim, kTemplate };

std::string_view fidelity_name(Fidelity fidelity);
std::optional<Fidelity> parse_fidelity(std::string_view name);

struct Suspect {
  EntityId id;
  bool culprit = false;
  bool operator==(const Suspect&) const = default;
};

struct SuspectSet {
  std::vector<Suspect> members;  // sorted by IRI
  double fitness = 0.0;

  std::vector<EntityId> ids() const;
  // The flagged member when exactly one is flagged.
  std::optional<EntityId> culprit() const;
  std::size_t culprit_flags() const;
  std::vector<EntityId> innocents() const;
  bool contains(const EntityId& id) const;
};

struct EvidenceItem {
  EntityId id;  // urn:forge:evidence:<n>
  EntityId about;
  Fact fact;
  EntityId placed_at;
  std::string text;
};

struct LiedFact {
  Fact truth;
  Fact altered;
  EntityId culprit;
};

enum class TransformKind { kVerbatim, kTemplate, kAltered };

std::string_view transform_kind_name(TransformKind kind);

struct TransformationRecord {
  TransformKind kind = TransformKind::kTemplate;
  std::string source_text;
  double similarity = 0.0;
};

enum class Topic { kGreeting, kSelfFact, kSuspectHint, kClue, kLie };

std::string_view topic_name(Topic topic);
std::optional<Topic> parse_topic(std::string_view name);

struct DialogLine {
  Topic topic = Topic::kGreeting;
  std::string text;
  std::vector<Fact> source_facts;
  // What the line asserts (differs from source for lies; absent for greetings).
  std::optional<Fact> claim;
  TransformationRecord transformation;
  // Clue record unlocked by hearing this line.
  std::optional<EntityId> reveals;
};

struct DialogScript {
  EntityId npc;
  std::vector<DialogLine> lines;
};

struct Location {
  EntityId id;
  MapExtract map;
};

struct NpcRecord {
  EntityId entity;
  EntityId home;
  DialogScript dialog;
  std::vector<ImageCandidate> images;
};

struct ItemRecord {
  EntityId id;      // the article IRI, or urn:forge:casefile
  EntityId entity;  // article the item is drawn from
  EntityId location;
  std::string text;
  std::vector<EntityId> reveals;  // clue ids revealed when collected
};

enum class ClueKind { kLink, kFact };

std::string_view clue_kind_name(ClueKind kind);

struct ClueRecord {
  EntityId id;  // urn:forge:clue:<n>
  ClueKind kind = ClueKind::kLink;
  EntityId at_location;
  EntityId giver;  // NPC entity or item id delivering the clue
  EntityId about;  // link: the article revealed; fact: the fact's subject
  // link: game element (NPC entity or item id) made discoverable.
  std::optional<EntityId> element;
  std::optional<EntityId> unlocks;
  // link: the graph edge fact joining giver's article and `about`;
  // fact: the revealed fact.
  std::optional<Fact> fact;
  std::optional<EntityId> evidence;
  std::string text;
};

struct GameSpec {
  GameMode mode = GameMode::kWikimystery;
  EntityId victim;  // the start person in linkpath mode
  std::optional<EntityId> goal;
  SuspectSet suspects;
  EntityId start;
  std::vector<ArticlePath> paths;
  std::vector<Location> locations;
  std::vector<NpcRecord> npcs;
  std::vector<ItemRecord> items;
  std::vector<ClueRecord> clue_chain;
  std::vector<EvidenceItem> evidence;
  std::optional<LiedFact> lie;
  std::uint64_t seed = 0;
  std::string generator_version;
  Json config = Json::object();
  std::map<EntityId, Entity> bundle;

  const NpcRecord* npc(const EntityId& id) const;
  const ItemRecord* item(const EntityId& id) const;
  const ClueRecord* clue(const EntityId& id) const;
  const EvidenceItem* evidence_item(const EntityId& id) const;
  const Location* location(const EntityId& id) const;
  std::string label_of(const EntityId& id) const;
};

inline constexpr const char* kGeneratorVersion = "forge-generator 1.0.0";
inline constexpr const char* kCaseFileId = "urn:forge:casefile";

EntityId clue_id(std::size_t n);
EntityId evidence_id(std::size_t n);

Json game_spec_to_json(const GameSpec& spec);
GameSpec game_spec_from_json(const Json& json, const std::string& origin);
std::string serialize_game_spec(const GameSpec& spec);
GameSpec parse_game_spec(std::string_view text, const std::string& origin);
// First 16 hex digits of the SHA-256 of the canonical serialization.
std::string game_spec_id(const GameSpec& spec);

Json suspect_set_to_json(const SuspectSet& set);
Json dialog_script_to_json(const DialogScript& script);

}  // namespace forge
