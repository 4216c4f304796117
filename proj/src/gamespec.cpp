#include "forge/gamespec.h"

#include <algorithm>

#include "forge/error.h"

namespace forge {

std::string_view game_mode_name(GameMode mode) {
  switch (mode) {
    case GameMode::kLinkpath: return "linkpath";
    case GameMode::kWikimystery: return "wikimystery";
    case GameMode::kDataAgent: return "data-agent";
  }
  return "wikimystery";
}

std::optional<GameMode> parse_game_mode(std::string_view name) {
  for (GameMode m : {GameMode::kLinkpath, GameMode::kWikimystery, GameMode::kDataAgent}) {
    if (game_mode_name(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view fidelity_name(Fidelity fidelity) {
  return fidelity == Fidelity::kVerbatim ? "verbatim" : "template";
}

std::optional<Fidelity> parse_fidelity(std::string_view name) {
  if (name == "verbatim") return Fidelity::kVerbatim;
  if (name == "template") return Fidelity::kTemplate;
  return std::nullopt;
}

std::string_view transform_kind_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::kVerbatim: return "verbatim";
    case TransformKind::kTemplate: return "template";
    case TransformKind::kAltered: return "altered";
  }
  return "template";
}

std::string_view topic_name(Topic topic) {
  switch (topic) {
    case Topic::kGreeting: return "greeting";
    case Topic::kSelfFact: return "self-fact";
    case Topic::kSuspectHint: return "suspect-hint";
    case Topic::kClue: return "clue";
    case Topic::kLie: return "lie";
  }
  return "greeting";
}

std::optional<Topic> parse_topic(std::string_view name) {
  for (Topic t : {Topic::kGreeting, Topic::kSelfFact, Topic::kSuspectHint, Topic::kClue, Topic::kLie}) {
    if (topic_name(t) == name) return t;
  }
  return std::nullopt;
}

std::string_view clue_kind_name(ClueKind kind) { return kind == ClueKind::kLink ? "link" : "fact"; }

std::vector<EntityId> SuspectSet::ids() const {
  std::vector<EntityId> out;
  for (const auto& member : members) out.push_back(member.id);
  return out;
}

std::optional<EntityId> SuspectSet::culprit() const {
  if (culprit_flags() != 1) return std::nullopt;
  for (const auto& member : members) {
    if (member.culprit) return member.id;
  }
  return std::nullopt;
}

std::size_t SuspectSet::culprit_flags() const {
  return static_cast<std::size_t>(std::count_if(members.begin(), members.end(), [](const auto& m) { return m.culprit; }));
}

std::vector<EntityId> SuspectSet::innocents() const {
  std::vector<EntityId> out;
  for (const auto& member : members) {
    if (!member.culprit) out.push_back(member.id);
  }
  return out;
}

bool SuspectSet::contains(const EntityId& id) const {
  return std::any_of(members.begin(), members.end(), [&](const auto& m) { return m.id == id; });
}

const NpcRecord* GameSpec::npc(const EntityId& id) const {
  for (const auto& record : npcs) {
    if (record.entity == id) return &record;
  }
  return nullptr;
}

const ItemRecord* GameSpec::item(const EntityId& id) const {
  for (const auto& record : items) {
    if (record.id == id) return &record;
  }
  return nullptr;
}

const ClueRecord* GameSpec::clue(const EntityId& id) const {
  for (const auto& record : clue_chain) {
    if (record.id == id) return &record;
  }
  return nullptr;
}

const EvidenceItem* GameSpec::evidence_item(const EntityId& id) const {
  for (const auto& record : evidence) {
    if (record.id == id) return &record;
  }
  return nullptr;
}

const Location* GameSpec::location(const EntityId& id) const {
  for (const auto& record : locations) {
    if (record.id == id) return &record;
  }
  return nullptr;
}

std::string GameSpec::label_of(const EntityId& id) const {
  const auto it = bundle.find(id);
  return it == bundle.end() ? id.iri() : it->second.label;
}

EntityId clue_id(std::size_t n) { return EntityId("urn:forge:clue:" + std::to_string(n)); }
EntityId evidence_id(std::size_t n) { return EntityId("urn:forge:evidence:" + std::to_string(n)); }

namespace {

Json optional_id(const std::optional<EntityId>& id) { return id ? Json(id->iri()) : Json(nullptr); }

EntityId parse_id(const Json& json, std::string_view key, const std::string& origin) {
  const std::string iri = require_string(json, key, origin);
  if (!EntityId::is_valid(iri)) {
    throw Error(ErrorCode::kParseError, origin + ": field '" + std::string(key) + "' is not an IRI");
  }
  return EntityId(iri);
}

std::optional<EntityId> parse_optional_id(const Json& json, std::string_view key, const std::string& origin) {
  const Json& value = require(json, key, origin);
  if (value.is_null()) return std::nullopt;
  return parse_id(json, key, origin);
}

Json images_to_json(const std::vector<ImageCandidate>& images) {
  Json out = Json::array();
  for (const auto& image : images) {
    Json item = Json::object();
    item["url"] = image.url;
    item["caption"] = image.caption;
    item["confidence"] = image.confidence;
    item["flagged"] = image.flagged();
    out.push_back(std::move(item));
  }
  return out;
}

Json line_to_json(const DialogLine& line) {
  Json out = Json::object();
  out["topic"] = topic_name(line.topic);
  out["text"] = line.text;
  Json facts = Json::array();
  for (const auto& fact : line.source_facts) facts.push_back(fact_to_json(fact));
  out["source_facts"] = std::move(facts);
  out["claim"] = line.claim ? fact_to_json(*line.claim) : Json(nullptr);
  Json record = Json::object();
  record["kind"] = transform_kind_name(line.transformation.kind);
  record["source_text"] = line.transformation.source_text;
  record["similarity"] = line.transformation.similarity;
  out["transformation"] = std::move(record);
  out["reveals"] = optional_id(line.reveals);
  return out;
}

DialogLine line_from_json(const Json& json, const std::string& origin) {
  DialogLine line;
  const auto topic = parse_topic(require_string(json, "topic", origin));
  if (!topic) throw Error(ErrorCode::kParseError, origin + ": unknown dialog topic");
  line.topic = *topic;
  line.text = require_string(json, "text", origin);
  for (const auto& fact : require_array(json, "source_facts", origin)) {
    line.source_facts.push_back(fact_from_json(fact, origin));
  }
  if (const Json& claim = require(json, "claim", origin); !claim.is_null()) {
    line.claim = fact_from_json(claim, origin);
  }
  const Json& record = require(json, "transformation", origin);
  const std::string kind = require_string(record, "kind", origin);
  if (kind == "verbatim") line.transformation.kind = TransformKind::kVerbatim;
  else if (kind == "template") line.transformation.kind = TransformKind::kTemplate;
  else if (kind == "altered") line.transformation.kind = TransformKind::kAltered;
  else throw Error(ErrorCode::kParseError, origin + ": unknown transformation kind");
  line.transformation.source_text = require_string(record, "source_text", origin);
  line.transformation.similarity = require_number(record, "similarity", origin);
  line.reveals = parse_optional_id(json, "reveals", origin);
  return line;
}

Json path_to_json(const ArticlePath& path) {
  Json out = Json::object();
  Json nodes = Json::array();
  for (const auto& node : path.nodes) nodes.push_back(node.iri());
  out["nodes"] = std::move(nodes);
  Json edges = Json::array();
  for (Predicate p : path.edges) edges.push_back(predicate_name(p));
  out["edges"] = std::move(edges);
  return out;
}

}  // namespace

Json suspect_set_to_json(const SuspectSet& set) {
  Json out = Json::object();
  Json members = Json::array();
  for (const auto& member : set.members) {
    Json item = Json::object();
    item["id"] = member.id.iri();
    item["culprit"] = member.culprit;
    members.push_back(std::move(item));
  }
  out["members"] = std::move(members);
  out["fitness"] = set.fitness;
  return out;
}

Json dialog_script_to_json(const DialogScript& script) {
  Json out = Json::object();
  out["npc"] = script.npc.iri();
  Json lines = Json::array();
  for (const auto& line : script.lines) lines.push_back(line_to_json(line));
  out["lines"] = std::move(lines);
  return out;
}

Json game_spec_to_json(const GameSpec& spec) {
  Json out = Json::object();
  out["format"] = "forge-game 1";
  out["generator_version"] = spec.generator_version;
  out["mode"] = game_mode_name(spec.mode);
  out["seed"] = spec.seed;
  out["config"] = spec.config;
  out["victim"] = spec.victim.iri();
  out["goal"] = optional_id(spec.goal);
  out["suspects"] = suspect_set_to_json(spec.suspects);
  out["start"] = spec.start.iri();

  Json paths = Json::array();
  for (const auto& path : spec.paths) paths.push_back(path_to_json(path));
  out["paths"] = std::move(paths);

  Json locations = Json::array();
  for (const auto& location : spec.locations) {
    Json item = Json::object();
    item["id"] = location.id.iri();
    item["map"] = map_extract_to_json(location.map);
    locations.push_back(std::move(item));
  }
  out["locations"] = std::move(locations);

  Json npcs = Json::array();
  for (const auto& npc : spec.npcs) {
    Json item = Json::object();
    item["entity"] = npc.entity.iri();
    item["home"] = npc.home.iri();
    item["images"] = images_to_json(npc.images);
    item["dialog"] = dialog_script_to_json(npc.dialog);
    npcs.push_back(std::move(item));
  }
  out["npcs"] = std::move(npcs);

  Json items = Json::array();
  for (const auto& record : spec.items) {
    Json item = Json::object();
    item["id"] = record.id.iri();
    item["entity"] = record.entity.iri();
    item["location"] = record.location.iri();
    item["text"] = record.text;
    Json reveals = Json::array();
    for (const auto& id : record.reveals) reveals.push_back(id.iri());
    item["reveals"] = std::move(reveals);
    items.push_back(std::move(item));
  }
  out["items"] = std::move(items);

  Json chain = Json::array();
  for (const auto& clue : spec.clue_chain) {
    Json item = Json::object();
    item["id"] = clue.id.iri();
    item["kind"] = clue_kind_name(clue.kind);
    item["at_location"] = clue.at_location.iri();
    item["giver"] = clue.giver.iri();
    item["about"] = clue.about.iri();
    item["element"] = optional_id(clue.element);
    item["unlocks"] = optional_id(clue.unlocks);
    item["fact"] = clue.fact ? fact_to_json(*clue.fact) : Json(nullptr);
    item["evidence"] = optional_id(clue.evidence);
    item["text"] = clue.text;
    chain.push_back(std::move(item));
  }
  out["clue_chain"] = std::move(chain);

  Json evidence = Json::array();
  for (const auto& record : spec.evidence) {
    Json item = Json::object();
    item["id"] = record.id.iri();
    item["about"] = record.about.iri();
    item["fact"] = fact_to_json(record.fact);
    item["placed_at"] = record.placed_at.iri();
    item["text"] = record.text;
    evidence.push_back(std::move(item));
  }
  out["evidence"] = std::move(evidence);

  if (spec.lie) {
    Json lie = Json::object();
    lie["culprit"] = spec.lie->culprit.iri();
    lie["truth"] = fact_to_json(spec.lie->truth);
    lie["altered"] = fact_to_json(spec.lie->altered);
    out["lie"] = std::move(lie);
  } else {
    out["lie"] = nullptr;
  }

  Json bundle = Json::array();
  for (const auto& [id, entity] : spec.bundle) bundle.push_back(entity_to_json(entity));
  out["bundle"] = std::move(bundle);
  return out;
}

GameSpec game_spec_from_json(const Json& json, const std::string& origin) {
  if (require_string(json, "format", origin) != "forge-game 1") {
    throw Error(ErrorCode::kParseError, origin + ": unsupported game format");
  }
  GameSpec spec;
  spec.generator_version = require_string(json, "generator_version", origin);
  const auto mode = parse_game_mode(require_string(json, "mode", origin));
  if (!mode) throw Error(ErrorCode::kParseError, origin + ": unknown mode");
  spec.mode = *mode;
  const Json& seed = require(json, "seed", origin);
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    throw Error(ErrorCode::kParseError, origin + ": seed must be an integer");
  }
  spec.seed = seed.get<std::uint64_t>();
  spec.config = require(json, "config", origin);
  spec.victim = parse_id(json, "victim", origin);
  spec.goal = parse_optional_id(json, "goal", origin);

  const Json& suspects = require(json, "suspects", origin);
  for (const auto& member : require_array(suspects, "members", origin)) {
    const Json& flag = require(member, "culprit", origin);
    if (!flag.is_boolean()) throw Error(ErrorCode::kParseError, origin + ": culprit flag must be boolean");
    spec.suspects.members.push_back({parse_id(member, "id", origin), flag.get<bool>()});
  }
  spec.suspects.fitness = require_number(suspects, "fitness", origin);
  spec.start = parse_id(json, "start", origin);

  for (const auto& path : require_array(json, "paths", origin)) {
    ArticlePath parsed;
    for (const auto& node : require_array(path, "nodes", origin)) {
      if (!node.is_string() || !EntityId::is_valid(node.get<std::string>())) {
        throw Error(ErrorCode::kParseError, origin + ": bad path node");
      }
      parsed.nodes.emplace_back(node.get<std::string>());
    }
    for (const auto& edge : require_array(path, "edges", origin)) {
      const auto predicate = edge.is_string() ? parse_predicate(edge.get<std::string>()) : std::nullopt;
      if (!predicate) throw Error(ErrorCode::kParseError, origin + ": bad path edge");
      parsed.edges.push_back(*predicate);
    }
    spec.paths.push_back(std::move(parsed));
  }

  for (const auto& location : require_array(json, "locations", origin)) {
    spec.locations.push_back({parse_id(location, "id", origin), map_extract_from_json(require(location, "map", origin), origin)});
  }

  for (const auto& npc : require_array(json, "npcs", origin)) {
    NpcRecord record;
    record.entity = parse_id(npc, "entity", origin);
    record.home = parse_id(npc, "home", origin);
    for (const auto& image : require_array(npc, "images", origin)) {
      record.images.push_back({require_string(image, "url", origin), require_string(image, "caption", origin),
                               require_number(image, "confidence", origin)});
    }
    const Json& dialog = require(npc, "dialog", origin);
    record.dialog.npc = parse_id(dialog, "npc", origin);
    for (const auto& line : require_array(dialog, "lines", origin)) {
      record.dialog.lines.push_back(line_from_json(line, origin));
    }
    spec.npcs.push_back(std::move(record));
  }

  for (const auto& item : require_array(json, "items", origin)) {
    ItemRecord record;
    record.id = parse_id(item, "id", origin);
    record.entity = parse_id(item, "entity", origin);
    record.location = parse_id(item, "location", origin);
    record.text = require_string(item, "text", origin);
    for (const auto& id : require_array(item, "reveals", origin)) {
      if (!id.is_string() || !EntityId::is_valid(id.get<std::string>())) {
        throw Error(ErrorCode::kParseError, origin + ": bad item reveal id");
      }
      record.reveals.emplace_back(id.get<std::string>());
    }
    spec.items.push_back(std::move(record));
  }

  for (const auto& clue : require_array(json, "clue_chain", origin)) {
    ClueRecord record;
    record.id = parse_id(clue, "id", origin);
    const std::string kind = require_string(clue, "kind", origin);
    if (kind == "link") record.kind = ClueKind::kLink;
    else if (kind == "fact") record.kind = ClueKind::kFact;
    else throw Error(ErrorCode::kParseError, origin + ": unknown clue kind");
    record.at_location = parse_id(clue, "at_location", origin);
    record.giver = parse_id(clue, "giver", origin);
    record.about = parse_id(clue, "about", origin);
    record.element = parse_optional_id(clue, "element", origin);
    record.unlocks = parse_optional_id(clue, "unlocks", origin);
    if (const Json& fact = require(clue, "fact", origin); !fact.is_null()) record.fact = fact_from_json(fact, origin);
    record.evidence = parse_optional_id(clue, "evidence", origin);
    record.text = require_string(clue, "text", origin);
    spec.clue_chain.push_back(std::move(record));
  }

  for (const auto& item : require_array(json, "evidence", origin)) {
    spec.evidence.push_back({parse_id(item, "id", origin), parse_id(item, "about", origin),
                             fact_from_json(require(item, "fact", origin), origin), parse_id(item, "placed_at", origin),
                             require_string(item, "text", origin)});
  }

  if (const Json& lie = require(json, "lie", origin); !lie.is_null()) {
    spec.lie = LiedFact{fact_from_json(require(lie, "truth", origin), origin),
                        fact_from_json(require(lie, "altered", origin), origin), parse_id(lie, "culprit", origin)};
  }

  for (const auto& entity : require_array(json, "bundle", origin)) {
    Entity parsed = entity_from_json(entity, origin);
    spec.bundle.emplace(parsed.id, std::move(parsed));
  }
  return spec;
}

std::string serialize_game_spec(const GameSpec& spec) { return canonical_dump(game_spec_to_json(spec)); }

GameSpec parse_game_spec(std::string_view text, const std::string& origin) {
  return game_spec_from_json(parse_json(text, origin), origin);
}

std::string game_spec_id(const GameSpec& spec) { return sha256_hex(serialize_game_spec(spec)).substr(0, 16); }

}  // namespace forge
