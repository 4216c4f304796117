#include "forge/entity.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <tuple>

#include "forge/error.h"

namespace forge {

EntityId::EntityId(std::string iri) : iri_(std::move(iri)) {
  if (!is_valid(iri_)) throw Error(ErrorCode::kInvalidArgument, "invalid IRI: '" + iri_ + "'");
}

bool EntityId::is_valid(std::string_view iri) {
  const auto colon = iri.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == iri.size()) return false;
  if (!std::isalpha(static_cast<unsigned char>(iri[0]))) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    const char c = iri[i];
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') return false;
  }
  for (std::size_t i = colon + 1; i < iri.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(iri[i]);
    if (c <= 0x20 || c == 0x7F) return false;
    if (std::string_view("<>\"{}|\\^`").find(static_cast<char>(c)) != std::string_view::npos) return false;
  }
  return true;
}

std::string_view predicate_name(Predicate predicate) {
  switch (predicate) {
    case Predicate::kBirthDate: return "birth-date";
    case Predicate::kDeathDate: return "death-date";
    case Predicate::kOccupation: return "occupation";
    case Predicate::kBirthPlace: return "birth-place";
    case Predicate::kSpouse: return "spouse";
    case Predicate::kColleague: return "colleague";
    case Predicate::kKnownFor: return "known-for";
    case Predicate::kLocatedIn: return "located-in";
    case Predicate::kCreatorOf: return "creator-of";
    case Predicate::kGenericLink: return "generic-link";
  }
  return "generic-link";
}

std::optional<Predicate> parse_predicate(std::string_view name) {
  for (Predicate p : kAllPredicates) {
    if (predicate_name(p) == name) return p;
  }
  return std::nullopt;
}

bool Date::is_leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

int Date::days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12) return 0;
  return month == 2 && is_leap(year) ? 29 : kDays[month - 1];
}

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto number = [&](std::size_t pos, std::size_t len, int& out) {
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
    }
    std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return true;
  };
  Date d;
  if (!number(0, 4, d.year) || !number(5, 2, d.month) || !number(8, 2, d.day)) return std::nullopt;
  if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return std::nullopt;
  return d;
}

std::string Date::str() const {
  char buffer[16];
  std::snprintf(buffer, sizeof buffer, "%04d-%02d-%02d", year, month, day);
  return buffer;
}

std::string_view repository_name(Repository repository) {
  switch (repository) {
    case Repository::kWikipedia: return "wikipedia";
    case Repository::kDbpedia: return "dbpedia";
    case Repository::kCommons: return "commons";
    case Repository::kOsm: return "osm";
    case Repository::kFixture: return "fixture";
  }
  return "fixture";
}

namespace {

std::optional<Repository> parse_repository(std::string_view name) {
  for (Repository r : {Repository::kWikipedia, Repository::kDbpedia, Repository::kCommons,
                       Repository::kOsm, Repository::kFixture}) {
    if (repository_name(r) == name) return r;
  }
  return std::nullopt;
}

std::string_view literal_type_name(LiteralType type) {
  switch (type) {
    case LiteralType::kText: return "text";
    case LiteralType::kDate: return "date";
    case LiteralType::kNumber: return "number";
  }
  return "text";
}

std::optional<LiteralType> parse_literal_type(std::string_view name) {
  for (LiteralType t : {LiteralType::kText, LiteralType::kDate, LiteralType::kNumber}) {
    if (literal_type_name(t) == name) return t;
  }
  return std::nullopt;
}

std::optional<EntityKind> parse_entity_kind(std::string_view name) {
  for (EntityKind k : {EntityKind::kPerson, EntityKind::kPlace, EntityKind::kWork,
                       EntityKind::kOrganization, EntityKind::kOther}) {
    if (entity_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::optional<FeatureKind> parse_feature_kind(std::string_view name) {
  for (FeatureKind k : {FeatureKind::kRoad, FeatureKind::kBuilding, FeatureKind::kWater,
                        FeatureKind::kLandmark}) {
    if (feature_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

auto object_key(const FactObject& object) {
  if (const auto* id = std::get_if<EntityId>(&object)) {
    return std::tuple(0, id->iri(), 0);
  }
  const auto& literal = std::get<Literal>(object);
  return std::tuple(1, literal.value, static_cast<int>(literal.type));
}

bool is_number_text(const std::string& text) {
  if (text.empty()) return false;
  double value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool looks_like_url(const std::string& ref) {
  return ref.rfind("http://", 0) == 0 || ref.rfind("https://", 0) == 0;
}

GeoPoint point_from_json(const Json& json, const std::string& origin) {
  if (!json.is_array() || json.size() != 2 || !json[0].is_number() || !json[1].is_number()) {
    throw Error(ErrorCode::kParseError, origin + ": point must be [lat, lon]");
  }
  return {json[0].get<double>(), json[1].get<double>()};
}

}  // namespace

bool fact_less(const Fact& a, const Fact& b) {
  if (a.predicate != b.predicate) return a.predicate < b.predicate;
  if (a.raw_predicate != b.raw_predicate) return a.raw_predicate < b.raw_predicate;
  return object_key(a.object) < object_key(b.object);
}

bool same_claim(const Fact& a, const Fact& b) {
  return a.subject == b.subject && a.predicate == b.predicate && a.object == b.object;
}

const EntityId* object_entity(const Fact& fact) { return std::get_if<EntityId>(&fact.object); }
const Literal* object_literal(const Fact& fact) { return std::get_if<Literal>(&fact.object); }

std::string_view entity_kind_name(EntityKind kind) {
  switch (kind) {
    case EntityKind::kPerson: return "person";
    case EntityKind::kPlace: return "place";
    case EntityKind::kWork: return "work";
    case EntityKind::kOrganization: return "organization";
    case EntityKind::kOther: return "other";
  }
  return "other";
}

std::string_view feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kRoad: return "road";
    case FeatureKind::kBuilding: return "building";
    case FeatureKind::kWater: return "water";
    case FeatureKind::kLandmark: return "landmark";
  }
  return "landmark";
}

std::vector<const Fact*> Entity::facts_with(Predicate predicate) const {
  std::vector<const Fact*> out;
  for (const auto& fact : facts) {
    if (fact.predicate == predicate) out.push_back(&fact);
  }
  return out;
}

std::vector<std::string> label_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else if (c >= 0x80 || std::isalnum(c)) {
      current += static_cast<char>(std::tolower(c));
    }
    // ASCII punctuation is dropped.
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double caption_confidence(std::string_view caption, std::string_view label) {
  const auto label_list = label_tokens(label);
  const std::set<std::string> label_set(label_list.begin(), label_list.end());
  if (label_set.empty()) return 0.0;
  const auto caption_list = label_tokens(caption);
  const std::set<std::string> caption_set(caption_list.begin(), caption_list.end());
  std::size_t shared = 0;
  for (const auto& token : label_set) shared += caption_set.count(token);
  return static_cast<double>(shared) / static_cast<double>(label_set.size());
}

void normalize_entity(Entity& entity, const std::string& origin) {
  auto fail = [&](const std::string& why) { throw Error(ErrorCode::kParseError, origin + ": " + why); };
  if (entity.id.empty()) fail("entity id is empty");
  if (entity.label.empty()) fail("label is empty");
  if (entity.kind == EntityKind::kPlace && !entity.geo) fail("place entity without geo");
  if (entity.geo && (entity.geo->lat < -90 || entity.geo->lat > 90 || entity.geo->lon < -180 ||
                     entity.geo->lon > 180)) {
    fail("geo coordinates out of range");
  }
  for (const auto& fact : entity.facts) {
    if (fact.subject != entity.id) fail("fact subject differs from entity id");
    if (const auto* literal = object_literal(fact)) {
      if (literal->type == LiteralType::kDate && !Date::parse(literal->value)) {
        fail("date literal '" + literal->value + "' is not an ISO-8601 calendar date");
      }
      if (literal->type == LiteralType::kNumber && !is_number_text(literal->value)) {
        fail("number literal '" + literal->value + "' does not parse");
      }
    }
    const auto& prov = fact.provenance;
    if (!is_utc_timestamp(prov.retrieved_at)) fail("provenance retrieved_at is not a UTC timestamp");
    if (prov.source_ref.empty()) fail("provenance source_ref is empty");
    if (prov.repository == Repository::kFixture && looks_like_url(prov.source_ref)) {
      fail("fixture provenance must carry a file path");
    }
    if (prov.repository != Repository::kFixture && !looks_like_url(prov.source_ref)) {
      fail("live provenance must carry a URL");
    }
  }
  std::stable_sort(entity.facts.begin(), entity.facts.end(), fact_less);
  entity.facts.erase(std::unique(entity.facts.begin(), entity.facts.end(),
                                 [](const Fact& a, const Fact& b) {
                                   return !fact_less(a, b) && !fact_less(b, a);
                                 }),
                     entity.facts.end());
  for (auto& image : entity.images) {
    image.confidence = caption_confidence(image.caption, entity.label);
  }
  std::sort(entity.images.begin(), entity.images.end(), [](const auto& a, const auto& b) {
    return std::tie(a.url, a.caption) < std::tie(b.url, b.caption);
  });
}

Json fact_to_json(const Fact& fact) {
  Json object = Json::object();
  if (const auto* id = object_entity(fact)) {
    object["type"] = "entity";
    object["id"] = id->iri();
  } else {
    const auto* literal = object_literal(fact);
    object["type"] = literal_type_name(literal->type);
    object["value"] = literal->value;
  }
  Json out = Json::object();
  out["subject"] = fact.subject.iri();
  out["predicate"] = predicate_name(fact.predicate);
  out["raw"] = fact.raw_predicate;
  out["object"] = std::move(object);
  Json prov = Json::object();
  prov["repository"] = repository_name(fact.provenance.repository);
  prov["retrieved_at"] = fact.provenance.retrieved_at;
  prov["source_ref"] = fact.provenance.source_ref;
  out["provenance"] = std::move(prov);
  return out;
}

Fact fact_from_json(const Json& json, const std::string& origin) {
  Fact fact;
  const std::string subject = require_string(json, "subject", origin);
  if (!EntityId::is_valid(subject)) throw Error(ErrorCode::kParseError, origin + ": invalid subject IRI");
  fact.subject = EntityId(subject);
  const std::string predicate = require_string(json, "predicate", origin);
  const auto parsed = parse_predicate(predicate);
  if (!parsed) throw Error(ErrorCode::kParseError, origin + ": unknown predicate '" + predicate + "'");
  fact.predicate = *parsed;
  fact.raw_predicate = require_string(json, "raw", origin);
  const Json& object = require(json, "object", origin);
  const std::string type = require_string(object, "type", origin);
  if (type == "entity") {
    const std::string id = require_string(object, "id", origin);
    if (!EntityId::is_valid(id)) throw Error(ErrorCode::kParseError, origin + ": invalid object IRI");
    fact.object = EntityId(id);
  } else if (const auto literal_type = parse_literal_type(type)) {
    fact.object = Literal{require_string(object, "value", origin), *literal_type};
  } else {
    throw Error(ErrorCode::kParseError, origin + ": unknown object type '" + type + "'");
  }
  const Json& prov = require(json, "provenance", origin);
  const auto repository = parse_repository(require_string(prov, "repository", origin));
  if (!repository) throw Error(ErrorCode::kParseError, origin + ": unknown repository");
  fact.provenance.repository = *repository;
  fact.provenance.retrieved_at = require_string(prov, "retrieved_at", origin);
  fact.provenance.source_ref = require_string(prov, "source_ref", origin);
  return fact;
}

Json entity_to_json(const Entity& entity) {
  Json out = Json::object();
  out["id"] = entity.id.iri();
  out["label"] = entity.label;
  out["kind"] = entity_kind_name(entity.kind);
  if (entity.geo) {
    Json geo = Json::object();
    geo["lat"] = entity.geo->lat;
    geo["lon"] = entity.geo->lon;
    out["geo"] = std::move(geo);
  } else {
    out["geo"] = nullptr;
  }
  Json facts = Json::array();
  for (const auto& fact : entity.facts) facts.push_back(fact_to_json(fact));
  out["facts"] = std::move(facts);
  Json images = Json::array();
  for (const auto& image : entity.images) {
    Json item = Json::object();
    item["url"] = image.url;
    item["caption"] = image.caption;
    images.push_back(std::move(item));
  }
  out["images"] = std::move(images);
  return out;
}

Entity entity_from_json(const Json& json, const std::string& origin) {
  Entity entity;
  const std::string id = require_string(json, "id", origin);
  if (!EntityId::is_valid(id)) throw Error(ErrorCode::kParseError, origin + ": invalid IRI '" + id + "'");
  entity.id = EntityId(id);
  entity.label = require_string(json, "label", origin);
  const std::string kind = require_string(json, "kind", origin);
  const auto parsed_kind = parse_entity_kind(kind);
  if (!parsed_kind) throw Error(ErrorCode::kParseError, origin + ": unknown kind '" + kind + "'");
  entity.kind = *parsed_kind;
  const Json& geo = require(json, "geo", origin);
  if (!geo.is_null()) {
    entity.geo = GeoPoint{require_number(geo, "lat", origin), require_number(geo, "lon", origin)};
  }
  for (const auto& fact : require_array(json, "facts", origin)) {
    entity.facts.push_back(fact_from_json(fact, origin));
  }
  for (const auto& image : require_array(json, "images", origin)) {
    entity.images.push_back({require_string(image, "url", origin), require_string(image, "caption", origin), 0.0});
  }
  normalize_entity(entity, origin);
  return entity;
}

Json feature_to_json(const MapFeature& feature) {
  Json out = Json::object();
  out["kind"] = feature_kind_name(feature.kind);
  out["name"] = feature.name;
  Json points = Json::array();
  for (const auto& p : feature.points) points.push_back(Json::array({p.lat, p.lon}));
  out["points"] = std::move(points);
  return out;
}

MapFeature feature_from_json(const Json& json, const std::string& origin) {
  MapFeature feature;
  const std::string kind = require_string(json, "kind", origin);
  const auto parsed = parse_feature_kind(kind);
  if (!parsed) throw Error(ErrorCode::kParseError, origin + ": unknown feature kind '" + kind + "'");
  feature.kind = *parsed;
  feature.name = require_string(json, "name", origin);
  for (const auto& point : require_array(json, "points", origin)) {
    feature.points.push_back(point_from_json(point, origin));
  }
  if (feature.points.empty()) throw Error(ErrorCode::kParseError, origin + ": feature without points");
  return feature;
}

Json map_extract_to_json(const MapExtract& extract) {
  Json out = Json::object();
  out["place"] = extract.place.iri();
  Json box = Json::object();
  box["min_lat"] = extract.box.min_lat;
  box["min_lon"] = extract.box.min_lon;
  box["max_lat"] = extract.box.max_lat;
  box["max_lon"] = extract.box.max_lon;
  out["bbox"] = std::move(box);
  Json features = Json::array();
  for (const auto& feature : extract.features) features.push_back(feature_to_json(feature));
  out["features"] = std::move(features);
  return out;
}

MapExtract map_extract_from_json(const Json& json, const std::string& origin) {
  MapExtract extract;
  const std::string place = require_string(json, "place", origin);
  if (!EntityId::is_valid(place)) throw Error(ErrorCode::kParseError, origin + ": invalid place IRI");
  extract.place = EntityId(place);
  const Json& box = require(json, "bbox", origin);
  extract.box = {require_number(box, "min_lat", origin), require_number(box, "min_lon", origin),
                 require_number(box, "max_lat", origin), require_number(box, "max_lon", origin)};
  if (!(extract.box.min_lat < extract.box.max_lat && extract.box.min_lon < extract.box.max_lon)) {
    throw Error(ErrorCode::kParseError, origin + ": bounding box is not well-ordered");
  }
  for (const auto& feature : require_array(json, "features", origin)) {
    extract.features.push_back(feature_from_json(feature, origin));
  }
  return extract;
}

}  // namespace forge
