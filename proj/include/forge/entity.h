#pragma once

// Normalized linked-data records: entities, their predicate/object facts with
// provenance, image candidates and clipped map extracts.

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "forge/canonical.h"

namespace forge {

// Absolute IRI naming one article/resource.
class EntityId {
 public:
  EntityId() = default;
  explicit EntityId(std::string iri);

  // scheme ":" rest, scheme = ALPHA *(ALPHA / DIGIT / "+" / "-" / "."), rest
  // non-empty without whitespace, control characters, or <>"{}|\^`.
  static bool is_valid(std::string_view iri);

  const std::string& iri() const { return iri_; }
  bool empty() const { return iri_.empty(); }

  auto operator<=>(const EntityId&) const = default;

 private:
  std::string iri_;
};

enum class Predicate {
  kBirthDate,
  kDeathDate,
  kOccupation,
  kBirthPlace,
  kSpouse,
  kColleague,
  kKnownFor,
  kLocatedIn,
  kCreatorOf,
  kGenericLink,
};

inline constexpr Predicate kAllPredicates[] = {
    Predicate::kBirthDate,  Predicate::kDeathDate, Predicate::kOccupation, Predicate::kBirthPlace,
    Predicate::kSpouse,     Predicate::kColleague, Predicate::kKnownFor,   Predicate::kLocatedIn,
    Predicate::kCreatorOf,  Predicate::kGenericLink,
};

std::string_view predicate_name(Predicate predicate);
// Exact vocabulary name ("birth-date", ...); nullopt otherwise.
std::optional<Predicate> parse_predicate(std::string_view name);

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  static bool is_leap(int year);
  static int days_in_month(int year, int month);
  // "YYYY-MM-DD" (four-digit year, no sign) with calendar validation.
  static std::optional<Date> parse(std::string_view text);
  std::string str() const;
  auto operator<=>(const Date&) const = default;
};

enum class LiteralType { kText, kDate, kNumber };

struct Literal {
  std::string value;
  LiteralType type = LiteralType::kText;
  auto operator<=>(const Literal&) const = default;
};

using FactObject = std::variant<EntityId, Literal>;

enum class Repository { kWikipedia, kDbpedia, kCommons, kOsm, kFixture };

std::string_view repository_name(Repository repository);

struct SourceRecord {
  Repository repository = Repository::kFixture;
  std::string retrieved_at;  // UTC "YYYY-MM-DDTHH:MM:SSZ"
  std::string source_ref;    // endpoint URL, or fixture file path
  auto operator<=>(const SourceRecord&) const = default;
};

struct Fact {
  EntityId subject;
  Predicate predicate = Predicate::kGenericLink;
  // Source-side predicate name before normalization ("birthDate", "gender").
  // Theme filters match generic-link facts through it.
  std::string raw_predicate;
  FactObject object;
  SourceRecord provenance;

  bool operator==(const Fact&) const = default;
};

// Canonical order of facts inside an entity record.
bool fact_less(const Fact& a, const Fact& b);
// Same subject, predicate and object; provenance ignored.
bool same_claim(const Fact& a, const Fact& b);
const EntityId* object_entity(const Fact& fact);
const Literal* object_literal(const Fact& fact);

enum class EntityKind { kPerson, kPlace, kWork, kOrganization, kOther };

std::string_view entity_kind_name(EntityKind kind);

struct ImageCandidate {
  std::string url;
  std::string caption;
  double confidence = 0.0;

  static constexpr double kFlagThreshold = 0.5;
  bool flagged() const { return confidence < kFlagThreshold; }
};

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  bool operator==(const GeoPoint&) const = default;
};

struct Entity {
  EntityId id;
  std::string label;
  EntityKind kind = EntityKind::kOther;
  std::vector<Fact> facts;
  std::vector<ImageCandidate> images;
  std::optional<GeoPoint> geo;

  std::vector<const Fact*> facts_with(Predicate predicate) const;
};

// Sorts facts and images into canonical order and checks every invariant;
// raises kParseError naming `origin` on violation.
void normalize_entity(Entity& entity, const std::string& origin);

// Lowercased, punctuation-stripped whitespace tokens.
std::vector<std::string> label_tokens(std::string_view text);
// |tokens(caption) n tokens(label)| / |tokens(label)| over distinct tokens.
double caption_confidence(std::string_view caption, std::string_view label);

enum class FeatureKind { kRoad, kBuilding, kWater, kLandmark };

std::string_view feature_kind_name(FeatureKind kind);

struct MapFeature {
  FeatureKind kind = FeatureKind::kLandmark;
  std::string name;
  std::vector<GeoPoint> points;
};

struct BoundingBox {
  double min_lat = 0.0;
  double min_lon = 0.0;
  double max_lat = 0.0;
  double max_lon = 0.0;

  bool contains(const GeoPoint& p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
  }
};

struct MapExtract {
  EntityId place;
  BoundingBox box;
  std::vector<MapFeature> features;
};

Json fact_to_json(const Fact& fact);
Fact fact_from_json(const Json& json, const std::string& origin);
Json entity_to_json(const Entity& entity);
// Parses and normalizes. Image confidences are recomputed from the label.
Entity entity_from_json(const Json& json, const std::string& origin);
Json map_extract_to_json(const MapExtract& extract);
MapExtract map_extract_from_json(const Json& json, const std::string& origin);
Json feature_to_json(const MapFeature& feature);
MapFeature feature_from_json(const Json& json, const std::string& origin);

// Renders the object as dialog text: the literal value, or the label supplied
// by `label_of` for entity objects.
template <typename LabelFn>
std::string object_text(const Fact& fact, LabelFn&& label_of) {
  if (const auto* literal = object_literal(fact)) return literal->value;
  return label_of(*object_entity(fact));
}

}  // namespace forge
