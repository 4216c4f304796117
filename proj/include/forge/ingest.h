#pragma once

// Data acquisition: one DataSource interface with a fixture-corpus backend
// (deterministic, offline) and a live backend (see live.h).

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "forge/entity.h"

namespace forge {

enum class FetchMode { kLive, kFixture };

struct Neighbor {
  Predicate predicate = Predicate::kGenericLink;
  EntityId target;
  auto operator<=>(const Neighbor&) const = default;
};

using PredicateFilter = std::optional<std::set<Predicate>>;

class DataSource {
 public:
  virtual ~DataSource() = default;

  virtual FetchMode mode() const = 0;

  // Raises kNotFound for unknown ids, kMalformedSource for unparseable
  // responses and kNetworkUnreachable (live only).
  virtual Entity fetch_entity(const EntityId& id) const = 0;

  // Outgoing and incoming links, deduplicated on (predicate, target) and
  // sorted by it, optionally restricted to `filter`.
  virtual std::vector<Neighbor> fetch_neighbors(const EntityId& id, const PredicateFilter& filter) const = 0;

  // Raw (unclipped) map features near `place`.
  virtual std::vector<MapFeature> fetch_map_features(const Entity& place, const BoundingBox& box) const = 0;

  // Entities whose label equals `label` exactly.
  virtual std::vector<EntityId> find_by_label(std::string_view label) const = 0;
};

// Image candidates sorted by confidence (descending), ties by url then caption.
// Candidates below ImageCandidate::kFlagThreshold are kept; flagged() tells.
std::vector<ImageCandidate> fetch_image_candidates(const Entity& entity);

inline constexpr double kDefaultMapRadiusKm = 1.0;

// Square-ish box of `radius_km` around `center`; corners rounded to 1e-6 deg.
BoundingBox box_around(const GeoPoint& center, double radius_km);

// Polylines (roads, water) are clipped per segment and may split; polygons
// (buildings) are clipped as rings; landmarks are kept when inside. All output
// points are rounded to 1e-6 degrees and lie inside `box`.
std::vector<MapFeature> clip_features(const std::vector<MapFeature>& features, const BoundingBox& box);

// Box around the place's geo plus its clipped features. kNoGeo when the
// entity is not a place or has no coordinates.
MapExtract fetch_map_extract(const DataSource& source, const EntityId& place,
                             double radius_km = kDefaultMapRadiusKm);

// Raw map data for one place as stored in a fixture corpus.
struct MapFile {
  EntityId place;
  std::vector<MapFeature> features;
};

Json map_file_to_json(const MapFile& file);
MapFile map_file_from_json(const Json& json, const std::string& origin);

// Immutable, checksummed snapshot. Layout:
//   manifest                 "forge-corpus 1", counts, "<sha256> <relative path>" lines
//   entities/<pct-encoded IRI>
//   maps/<pct-encoded IRI>
class FixtureCorpus final : public DataSource {
 public:
  // kMissingManifest, kParseError ("<file>:<line>: ..."), kChecksumMismatch.
  static std::shared_ptr<const FixtureCorpus> load(const std::filesystem::path& dir);

  FetchMode mode() const override { return FetchMode::kFixture; }
  Entity fetch_entity(const EntityId& id) const override;
  std::vector<Neighbor> fetch_neighbors(const EntityId& id, const PredicateFilter& filter) const override;
  std::vector<MapFeature> fetch_map_features(const Entity& place, const BoundingBox& box) const override;
  std::vector<EntityId> find_by_label(std::string_view label) const override;

  std::size_t entity_count() const { return entities_.size(); }
  const std::map<EntityId, Entity>& entities() const { return entities_; }
  const std::filesystem::path& directory() const { return dir_; }

 private:
  FixtureCorpus() = default;

  std::filesystem::path dir_;
  std::map<EntityId, Entity> entities_;
  std::map<EntityId, std::vector<Neighbor>> incoming_;
  std::map<EntityId, MapFile> maps_;
};

inline std::shared_ptr<const FixtureCorpus> load_fixture_corpus(const std::filesystem::path& dir) {
  return FixtureCorpus::load(dir);
}

std::string entity_file_name(const EntityId& id);

// Writes entity and map files canonically plus a fresh manifest. Existing
// files in entities/ and maps/ that are not part of the new set are removed.
void write_corpus(const std::filesystem::path& dir, const std::vector<Entity>& entities,
                  const std::vector<MapFile>& maps);

// Re-reads every file under entities/ and maps/ (no manifest needed),
// rewrites them canonically and writes the manifest. Returns dangling
// entity references (objects that do not resolve inside the corpus).
std::vector<std::string> seal_corpus(const std::filesystem::path& dir);

}  // namespace forge
