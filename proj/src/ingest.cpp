#include "forge/ingest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "forge/error.h"

namespace forge {

namespace fs = std::filesystem;

namespace {

constexpr double kKmPerDegree = 111.32;
constexpr std::string_view kManifestHeader = "forge-corpus 1";

double round6(double value) { return std::round(value * 1e6) / 1e6; }

GeoPoint snap(const GeoPoint& p, const BoundingBox& box) {
  return {std::clamp(round6(p.lat), box.min_lat, box.max_lat),
          std::clamp(round6(p.lon), box.min_lon, box.max_lon)};
}

// Liang-Barsky; returns false when the segment misses the box.
bool clip_segment(GeoPoint& a, GeoPoint& b, const BoundingBox& box) {
  const double dx = b.lat - a.lat;
  const double dy = b.lon - a.lon;
  double t0 = 0.0;
  double t1 = 1.0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.lat - box.min_lat, box.max_lat - a.lat, a.lon - box.min_lon, box.max_lon - a.lon};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      if (t > t1) return false;
      t0 = std::max(t0, t);
    } else {
      if (t < t0) return false;
      t1 = std::min(t1, t);
    }
  }
  const GeoPoint start{a.lat + t0 * dx, a.lon + t0 * dy};
  const GeoPoint end{a.lat + t1 * dx, a.lon + t1 * dy};
  a = start;
  b = end;
  return true;
}

std::vector<std::vector<GeoPoint>> clip_polyline(const std::vector<GeoPoint>& points, const BoundingBox& box) {
  std::vector<std::vector<GeoPoint>> runs;
  if (points.size() == 1) {
    if (box.contains(points[0])) runs.push_back({snap(points[0], box)});
    return runs;
  }
  bool open = false;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    GeoPoint a = points[i];
    GeoPoint b = points[i + 1];
    const bool a_inside = box.contains(a);
    if (!clip_segment(a, b, box)) {
      open = false;
      continue;
    }
    if (!open || !a_inside) {
      runs.push_back({snap(a, box)});
    }
    runs.back().push_back(snap(b, box));
    // The run continues only if the segment ended inside the box.
    open = box.contains(points[i + 1]);
  }
  for (auto& run : runs) {
    run.erase(std::unique(run.begin(), run.end()), run.end());
  }
  std::erase_if(runs, [](const auto& run) { return run.size() < 2; });
  return runs;
}

std::vector<GeoPoint> clip_polygon(std::vector<GeoPoint> ring, const BoundingBox& box) {
  if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
  // Sutherland-Hodgman against each box edge.
  auto clip_edge = [](const std::vector<GeoPoint>& input, auto inside, auto intersect) {
    std::vector<GeoPoint> output;
    for (std::size_t i = 0; i < input.size(); ++i) {
      const GeoPoint& current = input[i];
      const GeoPoint& previous = input[(i + input.size() - 1) % input.size()];
      if (inside(current)) {
        if (!inside(previous)) output.push_back(intersect(previous, current));
        output.push_back(current);
      } else if (inside(previous)) {
        output.push_back(intersect(previous, current));
      }
    }
    return output;
  };
  auto at_lat = [](double lat) {
    return [lat](const GeoPoint& a, const GeoPoint& b) {
      const double t = (lat - a.lat) / (b.lat - a.lat);
      return GeoPoint{lat, a.lon + t * (b.lon - a.lon)};
    };
  };
  auto at_lon = [](double lon) {
    return [lon](const GeoPoint& a, const GeoPoint& b) {
      const double t = (lon - a.lon) / (b.lon - a.lon);
      return GeoPoint{a.lat + t * (b.lat - a.lat), lon};
    };
  };
  ring = clip_edge(ring, [&](const GeoPoint& p) { return p.lat >= box.min_lat; }, at_lat(box.min_lat));
  if (!ring.empty()) ring = clip_edge(ring, [&](const GeoPoint& p) { return p.lat <= box.max_lat; }, at_lat(box.max_lat));
  if (!ring.empty()) ring = clip_edge(ring, [&](const GeoPoint& p) { return p.lon >= box.min_lon; }, at_lon(box.min_lon));
  if (!ring.empty()) ring = clip_edge(ring, [&](const GeoPoint& p) { return p.lon <= box.max_lon; }, at_lon(box.max_lon));
  for (auto& p : ring) p = snap(p, box);
  ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
  if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
  if (ring.size() < 3) return {};
  ring.push_back(ring.front());
  return ring;
}

std::string manifest_text(const fs::path& dir, const std::vector<std::string>& files, std::size_t entity_count,
                          std::size_t map_count) {
  std::string out(kManifestHeader);
  out += "\nentities " + std::to_string(entity_count) + "\nmaps " + std::to_string(map_count) + "\n";
  for (const auto& file : files) {
    out += sha256_hex(read_file(dir / file)) + " " + file + "\n";
  }
  return out;
}

std::vector<std::string> list_files(const fs::path& dir) {
  std::vector<std::string> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (item.is_regular_file() && item.path().filename().string().find(".tmp-") == std::string::npos) {
      out.push_back(item.path().filename().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<ImageCandidate> fetch_image_candidates(const Entity& entity) {
  std::vector<ImageCandidate> candidates = entity.images;
  for (auto& candidate : candidates) {
    candidate.confidence = caption_confidence(candidate.caption, entity.label);
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return std::tie(a.url, a.caption) < std::tie(b.url, b.caption);
  });
  return candidates;
}

BoundingBox box_around(const GeoPoint& center, double radius_km) {
  if (!(radius_km > 0.0)) throw Error(ErrorCode::kInvalidArgument, "map radius must be positive");
  const double dlat = radius_km / kKmPerDegree;
  const double cos_lat = std::max(std::cos(center.lat * M_PI / 180.0), 0.01);
  const double dlon = radius_km / (kKmPerDegree * cos_lat);
  BoundingBox box{round6(std::max(center.lat - dlat, -90.0)), round6(std::max(center.lon - dlon, -180.0)),
                  round6(std::min(center.lat + dlat, 90.0)), round6(std::min(center.lon + dlon, 180.0))};
  return box;
}

std::vector<MapFeature> clip_features(const std::vector<MapFeature>& features, const BoundingBox& box) {
  std::vector<MapFeature> out;
  for (const auto& feature : features) {
    switch (feature.kind) {
      case FeatureKind::kRoad:
      case FeatureKind::kWater:
        for (auto& run : clip_polyline(feature.points, box)) {
          out.push_back({feature.kind, feature.name, std::move(run)});
        }
        break;
      case FeatureKind::kBuilding: {
        auto ring = clip_polygon(feature.points, box);
        if (!ring.empty()) out.push_back({feature.kind, feature.name, std::move(ring)});
        break;
      }
      case FeatureKind::kLandmark: {
        MapFeature kept{feature.kind, feature.name, {}};
        for (const auto& p : feature.points) {
          if (box.contains(p)) kept.points.push_back(snap(p, box));
        }
        if (!kept.points.empty()) out.push_back(std::move(kept));
        break;
      }
    }
  }
  return out;
}

MapExtract fetch_map_extract(const DataSource& source, const EntityId& place, double radius_km) {
  const Entity entity = source.fetch_entity(place);
  if (entity.kind != EntityKind::kPlace || !entity.geo) {
    throw Error(ErrorCode::kNoGeo, place.iri() + " is not a place with coordinates");
  }
  MapExtract extract;
  extract.place = place;
  extract.box = box_around(*entity.geo, radius_km);
  extract.features = clip_features(source.fetch_map_features(entity, extract.box), extract.box);
  return extract;
}

Json map_file_to_json(const MapFile& file) {
  Json out = Json::object();
  out["place"] = file.place.iri();
  Json features = Json::array();
  for (const auto& feature : file.features) features.push_back(feature_to_json(feature));
  out["features"] = std::move(features);
  return out;
}

MapFile map_file_from_json(const Json& json, const std::string& origin) {
  MapFile file;
  const std::string place = require_string(json, "place", origin);
  if (!EntityId::is_valid(place)) throw Error(ErrorCode::kParseError, origin + ": invalid place IRI");
  file.place = EntityId(place);
  for (const auto& feature : require_array(json, "features", origin)) {
    file.features.push_back(feature_from_json(feature, origin));
  }
  std::stable_sort(file.features.begin(), file.features.end(), [](const auto& a, const auto& b) {
    return std::tie(a.kind, a.name) < std::tie(b.kind, b.name);
  });
  return file;
}

std::string entity_file_name(const EntityId& id) { return percent_encode(id.iri()); }

std::shared_ptr<const FixtureCorpus> FixtureCorpus::load(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest";
  if (!fs::is_regular_file(manifest_path)) {
    throw Error(ErrorCode::kMissingManifest, "no manifest in " + dir.string(), "ingest");
  }
  std::shared_ptr<FixtureCorpus> corpus(new FixtureCorpus());
  corpus->dir_ = dir;

  std::istringstream manifest(read_file(manifest_path));
  std::string line;
  std::getline(manifest, line);
  if (line != kManifestHeader) {
    throw Error(ErrorCode::kParseError, manifest_path.string() + ":1: bad manifest header", "ingest");
  }
  std::size_t expected_entities = 0;
  std::size_t expected_maps = 0;
  std::vector<std::pair<std::string, std::string>> listed;  // (checksum, relative path)
  std::size_t line_no = 1;
  while (std::getline(manifest, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string first;
    std::string second;
    fields >> first >> second;
    const std::string where = manifest_path.string() + ":" + std::to_string(line_no);
    if (first == "entities" || first == "maps") {
      try {
        (first == "entities" ? expected_entities : expected_maps) = std::stoul(second);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kParseError, where + ": bad count", "ingest");
      }
    } else if (first.size() == 64 && !second.empty()) {
      listed.emplace_back(first, second);
    } else {
      throw Error(ErrorCode::kParseError, where + ": unrecognized manifest line", "ingest");
    }
  }

  for (const auto& [checksum, relative] : listed) {
    const fs::path path = dir / relative;
    const std::string text = read_file(path);
    const std::string origin = path.string();
    const std::string folder = fs::path(relative).parent_path().string();
    const std::string name = fs::path(relative).filename().string();
    if (folder == "entities") {
      Entity entity = entity_from_json(parse_json(text, origin), origin);
      if (entity_file_name(entity.id) != name) {
        throw Error(ErrorCode::kParseError, origin + ":1: file name does not match entity id", "ingest");
      }
      if (corpus->entities_.count(entity.id)) {
        throw Error(ErrorCode::kParseError, origin + ":1: duplicate entity", "ingest");
      }
      corpus->entities_.emplace(entity.id, std::move(entity));
    } else if (folder == "maps") {
      MapFile map = map_file_from_json(parse_json(text, origin), origin);
      corpus->maps_.emplace(map.place, std::move(map));
    } else {
      throw Error(ErrorCode::kParseError, manifest_path.string() + ": unexpected path " + relative, "ingest");
    }
  }

  for (const auto& [checksum, relative] : listed) {
    if (sha256_hex(read_file(dir / relative)) != checksum) {
      throw Error(ErrorCode::kChecksumMismatch, "checksum mismatch for " + (dir / relative).string(), "ingest");
    }
  }
  if (corpus->entities_.size() != expected_entities || corpus->maps_.size() != expected_maps) {
    throw Error(ErrorCode::kChecksumMismatch, "manifest counts do not match listed files", "ingest");
  }
  for (const auto& folder : {"entities", "maps"}) {
    for (const auto& name : list_files(dir / folder)) {
      const std::string relative = std::string(folder) + "/" + name;
      const bool known = std::any_of(listed.begin(), listed.end(),
                                     [&](const auto& entry) { return entry.second == relative; });
      if (!known) {
        throw Error(ErrorCode::kChecksumMismatch, "file not covered by manifest: " + relative, "ingest");
      }
    }
  }

  for (const auto& [id, entity] : corpus->entities_) {
    for (const auto& fact : entity.facts) {
      if (const auto* target = object_entity(fact); target && *target != id) {
        corpus->incoming_[*target].push_back({fact.predicate, id});
      }
    }
  }
  return corpus;
}

Entity FixtureCorpus::fetch_entity(const EntityId& id) const {
  const auto it = entities_.find(id);
  if (it == entities_.end()) throw Error(ErrorCode::kNotFound, "no entity " + id.iri(), "ingest");
  return it->second;
}

std::vector<Neighbor> FixtureCorpus::fetch_neighbors(const EntityId& id, const PredicateFilter& filter) const {
  const auto it = entities_.find(id);
  if (it == entities_.end()) throw Error(ErrorCode::kNotFound, "no entity " + id.iri(), "ingest");
  std::vector<Neighbor> out;
  auto keep = [&](Predicate p) { return !filter || filter->count(p) > 0; };
  for (const auto& fact : it->second.facts) {
    if (const auto* target = object_entity(fact); target && *target != id && keep(fact.predicate)) {
      out.push_back({fact.predicate, *target});
    }
  }
  if (const auto in = incoming_.find(id); in != incoming_.end()) {
    for (const auto& neighbor : in->second) {
      if (keep(neighbor.predicate)) out.push_back(neighbor);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<MapFeature> FixtureCorpus::fetch_map_features(const Entity& place, const BoundingBox&) const {
  const auto it = maps_.find(place.id);
  if (it == maps_.end()) return {};
  return it->second.features;
}

std::vector<EntityId> FixtureCorpus::find_by_label(std::string_view label) const {
  std::vector<EntityId> out;
  for (const auto& [id, entity] : entities_) {
    if (entity.label == label) out.push_back(id);
  }
  return out;
}

void write_corpus(const fs::path& dir, const std::vector<Entity>& entities, const std::vector<MapFile>& maps) {
  fs::create_directories(dir / "entities");
  fs::create_directories(dir / "maps");
  std::vector<std::string> files;
  std::set<std::string> keep_entities;
  std::set<std::string> keep_maps;
  for (Entity entity : entities) {
    normalize_entity(entity, entity.id.iri());
    const std::string name = entity_file_name(entity.id);
    write_file_atomic(dir / "entities" / name, canonical_dump(entity_to_json(entity)));
    keep_entities.insert(name);
  }
  for (const auto& map : maps) {
    const std::string name = entity_file_name(map.place);
    // Round-trip through the parser so feature order is canonical.
    const MapFile normalized = map_file_from_json(map_file_to_json(map), name);
    write_file_atomic(dir / "maps" / name, canonical_dump(map_file_to_json(normalized)));
    keep_maps.insert(name);
  }
  for (const auto& name : list_files(dir / "entities")) {
    if (!keep_entities.count(name)) fs::remove(dir / "entities" / name);
  }
  for (const auto& name : list_files(dir / "maps")) {
    if (!keep_maps.count(name)) fs::remove(dir / "maps" / name);
  }
  for (const auto& name : keep_entities) files.push_back("entities/" + name);
  for (const auto& name : keep_maps) files.push_back("maps/" + name);
  write_file_atomic(dir / "manifest", manifest_text(dir, files, keep_entities.size(), keep_maps.size()));
}

std::vector<std::string> seal_corpus(const fs::path& dir) {
  std::vector<Entity> entities;
  std::vector<MapFile> maps;
  for (const auto& name : list_files(dir / "entities")) {
    const fs::path path = dir / "entities" / name;
    entities.push_back(entity_from_json(parse_json(read_file(path), path.string()), path.string()));
    if (entity_file_name(entities.back().id) != name) fs::remove(path);
  }
  for (const auto& name : list_files(dir / "maps")) {
    const fs::path path = dir / "maps" / name;
    maps.push_back(map_file_from_json(parse_json(read_file(path), path.string()), path.string()));
    if (entity_file_name(maps.back().place) != name) fs::remove(path);
  }
  write_corpus(dir, entities, maps);

  std::set<EntityId> known;
  for (const auto& entity : entities) known.insert(entity.id);
  std::vector<std::string> dangling;
  for (const auto& entity : entities) {
    for (const auto& fact : entity.facts) {
      if (const auto* target = object_entity(fact); target && !known.count(*target)) {
        dangling.push_back(entity.id.iri() + " -> " + target->iri());
      }
    }
  }
  return dangling;
}

}  // namespace forge
