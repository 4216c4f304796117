#include "forge/metrics.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>

#include "forge/embedded_assets.h"
#include "forge/error.h"

namespace forge {

double score_transformation(const GameSpec& spec) {
  double sum = 0.0;
  std::size_t lines = 0;
  for (const auto& npc : spec.npcs) {
    for (const auto& line : npc.dialog.lines) {
      sum += line.transformation.similarity;
      ++lines;
    }
  }
  if (lines == 0) throw Error(ErrorCode::kInvalidArgument, "spec has no dialog lines", "metrics");
  return std::clamp(1.0 - sum / static_cast<double>(lines), 0.0, 1.0);
}

FunctionalityCount count_functionality(const GameSpec& spec) {
  std::set<EntityId> referenced;
  for (const auto& record : spec.clue_chain) {
    referenced.insert(record.giver);
    referenced.insert(record.at_location);
    if (record.element) referenced.insert(*record.element);
    if (record.unlocks) referenced.insert(*record.unlocks);
  }
  for (const auto& item : spec.evidence) referenced.insert(item.placed_at);
  for (const auto& id : spec.suspects.ids()) referenced.insert(id);
  if (spec.goal) referenced.insert(*spec.goal);
  referenced.insert(spec.start);

  FunctionalityCount count;
  auto tally = [&](const EntityId& id) { ++(referenced.count(id) ? count.gating : count.decorative); };
  for (const auto& npc : spec.npcs) {
    tally(npc.entity);
    count.decorative += npc.images.size();
  }
  for (const auto& item : spec.items) tally(item.id);
  for (const auto& location : spec.locations) {
    tally(location.id);
    if (!location.map.features.empty()) ++count.decorative;
  }
  count.gating += spec.evidence.size();
  return count;
}

double score_functionality(const GameSpec& spec) {
  const auto count = count_functionality(spec);
  if (count.total() == 0) return 0.0;
  return static_cast<double>(count.gating) / static_cast<double>(count.total());
}

MaximalismScore score_game(const GameSpec& spec) { return {score_transformation(spec), score_functionality(spec)}; }

Json score_to_json(const MaximalismScore& score) {
  Json out = Json::object();
  out["transformation"] = score.transformation;
  out["functionality"] = score.functionality;
  return out;
}

// ------------------------------------------------------------------ regions

const RegionTable& RegionTable::builtin() {
  static const RegionTable table = parse(embedded::kRegionsTsv, "assets/regions.tsv");
  return table;
}

RegionTable RegionTable::parse(std::string_view text, const std::string& origin) {
  RegionTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line_no == 1) {
      if (line.rfind("# forge region table ", 0) != 0) throw Error(ErrorCode::kParseError, where + ": missing header");
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream split(line);
    for (std::string field; std::getline(split, field, '\t');) fields.push_back(field);
    if (fields.size() != 4 || !EntityId::is_valid(fields[0]) || fields[1].empty()) {
      throw Error(ErrorCode::kParseError, where + ": expected country, region, lat, lon");
    }
    Country country;
    country.region = fields[1];
    try {
      std::size_t used = 0;
      country.centroid.lat = std::stod(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("lat");
      country.centroid.lon = std::stod(fields[3], &used);
      if (used != fields[3].size()) throw std::invalid_argument("lon");
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kParseError, where + ": bad centroid");
    }
    if (!table.countries_.emplace(EntityId(fields[0]), country).second) {
      throw Error(ErrorCode::kParseError, where + ": duplicate country");
    }
  }
  if (line_no == 0) throw Error(ErrorCode::kParseError, origin + ":1: missing header");
  return table;
}

RegionTable RegionTable::load(const std::filesystem::path& path) { return parse(read_file(path), path.string()); }

const RegionTable::Country* RegionTable::find(const EntityId& country) const {
  const auto it = countries_.find(country);
  return it == countries_.end() ? nullptr : &it->second;
}

namespace {

double great_circle(const GeoPoint& a, const GeoPoint& b) {
  constexpr double kRad = 3.14159265358979323846 / 180.0;
  const double dlat = (b.lat - a.lat) * kRad;
  const double dlon = (b.lon - a.lon) * kRad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.lat * kRad) * std::cos(b.lat * kRad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2 * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace

const EntityId* RegionTable::nearest(const GeoPoint& point) const {
  const EntityId* best = nullptr;
  double best_distance = 0.0;
  for (const auto& [id, country] : countries_) {
    const double d = great_circle(point, country.centroid);
    if (!best || d < best_distance) {
      best = &id;
      best_distance = d;
    }
  }
  return best;
}

std::vector<std::string> RegionTable::regions() const {
  std::set<std::string> names;
  for (const auto& [id, country] : countries_) names.insert(country.region);
  return {names.begin(), names.end()};
}

// -------------------------------------------------------------------- audit

std::optional<EntityId> country_of(const GameSpec& spec, const EntityId& location, const RegionTable& table) {
  std::set<EntityId> seen;
  std::vector<EntityId> frontier{location};
  // Breadth-first over located-in links so the nearest enclosing country wins.
  while (!frontier.empty()) {
    std::vector<EntityId> next;
    for (const auto& id : frontier) {
      if (!seen.insert(id).second) continue;
      if (table.find(id)) return id;
      const auto it = spec.bundle.find(id);
      if (it == spec.bundle.end()) continue;
      for (const auto* fact : it->second.facts_with(Predicate::kLocatedIn)) {
        if (const auto* target = object_entity(*fact)) {
          if (table.find(*target)) return *target;
          next.push_back(*target);
        }
      }
    }
    frontier = std::move(next);
  }
  const auto it = spec.bundle.find(location);
  if (it != spec.bundle.end() && it->second.geo) {
    if (const auto* id = table.nearest(*it->second.geo)) return *id;
  }
  return std::nullopt;
}

BiasReport bias_audit(const std::vector<GameSpec>& specs, const RegionTable& table, std::size_t top_n) {
  BiasReport report;
  report.batch_size = specs.size();
  for (const auto& region : table.regions()) report.region_counts[region] = 0;
  std::map<EntityId, std::size_t> per_location;
  std::set<EntityId> unmapped;
  for (const auto& spec : specs) {
    for (const auto& location : spec.locations) {
      ++report.occurrences;
      ++per_location[location.id];
      const auto country = country_of(spec, location.id, table);
      if (!country) {
        unmapped.insert(location.id);
        continue;
      }
      ++report.region_counts[table.find(*country)->region];
    }
  }
  std::vector<std::pair<EntityId, std::size_t>> ranked(per_location.begin(), per_location.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > top_n) ranked.resize(top_n);
  report.top_locations = std::move(ranked);
  report.unmapped.assign(unmapped.begin(), unmapped.end());
  return report;
}

Json bias_report_to_json(const BiasReport& report) {
  Json out = Json::object();
  out["batch_size"] = report.batch_size;
  out["occurrences"] = report.occurrences;
  Json regions = Json::object();
  for (const auto& [region, count] : report.region_counts) regions[region] = count;
  out["location_frequency"] = std::move(regions);
  Json top = Json::array();
  for (const auto& [id, count] : report.top_locations) top.push_back({{"location", id.iri()}, {"count", count}});
  out["top_locations"] = std::move(top);
  Json unmapped = Json::array();
  for (const auto& id : report.unmapped) unmapped.push_back(id.iri());
  out["unmapped"] = std::move(unmapped);
  return out;
}

std::string bias_report_table(const BiasReport& report, const std::function<std::string(const EntityId&)>& labels) {
  std::ostringstream out;
  out << "games: " << report.batch_size << "  location slots: " << report.occurrences << "\n\n";
  out << std::left << std::setw(16) << "region" << "count\n";
  for (const auto& [region, count] : report.region_counts) out << std::setw(16) << region << count << "\n";
  out << "\ntop locations\n";
  std::size_t rank = 0;
  for (const auto& [id, count] : report.top_locations) {
    out << std::right << std::setw(3) << ++rank << ". " << std::left << std::setw(8) << count
        << (labels ? labels(id) : id.iri()) << "\n";
  }
  if (!report.unmapped.empty()) {
    out << "\nunmapped\n";
    for (const auto& id : report.unmapped) out << "  " << id.iri() << "\n";
  }
  return out.str();
}

}  // namespace forge
