#pragma once

// Maximalist design metrics: how transformed the surfaced data is, how much
// of it gates progression, and where generated games take place.

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/gamespec.h"

namespace forge {

struct MaximalismScore {
  double transformation = 0.0;  // 0 = full fidelity, 1 = fully transformed
  double functionality = 0.0;   // 1 = fully functional, 0 = fully decorative
};

// 1 - mean similarity over every dialog line of every NPC.
// kInvalidArgument when the game spec has no dialog lines.
double score_transformation(const GameSpec& spec);

struct FunctionalityCount {
  std::size_t gating = 0;
  std::size_t decorative = 0;
  std::size_t total() const { return gating + decorative; }
};

// Data-derived elements are NPCs, items, locations and evidence items, plus
// decorations: every NPC image and every map extract with at least one
// feature. An element gates progression when a clue record, an evidence item
// or the accusation check refers to it.
FunctionalityCount count_functionality(const GameSpec& spec);
// gating / total, 0 when the game spec has no data-derived elements.
double score_functionality(const GameSpec& spec);

MaximalismScore score_game(const GameSpec& spec);
Json score_to_json(const MaximalismScore& score);

// Country -> region assignment with country centroids for geo fallback.
// File form: "# forge region table v<N>" header, then
// "country IRI<TAB>region<TAB>lat<TAB>lon" lines.
class RegionTable {
 public:
  struct Country {
    std::string region;
    GeoPoint centroid;
  };

  static const RegionTable& builtin();
  static RegionTable parse(std::string_view text, const std::string& origin);
  static RegionTable load(const std::filesystem::path& path);

  const Country* find(const EntityId& country) const;
  // Country with the closest centroid (great-circle), ties by IRI.
  const EntityId* nearest(const GeoPoint& point) const;
  // Distinct region names in sorted order.
  std::vector<std::string> regions() const;
  const std::map<EntityId, Country>& countries() const { return countries_; }

 private:
  std::map<EntityId, Country> countries_;
};

inline constexpr std::size_t kDefaultTopLocations = 8;

struct BiasReport {
  std::size_t batch_size = 0;
  std::size_t occurrences = 0;                         // location slots over the batch
  std::map<std::string, std::size_t> region_counts;    // every table region, zeros included
  std::vector<std::pair<EntityId, std::size_t>> top_locations;  // count desc, IRI asc
  std::vector<EntityId> unmapped;                      // distinct, sorted
};

// Region of a location: itself if it is a table country, else the first
// located-in chain (through bundled entities) that reaches one, else the
// country nearest to its coordinates. Empty when none applies.
std::optional<EntityId> country_of(const GameSpec& spec, const EntityId& location, const RegionTable& table);

BiasReport bias_audit(const std::vector<GameSpec>& specs, const RegionTable& table = RegionTable::builtin(),
                      std::size_t top_n = kDefaultTopLocations);

Json bias_report_to_json(const BiasReport& report);
std::string bias_report_table(const BiasReport& report, const std::function<std::string(const EntityId&)>& labels = {});

// Qualitative placements of well-known data games on the two axes, for plot
// context only. Illustrative, not measured.
struct ReferenceGame {
  std::string_view name;
  double transformation;
  double functionality;
};

inline constexpr ReferenceGame kReferenceGames[] = {
    {"WikiRace", 0.05, 0.90},
    {"OpenTrumps", 0.15, 0.80},
    {"Open Data Monopoly", 0.30, 0.45},
    {"WikiMystery", 0.55, 0.75},
    {"ANGELINA", 0.80, 0.30},
    {"FreeCiv", 0.70, 0.15},
};

}  // namespace forge
