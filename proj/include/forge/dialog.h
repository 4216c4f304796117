#pragma once

// Template-based rendering of facts into NPC dialog, with a transformation
// record per line measuring how far the text moved from the source data.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "forge/gamespec.h"

namespace forge {

// One template per (predicate, topic); "*" is the per-topic fallback.
// File form: "# forge dialog templates v<N>" header, then
// "predicate<TAB>topic<TAB>template" lines; '#' lines are comments.
class TemplateTable {
 public:
  static const TemplateTable& builtin();
  static TemplateTable parse(std::string_view text, const std::string& origin);
  static TemplateTable load(const std::filesystem::path& path);

  const std::string& version() const { return version_; }
  const std::string* find(Predicate predicate, Topic topic) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::string version_;
  std::map<std::pair<std::string, Topic>, std::string> entries_;
};

// Replaces {name} placeholders; unknown names are left untouched.
std::string fill_template(std::string_view text, const std::map<std::string, std::string>& values);

std::size_t lcs_length(std::string_view a, std::string_view b);
// 2 * LCS(a, b) / (|a| + |b|) over bytes; 1 when both are empty.
double lcs_similarity(std::string_view a, std::string_view b);

using LabelFn = std::function<std::string(const EntityId&)>;

// The text a fact contributes: its literal, or its object's label.
std::string fact_source_text(const Fact& fact, const LabelFn& labels);

struct LineOptions {
  Fidelity fidelity = Fidelity::kTemplate;
  std::string location_label;  // {location} in clue templates
  const TemplateTable* table = nullptr;  // builtin() when null
};

// Renders one fact under `topic`. Template level falls back to verbatim when
// the table has no entry; `fell_back` reports it.
DialogLine render_fact_line(const Fact& fact, Topic topic, const LabelFn& labels, const LineOptions& options,
                            bool* fell_back = nullptr);
DialogLine render_greeting(const Entity& npc, const LineOptions& options);
// The culprit's lie: claims lie.altered while citing lie.truth.
DialogLine render_lie_line(const LiedFact& lie, const LabelFn& labels, const LineOptions& options);

enum class DialogRole { kInnocent, kCulprit, kBystander };

struct DialogResult {
  DialogScript script;
  // "<predicate>/<topic>" pairs that had no template and were rendered verbatim.
  std::vector<std::string> fallbacks;
};

// Greeting, then the npc's own facts (self-fact, shuffled by `seed`), then
// facts about others that reference the npc (suspect-hint). A culprit given
// `lie` speaks the altered fact in place of the truth. kInvalidArgument when
// a fact neither belongs to nor references the npc, or when a lie is given
// for a non-culprit.
DialogResult render_dialog(const Entity& npc, const std::vector<Fact>& facts, DialogRole role, Fidelity fidelity,
                           std::uint64_t seed, const LabelFn& labels, const LiedFact* lie = nullptr,
                           const TemplateTable* table = nullptr);

}  // namespace forge
