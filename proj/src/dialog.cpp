#include "forge/dialog.h"

#include <algorithm>
#include <sstream>

#include "forge/embedded_assets.h"
#include "forge/error.h"
#include "forge/rng.h"

namespace forge {

const TemplateTable& TemplateTable::builtin() {
  static const TemplateTable table = parse(embedded::kTemplatesTsv, "assets/templates.tsv");
  return table;
}

TemplateTable TemplateTable::parse(std::string_view text, const std::string& origin) {
  TemplateTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  constexpr std::string_view kHeader = "# forge dialog templates ";
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line_no == 1) {
      if (line.rfind(kHeader, 0) != 0) throw Error(ErrorCode::kParseError, where + ": missing template header");
      table.version_ = line.substr(kHeader.size());
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) throw Error(ErrorCode::kParseError, where + ": expected three tab-separated fields");
    const std::string predicate = line.substr(0, tab1);
    const auto topic = parse_topic(line.substr(tab1 + 1, tab2 - tab1 - 1));
    if (predicate != "*" && !parse_predicate(predicate)) {
      throw Error(ErrorCode::kParseError, where + ": unknown predicate '" + predicate + "'");
    }
    if (!topic) throw Error(ErrorCode::kParseError, where + ": unknown topic");
    if (!table.entries_.emplace(std::pair(predicate, *topic), line.substr(tab2 + 1)).second) {
      throw Error(ErrorCode::kParseError, where + ": duplicate template");
    }
  }
  if (table.version_.empty()) throw Error(ErrorCode::kParseError, origin + ":1: missing template header");
  return table;
}

TemplateTable TemplateTable::load(const std::filesystem::path& path) { return parse(read_file(path), path.string()); }

const std::string* TemplateTable::find(Predicate predicate, Topic topic) const {
  auto it = entries_.find({std::string(predicate_name(predicate)), topic});
  if (it == entries_.end()) it = entries_.find({"*", topic});
  return it == entries_.end() ? nullptr : &it->second;
}

std::string fill_template(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      const auto close = text.find('}', i);
      if (close != std::string_view::npos) {
        const auto it = values.find(std::string(text.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += text[i++];
  }
  return out;
}

std::size_t lcs_length(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = a[i - 1] == b[j - 1] ? diagonal + 1 : std::max(row[j], row[j - 1]);
      diagonal = above;
    }
  }
  return row[b.size()];
}

double lcs_similarity(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  return 2.0 * static_cast<double>(lcs_length(a, b)) / static_cast<double>(a.size() + b.size());
}

std::string fact_source_text(const Fact& fact, const LabelFn& labels) {
  return object_text(fact, [&](const EntityId& id) { return labels(id); });
}

namespace {

const TemplateTable& table_of(const LineOptions& options) {
  return options.table ? *options.table : TemplateTable::builtin();
}

std::string verbatim_text(const Fact& fact, const std::string& value, const LabelFn& labels) {
  return labels(fact.subject) + ", " + std::string(predicate_name(fact.predicate)) + ": " + value;
}

}  // namespace

DialogLine render_fact_line(const Fact& fact, Topic topic, const LabelFn& labels, const LineOptions& options,
                            bool* fell_back) {
  if (fell_back) *fell_back = false;
  DialogLine line;
  line.topic = topic;
  line.source_facts = {fact};
  line.claim = fact;
  const std::string source = fact_source_text(fact, labels);
  line.transformation.source_text = source;
  const std::string* tmpl = options.fidelity == Fidelity::kTemplate ? table_of(options).find(fact.predicate, topic) : nullptr;
  if (!tmpl) {
    if (options.fidelity == Fidelity::kTemplate && fell_back) *fell_back = true;
    line.text = verbatim_text(fact, source, labels);
    line.transformation.kind = TransformKind::kVerbatim;
    line.transformation.similarity = lcs_similarity(source, source);
    return line;
  }
  line.text = fill_template(*tmpl, {{"subject", labels(fact.subject)},
                                    {"object", source},
                                    {"location", options.location_label}});
  line.transformation.kind = TransformKind::kTemplate;
  line.transformation.similarity = lcs_similarity(source, line.text);
  return line;
}

DialogLine render_greeting(const Entity& npc, const LineOptions& options) {
  DialogLine line;
  line.topic = Topic::kGreeting;
  line.transformation.source_text = npc.label;
  const std::string* tmpl = options.fidelity == Fidelity::kTemplate
                                ? table_of(options).find(Predicate::kGenericLink, Topic::kGreeting)
                                : nullptr;
  if (!tmpl) {
    line.text = "Name: " + npc.label;
    line.transformation.kind = TransformKind::kVerbatim;
    line.transformation.similarity = lcs_similarity(npc.label, npc.label);
    return line;
  }
  line.text = fill_template(*tmpl, {{"subject", npc.label}});
  line.transformation.kind = TransformKind::kTemplate;
  line.transformation.similarity = lcs_similarity(npc.label, line.text);
  return line;
}

DialogLine render_lie_line(const LiedFact& lie, const LabelFn& labels, const LineOptions& options) {
  DialogLine line;
  line.topic = Topic::kLie;
  line.source_facts = {lie.truth};
  line.claim = lie.altered;
  const std::string source = fact_source_text(lie.truth, labels);
  const std::string stated = fact_source_text(lie.altered, labels);
  line.transformation.kind = TransformKind::kAltered;
  line.transformation.source_text = source;
  const std::string* tmpl = options.fidelity == Fidelity::kTemplate ? table_of(options).find(lie.truth.predicate, Topic::kLie) : nullptr;
  if (!tmpl) {
    line.text = verbatim_text(lie.altered, stated, labels);
    line.transformation.similarity = lcs_similarity(source, stated);
    return line;
  }
  line.text = fill_template(*tmpl, {{"subject", labels(lie.altered.subject)}, {"object", stated}});
  line.transformation.similarity = lcs_similarity(source, line.text);
  return line;
}

DialogResult render_dialog(const Entity& npc, const std::vector<Fact>& facts, DialogRole role, Fidelity fidelity,
                           std::uint64_t seed, const LabelFn& labels, const LiedFact* lie,
                           const TemplateTable* table) {
  if (lie && role != DialogRole::kCulprit) {
    throw Error(ErrorCode::kInvalidArgument, "lie lines belong only in the culprit's script", "dialog");
  }
  if (lie && lie->culprit != npc.id) throw Error(ErrorCode::kInvalidArgument, "lie is not about this npc", "dialog");
  LineOptions options{fidelity, {}, table};
  DialogResult result;
  result.script.npc = npc.id;
  result.script.lines.push_back(render_greeting(npc, options));

  std::vector<DialogLine> own;
  std::vector<DialogLine> hints;
  bool lie_rendered = false;
  for (const auto& fact : facts) {
    const bool about_self = fact.subject == npc.id;
    const auto* target = object_entity(fact);
    if (!about_self && !(target && *target == npc.id)) {
      throw Error(ErrorCode::kInvalidArgument, "fact neither belongs to nor references " + npc.id.iri(), "dialog");
    }
    if (about_self && lie && same_claim(fact, lie->truth)) {
      own.push_back(render_lie_line(*lie, labels, options));
      lie_rendered = true;
      continue;
    }
    const Topic topic = about_self ? Topic::kSelfFact : Topic::kSuspectHint;
    bool fell_back = false;
    DialogLine line = render_fact_line(fact, topic, labels, options, &fell_back);
    if (fell_back) {
      result.fallbacks.push_back(std::string(predicate_name(fact.predicate)) + "/" + std::string(topic_name(topic)));
    }
    (about_self ? own : hints).push_back(std::move(line));
  }
  if (lie && !lie_rendered) own.push_back(render_lie_line(*lie, labels, options));

  Rng rng(derive_seed(seed, "dialog:" + npc.id.iri()));
  rng.shuffle(own);
  for (auto& line : own) result.script.lines.push_back(std::move(line));
  for (auto& line : hints) result.script.lines.push_back(std::move(line));
  return result;
}

}  // namespace forge
