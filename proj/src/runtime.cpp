#include "forge/runtime.h"

#include <algorithm>

#include "forge/error.h"
#include "forge/plot.h"

namespace forge {

std::string_view action_kind_name(ActionKind kind) {
  switch (kind) {
    case ActionKind::kTravel: return "travel";
    case ActionKind::kTalk: return "talk";
    case ActionKind::kCollect: return "collect";
    case ActionKind::kAccuse: return "accuse";
  }
  return "travel";
}

std::optional<ActionKind> parse_action_kind(std::string_view name) {
  for (ActionKind k : {ActionKind::kTravel, ActionKind::kTalk, ActionKind::kCollect, ActionKind::kAccuse}) {
    if (action_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view game_status_name(GameStatus status) {
  switch (status) {
    case GameStatus::kInProgress: return "in-progress";
    case GameStatus::kWon: return "won";
    case GameStatus::kLost: return "lost";
  }
  return "in-progress";
}

std::string_view verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::kWon: return "won";
    case Verdict::kLost: return "lost";
    case Verdict::kRejected: return "rejected";
  }
  return "rejected";
}

namespace {

EntityId id_field(const Json& json, std::string_view key, const std::string& origin) {
  const auto iri = require_string(json, key, origin);
  if (!EntityId::is_valid(iri)) throw Error(ErrorCode::kParseError, origin + ": '" + iri + "' is not an IRI");
  return EntityId(iri);
}

std::vector<EntityId> id_list(const Json& json, std::string_view key, const std::string& origin) {
  std::vector<EntityId> out;
  for (const auto& item : require_array(json, key, origin)) {
    if (!item.is_string() || !EntityId::is_valid(item.get<std::string>())) {
      throw Error(ErrorCode::kParseError, origin + ": " + std::string(key) + " must hold IRIs");
    }
    out.emplace_back(item.get<std::string>());
  }
  return out;
}

Json ids_json(const std::set<EntityId>& ids) {
  Json out = Json::array();
  for (const auto& id : ids) out.push_back(id.iri());
  return out;
}

}  // namespace

Json action_to_json(const Action& action) {
  Json out = Json::object();
  out["kind"] = action_kind_name(action.kind);
  out["target"] = action.target.iri();
  out["topic"] = action.topic ? Json(topic_name(*action.topic)) : Json(nullptr);
  Json presented = Json::array();
  for (const auto& id : action.presented) presented.push_back(id.iri());
  out["presented"] = std::move(presented);
  return out;
}

Action action_from_json(const Json& json, const std::string& origin) {
  if (!json.is_object()) throw Error(ErrorCode::kParseError, origin + ": action must be an object");
  Action action;
  const auto kind = parse_action_kind(require_string(json, "kind", origin));
  if (!kind) throw Error(ErrorCode::kParseError, origin + ": unknown action kind");
  action.kind = *kind;
  action.target = id_field(json, "target", origin);
  if (json.contains("topic") && !json["topic"].is_null()) {
    action.topic = parse_topic(require_string(json, "topic", origin));
    if (!action.topic) throw Error(ErrorCode::kParseError, origin + ": unknown topic");
  }
  if (json.contains("presented")) action.presented = id_list(json, "presented", origin);
  return action;
}

Json game_state_to_json(const GameState& state) {
  Json out = Json::object();
  out["spec_id"] = state.spec_id;
  out["version"] = state.version;
  out["status"] = game_status_name(state.status);
  out["location"] = state.location.iri();
  out["visited"] = ids_json(state.visited);
  out["collected"] = ids_json(state.collected);
  out["taken"] = ids_json(state.taken);
  Json heard = Json::array();
  for (const auto& [npc, lines] : state.heard) {
    Json entry = Json::object();
    entry["npc"] = npc.iri();
    entry["lines"] = Json(std::vector<std::size_t>(lines.begin(), lines.end()));
    heard.push_back(std::move(entry));
  }
  out["heard"] = std::move(heard);
  out["accused"] = state.accused ? Json(state.accused->iri()) : Json(nullptr);
  Json log = Json::array();
  for (const auto& action : state.log) log.push_back(action_to_json(action));
  out["log"] = std::move(log);
  return out;
}

GameState game_state_from_json(const Json& json, const std::string& origin) {
  if (!json.is_object()) throw Error(ErrorCode::kParseError, origin + ": state must be an object");
  GameState state;
  state.spec_id = require_string(json, "spec_id", origin);
  state.version = static_cast<std::uint64_t>(require_int(json, "version", origin));
  const auto status = require_string(json, "status", origin);
  if (status == "in-progress") state.status = GameStatus::kInProgress;
  else if (status == "won") state.status = GameStatus::kWon;
  else if (status == "lost") state.status = GameStatus::kLost;
  else throw Error(ErrorCode::kParseError, origin + ": unknown status '" + status + "'");
  state.location = id_field(json, "location", origin);
  for (auto& id : id_list(json, "visited", origin)) state.visited.insert(std::move(id));
  for (auto& id : id_list(json, "collected", origin)) state.collected.insert(std::move(id));
  for (auto& id : id_list(json, "taken", origin)) state.taken.insert(std::move(id));
  for (const auto& entry : require_array(json, "heard", origin)) {
    auto& lines = state.heard[id_field(entry, "npc", origin)];
    for (const auto& index : require_array(entry, "lines", origin)) {
      if (!index.is_number_unsigned()) throw Error(ErrorCode::kParseError, origin + ": line index must be unsigned");
      lines.insert(index.get<std::size_t>());
    }
  }
  if (!require(json, "accused", origin).is_null()) state.accused = id_field(json, "accused", origin);
  for (const auto& action : require_array(json, "log", origin)) state.log.push_back(action_from_json(action, origin));
  return state;
}

Knowledge knowledge_of(const GameSpec& spec, const GameState& state) {
  Knowledge k;
  k.unlocked.insert(spec.start);
  k.known.insert(spec.mode == GameMode::kLinkpath ? spec.victim : EntityId(kCaseFileId));
  for (const auto& id : state.collected) {
    const auto* record = spec.clue(id);
    if (!record) continue;
    if (record->unlocks) k.unlocked.insert(*record->unlocks);
    if (record->element) k.known.insert(*record->element);
    if (record->evidence) k.revealed_evidence.insert(*record->evidence);
  }
  return k;
}

GameState new_session(const GameSpec& spec) {
  const auto report = validate_solvability(spec);
  if (!report.passed()) {
    std::string failed;
    for (const auto& check : report.checks) {
      if (!check.passed) failed += (failed.empty() ? "" : ", ") + check.name;
    }
    throw Error(ErrorCode::kInvalidSpec, "spec fails validation: " + failed, "runtime");
  }
  GameState state;
  state.spec_id = game_spec_id(spec);
  state.location = spec.start;
  state.visited.insert(spec.start);
  return state;
}

namespace {

[[noreturn]] void illegal(const std::string& message) { throw Error(ErrorCode::kIllegalAction, message, "runtime"); }

std::string clue_note(const GameSpec& spec, const ClueRecord& record) {
  std::string note = " [new clue " + record.id.iri() + "]";
  if (record.unlocks) note += " You can now travel to " + spec.label_of(*record.unlocks) + ".";
  if (record.evidence) {
    if (const auto* item = spec.evidence_item(*record.evidence)) {
      note += " Evidence about " + spec.label_of(item->about) + " is kept in " + spec.label_of(item->placed_at) + ".";
    }
  }
  return note;
}

// Adds clue ids to `state` and returns the notes for newly learned ones.
std::string learn(const GameSpec& spec, GameState& state, const std::vector<EntityId>& clues) {
  std::string notes;
  for (const auto& id : clues) {
    if (!state.collected.insert(id).second) continue;
    if (const auto* record = spec.clue(id)) notes += clue_note(spec, *record);
  }
  return notes;
}

StepResult travel(const GameSpec& spec, const GameState& state, const Action& action) {
  if (!spec.location(action.target)) illegal(action.target.iri() + " is not a location");
  if (action.target == state.location) illegal("already at " + spec.label_of(action.target));
  if (!knowledge_of(spec, state).unlocked.count(action.target)) {
    illegal(spec.label_of(action.target) + " has not been unlocked");
  }
  StepResult result{state, {}, std::nullopt};
  result.state.location = action.target;
  result.state.visited.insert(action.target);
  result.observation = "You travel to " + spec.label_of(action.target) + ".";
  return result;
}

StepResult talk(const GameSpec& spec, const GameState& state, const Action& action) {
  const auto* npc = spec.npc(action.target);
  if (!npc) illegal(action.target.iri() + " is not an NPC");
  if (!knowledge_of(spec, state).known.count(npc->entity)) illegal("you have not heard of " + spec.label_of(npc->entity));
  if (npc->home != state.location) illegal(spec.label_of(npc->entity) + " is not here");
  const auto heard_it = state.heard.find(npc->entity);
  std::optional<std::size_t> next;
  for (std::size_t i = 0; i < npc->dialog.lines.size(); ++i) {
    if (heard_it != state.heard.end() && heard_it->second.count(i)) continue;
    if (action.topic && npc->dialog.lines[i].topic != *action.topic) continue;
    next = i;
    break;
  }
  if (!next) illegal(spec.label_of(npc->entity) + " has nothing more to say");
  StepResult result{state, {}, std::nullopt};
  result.state.heard[npc->entity].insert(*next);
  const auto& line = npc->dialog.lines[*next];
  result.observation = spec.label_of(npc->entity) + ": \"" + line.text + "\"";
  if (line.reveals) result.observation += learn(spec, result.state, {*line.reveals});
  if (spec.mode == GameMode::kLinkpath && spec.goal && npc->entity == *spec.goal) {
    result.state.status = GameStatus::kWon;
    result.observation += " You reached " + spec.label_of(*spec.goal) + ".";
  }
  return result;
}

StepResult collect(const GameSpec& spec, const GameState& state, const Action& action) {
  const Knowledge k = knowledge_of(spec, state);
  StepResult result{state, {}, std::nullopt};
  if (const auto* item = spec.item(action.target)) {
    if (!k.known.count(item->id)) illegal("you do not know about " + item->id.iri());
    if (item->location != state.location) illegal("that item is not here");
    if (state.taken.count(item->id)) illegal("already collected");
    result.state.taken.insert(item->id);
    result.observation = item->text + learn(spec, result.state, item->reveals);
    return result;
  }
  if (const auto* evidence = spec.evidence_item(action.target)) {
    if (!k.revealed_evidence.count(evidence->id)) illegal("you do not know about " + evidence->id.iri());
    if (evidence->placed_at != state.location) illegal("that evidence is not here");
    if (state.collected.count(evidence->id)) illegal("already collected");
    result.state.collected.insert(evidence->id);
    result.observation = "Evidence: " + evidence->text;
    return result;
  }
  illegal(action.target.iri() + " is not an item or evidence");
}

const ClueRecord* truth_record(const GameSpec& spec) {
  if (!spec.lie) return nullptr;
  for (const auto& record : spec.clue_chain) {
    if (record.kind == ClueKind::kFact && record.fact && same_claim(*record.fact, spec.lie->truth)) return &record;
  }
  return nullptr;
}

}  // namespace

StepResult evaluate_accusation(const GameSpec& spec, const GameState& state, const EntityId& suspect,
                               const std::vector<EntityId>& presented) {
  if (state.status != GameStatus::kInProgress) illegal("the game is over");
  if (spec.mode == GameMode::kLinkpath) illegal("there is nobody to accuse in this game");
  if (!spec.suspects.contains(suspect)) illegal(suspect.iri() + " is not a suspect");
  for (const auto& id : presented) {
    if (!state.collected.count(id)) illegal(id.iri() + " has not been collected");
  }
  const auto culprit = spec.suspects.culprit();
  StepResult result{state, {}, std::nullopt};
  if (spec.mode == GameMode::kWikimystery) {
    const auto have = static_cast<std::size_t>(std::count_if(
        spec.evidence.begin(), spec.evidence.end(), [&](const EvidenceItem& e) { return state.collected.count(e.id); }));
    if (have < spec.evidence.size()) {
      result.verdict = Verdict::kRejected;
      result.observation = "You need all " + std::to_string(spec.evidence.size()) + " pieces of evidence before an arrest; you have " +
                           std::to_string(have) + ".";
      return result;
    }
  } else {
    const auto* truth = truth_record(spec);
    if (culprit == suspect && (!truth || !state.collected.count(truth->id))) {
      result.verdict = Verdict::kRejected;
      result.observation = "You suspect " + spec.label_of(suspect) +
                           ", but you have not found the record that proves the lie. Keep investigating.";
      return result;
    }
  }
  Action action{ActionKind::kAccuse, suspect, std::nullopt, presented};
  result.state.log.push_back(action);
  ++result.state.version;
  result.state.accused = suspect;
  if (culprit == suspect) {
    result.state.status = GameStatus::kWon;
    result.verdict = Verdict::kWon;
    result.observation = spec.label_of(suspect) + " is arrested. Case solved.";
  } else {
    result.state.status = GameStatus::kLost;
    result.verdict = Verdict::kLost;
    result.observation = spec.label_of(suspect) + " is innocent. The culprit got away.";
  }
  return result;
}

StepResult apply_action(const GameSpec& spec, const GameState& state, const Action& action) {
  if (state.status != GameStatus::kInProgress) illegal("the game is over");
  if (action.kind == ActionKind::kAccuse) return evaluate_accusation(spec, state, action.target, action.presented);
  if (!action.presented.empty()) illegal("only accusations present evidence");
  if (action.topic && action.kind != ActionKind::kTalk) illegal("only talk actions take a topic");
  StepResult result;
  switch (action.kind) {
    case ActionKind::kTravel: result = travel(spec, state, action); break;
    case ActionKind::kTalk: result = talk(spec, state, action); break;
    default: result = collect(spec, state, action); break;
  }
  result.state.log.push_back(action);
  ++result.state.version;
  return result;
}

StepResult replay(const GameSpec& spec, const std::vector<Action>& actions) {
  StepResult result{new_session(spec), {}, std::nullopt};
  for (const auto& action : actions) result = apply_action(spec, result.state, action);
  return result;
}

std::string describe_location(const GameSpec& spec, const GameState& state) {
  const Knowledge k = knowledge_of(spec, state);
  std::string out = "You are in " + spec.label_of(state.location) + ".";
  std::string people;
  for (const auto& npc : spec.npcs) {
    if (npc.home == state.location && k.known.count(npc.entity)) {
      people += (people.empty() ? "" : ", ") + spec.label_of(npc.entity);
    }
  }
  if (!people.empty()) out += " People here: " + people + ".";
  std::string things;
  for (const auto& item : spec.items) {
    if (item.location == state.location && k.known.count(item.id) && !state.taken.count(item.id)) {
      things += (things.empty() ? "" : ", ") + (item.id.iri() == kCaseFileId ? std::string("case file") : spec.label_of(item.entity));
    }
  }
  for (const auto& item : spec.evidence) {
    if (item.placed_at == state.location && k.revealed_evidence.count(item.id) && !state.collected.count(item.id)) {
      things += (things.empty() ? "" : ", ") + std::string("evidence about ") + spec.label_of(item.about);
    }
  }
  if (!things.empty()) out += " You see: " + things + ".";
  std::string places;
  for (const auto& location : spec.locations) {
    if (location.id != state.location && k.unlocked.count(location.id)) {
      places += (places.empty() ? "" : ", ") + spec.label_of(location.id);
    }
  }
  if (!places.empty()) out += " You can travel to: " + places + ".";
  return out;
}

namespace {

// Next non-accusation action available at `location`, if any.
std::optional<Action> local_work(const GameSpec& spec, const GameState& state, const Knowledge& k,
                                 const EntityId& location) {
  for (const auto& npc : spec.npcs) {
    if (npc.home != location || !k.known.count(npc.entity)) continue;
    const auto it = state.heard.find(npc.entity);
    const std::size_t heard = it == state.heard.end() ? 0 : it->second.size();
    if (heard < npc.dialog.lines.size()) return Action{ActionKind::kTalk, npc.entity, std::nullopt, {}};
  }
  for (const auto& item : spec.items) {
    if (item.location == location && k.known.count(item.id) && !state.taken.count(item.id)) {
      return Action{ActionKind::kCollect, item.id, std::nullopt, {}};
    }
  }
  for (const auto& item : spec.evidence) {
    if (item.placed_at == location && k.revealed_evidence.count(item.id) && !state.collected.count(item.id)) {
      return Action{ActionKind::kCollect, item.id, std::nullopt, {}};
    }
  }
  return std::nullopt;
}

std::optional<EntityId> deduce_culprit(const GameSpec& spec, const GameState& state) {
  std::vector<EntityId> candidates;
  if (spec.mode == GameMode::kWikimystery) {
    for (const auto& id : spec.suspects.ids()) {
      const bool cleared = std::any_of(spec.evidence.begin(), spec.evidence.end(), [&](const EvidenceItem& e) {
        return e.about == id && state.collected.count(e.id);
      });
      if (!cleared) candidates.push_back(id);
    }
  } else {
    std::vector<Fact> truths;
    for (const auto& id : state.collected) {
      const auto* record = spec.clue(id);
      if (record && record->kind == ClueKind::kFact && record->fact) truths.push_back(*record->fact);
    }
    for (const auto& id : spec.suspects.ids()) {
      const auto* npc = spec.npc(id);
      const auto it = state.heard.find(id);
      if (!npc || it == state.heard.end()) continue;
      bool caught = false;
      for (std::size_t index : it->second) {
        const auto& claim = npc->dialog.lines[index].claim;
        if (!claim) continue;
        for (const auto& truth : truths) {
          caught = caught || (truth.subject == claim->subject && truth.predicate == claim->predicate &&
                              truth.object != claim->object);
        }
      }
      if (caught) candidates.push_back(id);
    }
  }
  if (candidates.size() != 1) return std::nullopt;
  return candidates.front();
}

}  // namespace

SolveResult solve_greedy(const GameSpec& spec, std::size_t max_steps) {
  SolveResult out;
  out.state = new_session(spec);
  auto step = [&](const Action& action) {
    out.state = apply_action(spec, out.state, action).state;
    out.actions.push_back(action);
  };
  while (out.state.status == GameStatus::kInProgress && out.actions.size() < max_steps) {
    const Knowledge k = knowledge_of(spec, out.state);
    if (auto action = local_work(spec, out.state, k, out.state.location)) {
      step(*action);
      continue;
    }
    std::optional<EntityId> destination;
    for (const auto& location : spec.locations) {
      if (location.id != out.state.location && k.unlocked.count(location.id) &&
          local_work(spec, out.state, k, location.id)) {
        destination = location.id;
        break;
      }
    }
    if (destination) {
      step({ActionKind::kTravel, *destination, std::nullopt, {}});
      continue;
    }
    if (spec.mode == GameMode::kLinkpath) break;
    const auto culprit = deduce_culprit(spec, out.state);
    if (!culprit) break;
    std::vector<EntityId> presented;
    for (const auto& id : out.state.collected) {
      if (spec.evidence_item(id)) presented.push_back(id);
    }
    const Action accuse{ActionKind::kAccuse, *culprit, std::nullopt, presented};
    const auto result = apply_action(spec, out.state, accuse);
    out.actions.push_back(accuse);
    out.state = result.state;
    if (result.verdict == Verdict::kRejected) break;
  }
  out.won = out.state.status == GameStatus::kWon;
  return out;
}

}  // namespace forge
