#pragma once

// Deterministic state machine that plays a GameSpec: travel, talk, collect,
// accuse. Every transition is a pure function of (spec, state, action).

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forge/gamespec.h"

namespace forge {

enum class ActionKind { kTravel, kTalk, kCollect, kAccuse };

std::string_view action_kind_name(ActionKind kind);
std::optional<ActionKind> parse_action_kind(std::string_view name);

struct Action {
  ActionKind kind = ActionKind::kTravel;
  EntityId target;
  std::optional<Topic> topic;       // talk: next unheard line of this topic
  std::vector<EntityId> presented;  // accuse: evidence / clue ids shown
  bool operator==(const Action&) const = default;
};

Json action_to_json(const Action& action);
Action action_from_json(const Json& json, const std::string& origin);

enum class GameStatus { kInProgress, kWon, kLost };

std::string_view game_status_name(GameStatus status);

enum class Verdict { kWon, kLost, kRejected };

std::string_view verdict_name(Verdict verdict);

struct GameState {
  std::string spec_id;
  std::uint64_t version = 0;  // successful transitions so far
  EntityId location;
  std::set<EntityId> visited;
  std::set<EntityId> collected;  // clue and evidence ids
  std::set<EntityId> taken;      // items picked up
  std::map<EntityId, std::set<std::size_t>> heard;  // npc -> dialog line indices
  GameStatus status = GameStatus::kInProgress;
  std::optional<EntityId> accused;
  std::vector<Action> log;

  bool operator==(const GameState&) const = default;
};

Json game_state_to_json(const GameState& state);
GameState game_state_from_json(const Json& json, const std::string& origin);

// What the player currently knows, derived from the collected clues.
struct Knowledge {
  std::set<EntityId> unlocked;  // locations
  std::set<EntityId> known;     // NPC entities and item ids
  std::set<EntityId> revealed_evidence;
};

Knowledge knowledge_of(const GameSpec& spec, const GameState& state);

// kInvalidSpec when the game spec fails validate_solvability.
GameState new_session(const GameSpec& spec);

struct StepResult {
  GameState state;
  std::string observation;
  std::optional<Verdict> verdict;  // accusations only
};

// kIllegalAction (unknown or unavailable target, locked location, finished
// game); the input state is never modified. Accusations are delegated to
// evaluate_accusation.
StepResult apply_action(const GameSpec& spec, const GameState& state, const Action& action);

// wikimystery: needs every evidence item collected, otherwise rejected;
// the suspect without evidence wins, any other loses.
// data-agent: accusing the culprit needs the true fact behind the lie,
// otherwise rejected with a hint; accusing an innocent loses.
// A rejected accusation returns the state unchanged.
StepResult evaluate_accusation(const GameSpec& spec, const GameState& state, const EntityId& suspect,
                               const std::vector<EntityId>& presented);

StepResult replay(const GameSpec& spec, const std::vector<Action>& actions);

// Describes the current location: NPCs, items and evidence available here,
// and the unlocked destinations.
std::string describe_location(const GameSpec& spec, const GameState& state);

struct SolveResult {
  GameState state;
  std::vector<Action> actions;
  bool won = false;
};

// Exhausts every reachable dialog, item and evidence (current location
// first, then unlocked locations in spec order) and accuses from what it
// observed: the suspect without evidence (wikimystery) or the suspect whose
// claim contradicts a collected fact clue (data-agent). Linkpath games end on
// talking to the goal.
SolveResult solve_greedy(const GameSpec& spec, std::size_t max_steps = 100000);

}  // namespace forge
