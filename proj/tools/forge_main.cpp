// forge: command-line front end.
//
//   forge generate --victim <name> --mode <m> --seed <n> [--offline --fixtures <dir>] [--config <file>] [--out <file>]
//   forge validate <spec-file>
//   forge audit <dir> [--top 8] [--json]
//   forge play <spec-file> [--script <file>]
//   forge replay <spec-file> <actions-file>
//   forge serve --config <file>
//   forge corpus seal <dir>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "forge/error.h"
#include "forge/metrics.h"
#include "forge/plot.h"
#include "forge/runtime.h"
#include "forge/service.h"

namespace fs = std::filesystem;
using namespace forge;

namespace {

forge::Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

GameSpec load_spec(const fs::path& path) { return parse_game_spec(read_file(path), path.string()); }

void emit(const std::string& text, const std::optional<fs::path>& out) {
  if (out) {
    write_file_atomic(*out, text);
  } else {
    std::cout << text;
  }
}

std::vector<fs::path> spec_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    const Json json = parse_json(read_file(entry.path()), entry.path().string());
    if (json.is_object() && json.value("format", "") == "forge-game 1") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Accepts a location index as shown by `look`, or an IRI.
EntityId resolve_location(const GameSpec& spec, const std::string& arg) {
  if (!arg.empty() && std::all_of(arg.begin(), arg.end(), ::isdigit)) {
    const std::size_t index = std::stoul(arg);
    if (index < spec.locations.size()) return spec.locations[index].id;
  }
  return EntityId(arg);
}

void play_help() {
  std::cout << "commands: look | travel <index|iri> | talk <npc> [topic] | collect <id> | accuse <suspect> [ids...]\n"
               "          state | log | solve | quit\n";
}

int play(const GameSpec& spec, std::istream& in, bool echo) {
  GameState state = new_session(spec);
  std::cout << describe_location(spec, state) << "\n";
  std::string line;
  while (state.status == GameStatus::kInProgress && std::cout << "> " && std::getline(in, line)) {
    if (echo) std::cout << line << "\n";
    std::istringstream words(line);
    std::string verb;
    words >> verb;
    if (verb.empty()) continue;
    if (verb == "quit") break;
    if (verb == "help") {
      play_help();
      continue;
    }
    if (verb == "look") {
      std::cout << describe_location(spec, state) << "\n";
      for (std::size_t i = 0; i < spec.locations.size(); ++i) {
        std::cout << "  [" << i << "] " << spec.label_of(spec.locations[i].id) << "\n";
      }
      continue;
    }
    if (verb == "state") {
      std::cout << canonical_dump(game_state_to_json(state));
      continue;
    }
    if (verb == "log") {
      Json log = Json::array();
      for (const auto& action : state.log) log.push_back(action_to_json(action));
      std::cout << canonical_dump(log);
      continue;
    }
    if (verb == "solve") {
      const SolveResult solved = solve_greedy(spec);
      std::cout << (solved.won ? "greedy solver wins" : "greedy solver does not win") << " in "
                << solved.actions.size() << " actions\n";
      continue;
    }
    Action action;
    std::string target;
    words >> target;
    if (verb == "travel") {
      action.kind = ActionKind::kTravel;
      action.target = resolve_location(spec, target);
    } else if (verb == "talk") {
      action.kind = ActionKind::kTalk;
      action.target = EntityId(target);
      std::string topic;
      if (words >> topic) {
        action.topic = parse_topic(topic);
        if (!action.topic) {
          std::cout << "unknown topic " << topic << "\n";
          continue;
        }
      }
    } else if (verb == "collect") {
      action.kind = ActionKind::kCollect;
      action.target = EntityId(target);
    } else if (verb == "accuse") {
      action.kind = ActionKind::kAccuse;
      action.target = EntityId(target);
      for (std::string id; words >> id;) action.presented.emplace_back(id);
    } else {
      play_help();
      continue;
    }
    try {
      const StepResult result = apply_action(spec, state, action);
      state = result.state;
      std::cout << result.observation << "\n";
      if (result.verdict) std::cout << "verdict: " << verdict_name(*result.verdict) << "\n";
    } catch (const Error& e) {
      std::cout << error_code_name(e.code()) << ": " << e.what() << "\n";
    }
  }
  std::cout << "status: " << game_status_name(state.status) << "\n";
  return state.status == GameStatus::kWon ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forge: data adventure generator"};
  app.require_subcommand(1);

  auto* generate = app.add_subcommand("generate", "assemble one game and print its canonical spec");
  std::string victim;
  std::string mode_name = "wikimystery";
  std::uint64_t seed = 0;
  bool offline = false;
  std::optional<fs::path> fixtures;
  std::optional<fs::path> config_path;
  std::optional<fs::path> out_path;
  std::optional<fs::path> ledger_path;
  generate->add_option("--victim", victim, "exact label of the victim person")->required();
  generate->add_option("--mode", mode_name, "linkpath | wikimystery | data-agent");
  generate->add_option("--seed", seed, "generation seed")->required();
  generate->add_flag("--offline", offline, "use a fixture corpus instead of live endpoints");
  generate->add_option("--fixtures", fixtures, "fixture corpus directory");
  generate->add_option("--config", config_path, "service config file (generator and live settings)");
  generate->add_option("--out", out_path, "write the game spec here instead of stdout");
  generate->add_option("--ledger", ledger_path, "feedback ledger whose suspects are excluded");

  auto* validate = app.add_subcommand("validate", "check a spec's solvability");
  fs::path spec_path;
  validate->add_option("spec", spec_path)->required();

  auto* audit = app.add_subcommand("audit", "region bias over every spec under a directory");
  fs::path audit_dir;
  std::size_t top = kDefaultTopLocations;
  bool audit_json = false;
  audit->add_option("dir", audit_dir)->required();
  audit->add_option("--top", top, "length of the top-location list");
  audit->add_flag("--json", audit_json, "print the report as JSON");

  auto* play_cmd = app.add_subcommand("play", "play a spec in the terminal");
  std::optional<fs::path> script;
  play_cmd->add_option("spec", spec_path)->required();
  play_cmd->add_option("--script", script, "read commands from a file");

  auto* replay_cmd = app.add_subcommand("replay", "replay an action log and print the final state");
  fs::path actions_path;
  replay_cmd->add_option("spec", spec_path)->required();
  replay_cmd->add_option("actions", actions_path)->required();

  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--config", config_path, "service config file (FORGE_CONFIG overrides)");

  auto* corpus = app.add_subcommand("corpus", "fixture corpus maintenance");
  corpus->require_subcommand(1);
  auto* seal = corpus->add_subcommand("seal", "canonicalize files and rewrite the manifest");
  fs::path corpus_dir;
  seal->add_option("dir", corpus_dir)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      const auto mode = parse_game_mode(mode_name);
      if (!mode) throw Error(ErrorCode::kInvalidArgument, "unknown mode " + mode_name);
      ServiceConfig config = config_path ? load_service_config(config_path) : ServiceConfig{};
      if (offline) {
        config.source = SourceMode::kFixture;
        if (fixtures) config.fixtures = *fixtures;
        if (config.fixtures.empty()) throw Error(ErrorCode::kInvalidArgument, "--offline needs --fixtures");
      } else if (!config_path) {
        config.source = SourceMode::kLive;
      }
      const auto source = open_source(config);
      ExclusionList excluded;
      if (ledger_path) excluded = FeedbackLedger(*ledger_path).exclusions();
      const GameSpec spec = assemble_game(*source, victim, *mode, seed, config.generator, excluded);
      emit(serialize_game_spec(spec), out_path);
      return 0;
    }
    if (validate->parsed()) {
      const ValidationReport report = validate_solvability(load_spec(spec_path));
      std::cout << canonical_dump(report.to_json());
      return report.passed() ? 0 : 1;
    }
    if (audit->parsed()) {
      std::vector<GameSpec> specs;
      for (const auto& file : spec_files(audit_dir)) specs.push_back(load_spec(file));
      const BiasReport report = bias_audit(specs, RegionTable::builtin(), top);
      if (audit_json) {
        std::cout << canonical_dump(bias_report_to_json(report));
      } else {
        std::map<EntityId, std::string> labels;
        for (const auto& spec : specs) {
          for (const auto& location : spec.locations) labels.emplace(location.id, spec.label_of(location.id));
        }
        std::cout << bias_report_table(report, [&](const EntityId& id) {
          const auto it = labels.find(id);
          return it == labels.end() ? id.iri() : it->second;
        });
      }
      return 0;
    }
    if (play_cmd->parsed()) {
      const GameSpec spec = load_spec(spec_path);
      if (script) {
        std::ifstream in(*script);
        if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read " + script->string());
        return play(spec, in, true);
      }
      return play(spec, std::cin, false);
    }
    if (replay_cmd->parsed()) {
      const GameSpec spec = load_spec(spec_path);
      const Json log = parse_json(read_file(actions_path), actions_path.string());
      if (!log.is_array()) throw Error(ErrorCode::kParseError, actions_path.string() + ": expected an array of actions");
      std::vector<Action> actions;
      for (const auto& entry : log) actions.push_back(action_from_json(entry, actions_path.string()));
      std::cout << canonical_dump(game_state_to_json(replay(spec, actions).state));
      return 0;
    }
    if (serve->parsed()) {
      ServiceConfig config = load_service_config(config_path);
      Service service(config, open_source(config));
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "forge listening on " << config.host << ":" << config.port << "\n";
      service.listen();
      return 0;
    }
    if (seal->parsed()) {
      const auto dangling = seal_corpus(corpus_dir);
      for (const auto& ref : dangling) std::cout << "dangling " << ref << "\n";
      std::cout << "sealed " << corpus_dir.string() << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "forge: " << (e.stage().empty() ? "" : e.stage() + ": ") << error_code_name(e.code()) << ": "
              << e.what() << "\n";
    return 2;
  }
  return 0;
}
