#pragma once

// HTTP facade over generation, play, audits and feedback with file-backed
// persistence. Layout under the data directory:
//   games/<game id>/spec.json, meta.json     (temp dir + rename per game)
//   sessions/<session id>.json               (write + rename per update)
//   idempotency/<sha256 of key>.json
//   feedback.tsv                             (FeedbackLedger)
//
// Request and response bodies (canonical JSON, fields in this order):
//   POST /games                {victim, mode, seed, options?}  Idempotency-Key header optional
//     201/200 -> {game_id, spec_id, created_at, mode, victim, seed, suspects, score}
//   GET  /games/{id}           -> {game_id, spec_id, created_at, score, spec}
//   GET  /games/{id}/score     -> {game_id, score, functionality{gating, decorative, total}}
//   POST /games/{id}/sessions  -> {session_id, game_id, state, observation}
//   GET  /sessions/{id}        -> {session_id, game_id, state, knowledge, observation}
//   POST /sessions/{id}/actions {kind, target, topic?, presented?}
//     -> {session_id, game_id, state, observation, verdict}
//   POST /games/{id}/feedback  {suspect, kind?}  -> {game_id, suspect, kind, excluded}
//   GET  /audits/bias?limit=N&top=M -> bias report over the N most recent games
// Errors: {code, stage, message} with code an ErrorCode name.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "forge/error.h"
#include "forge/live.h"
#include "forge/metrics.h"
#include "forge/plot.h"
#include "forge/runtime.h"

namespace httplib {
class Server;
}

namespace forge {

enum class SourceMode { kFixture, kLive };

struct ServiceConfig {
  SourceMode source = SourceMode::kFixture;
  std::filesystem::path fixtures;  // corpus directory (fixture mode)
  LiveConfig live;
  std::filesystem::path data_dir = "forge-data";
  std::string host = "127.0.0.1";
  int port = 8080;
  GeneratorConfig generator;

  Json to_json() const;
  // Relative paths are resolved against `base_dir`.
  static ServiceConfig from_json(const Json& json, const std::string& origin,
                                 const std::filesystem::path& base_dir = {});
};

inline constexpr const char* kConfigEnv = "FORGE_CONFIG";
inline constexpr const char* kPortEnv = "FORGE_PORT";

// FORGE_CONFIG (when set) replaces `path`; FORGE_PORT (when set) replaces the
// listen port. With neither a path nor the variable, defaults are used.
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& path);

std::shared_ptr<const DataSource> open_source(const ServiceConfig& config);

// 32 lowercase hex digits from the system CSPRNG.
std::string random_token();

// Hook called at named persistence points: "generated" (spec assembled,
// nothing written) and "staged" (files written to the temp dir, not yet
// renamed). Throwing or exiting from it simulates a crash.
using FaultHook = std::function<void(std::string_view point)>;

struct StoredGame {
  std::string game_id;
  std::string spec_id;
  std::string created_at;
  MaximalismScore score;
  std::shared_ptr<const GameSpec> spec;
};

class GameStore {
 public:
  // Creates the directory and removes staging leftovers of crashed writes.
  explicit GameStore(std::filesystem::path root);

  // Validates, scores and persists; kInvalidSpec, kStorageUnavailable.
  StoredGame put(const GameSpec& spec, const FaultHook& hook = {});
  std::optional<StoredGame> get(const std::string& game_id) const;
  // Oldest first (created_at, then id).
  std::vector<std::string> ids() const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::optional<StoredGame> load(const std::string& game_id) const;

  std::filesystem::path root_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::string, StoredGame> cache_;
};

struct SessionRecord {
  std::string session_id;
  std::string game_id;
  GameState state;
};

Json session_record_to_json(const SessionRecord& record);
SessionRecord session_record_from_json(const Json& json, const std::string& origin);

class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path root);

  SessionRecord create(const std::string& game_id, const GameState& state);
  std::optional<SessionRecord> get(const std::string& session_id) const;
  // Runs `step` under the session's exclusive lock. A returned state is
  // persisted before the lock is released; nullopt leaves the record as is.
  // kUnknownSession.
  SessionRecord update(const std::string& session_id,
                       const std::function<std::optional<GameState>(const SessionRecord&)>& step);

 private:
  std::filesystem::path file_of(const std::string& session_id) const;
  std::mutex& lock_of(const std::string& session_id);

  std::filesystem::path root_;
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

struct ServiceReply {
  int status = 200;
  Json body;
};

class Service {
 public:
  Service(ServiceConfig config, std::shared_ptr<const DataSource> source);
  ~Service();

  void set_fault_hook(FaultHook hook) { fault_hook_ = std::move(hook); }

  // Transport-independent handlers; each returns the HTTP status and body,
  // mapping forge::Error to {code, stage, message}.
  ServiceReply create_game(const Json& request, const std::optional<std::string>& idempotency_key);
  ServiceReply get_game(const std::string& game_id) const;
  ServiceReply get_score(const std::string& game_id) const;
  ServiceReply create_session(const std::string& game_id);
  ServiceReply get_session(const std::string& session_id) const;
  ServiceReply post_action(const std::string& session_id, const Json& request);
  ServiceReply post_feedback(const std::string& game_id, const Json& request);
  ServiceReply bias_audit(std::optional<std::size_t> limit, std::size_t top) const;

  // Registers every route on `server`.
  void install(httplib::Server& server);
  // Blocks serving on config().host:config().port.
  void listen();
  void stop();

  const ServiceConfig& config() const { return config_; }
  GameStore& games() { return games_; }
  FeedbackLedger& ledger() { return ledger_; }

 private:
  ServiceConfig config_;
  std::shared_ptr<const DataSource> source_;
  GameStore games_;
  SessionStore sessions_;
  FeedbackLedger ledger_;
  FaultHook fault_hook_;
  std::mutex idempotency_mutex_;
  std::unique_ptr<httplib::Server> server_;
};

int http_status_for(ErrorCode code);
Json error_body(const Error& error);

}  // namespace forge
