#include "forge/service.h"

#include <openssl/rand.h>

#include <algorithm>
#include <cstdlib>
#include <regex>

#include "forge/error.h"
#include "httplib.h"

namespace forge {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kStagingPrefix = ".staging-";

bool is_token(std::string_view text) {
  return text.size() == 32 &&
         std::all_of(text.begin(), text.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

Json ids_to_json(const std::vector<EntityId>& ids) {
  Json out = Json::array();
  for (const auto& id : ids) out.push_back(id.iri());
  return out;
}

Json set_to_json(const std::set<EntityId>& ids) { return ids_to_json({ids.begin(), ids.end()}); }

std::string string_field(const Json& json, std::string_view key, const std::string& origin) {
  if (!json.contains(key) || !json[std::string(key)].is_string()) {
    throw Error(ErrorCode::kInvalidArgument, origin + ": '" + std::string(key) + "' must be a string");
  }
  return json[std::string(key)].get<std::string>();
}

// Runs `body`, turning every failure into an error reply.
template <typename Fn>
ServiceReply guarded(Fn&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return {http_status_for(e.code()), error_body(e)};
  } catch (const std::exception& e) {
    Json out = Json::object();
    out["code"] = "internal-error";
    out["stage"] = "service";
    out["message"] = e.what();
    return {500, out};
  }
}

Json game_summary(const StoredGame& game) {
  Json out = Json::object();
  out["game_id"] = game.game_id;
  out["spec_id"] = game.spec_id;
  out["created_at"] = game.created_at;
  out["mode"] = game_mode_name(game.spec->mode);
  out["victim"] = game.spec->victim.iri();
  out["seed"] = game.spec->seed;
  out["suspects"] = ids_to_json(game.spec->suspects.ids());
  out["score"] = score_to_json(game.score);
  return out;
}

Json meta_to_json(const StoredGame& game) {
  Json out = Json::object();
  out["game_id"] = game.game_id;
  out["spec_id"] = game.spec_id;
  out["created_at"] = game.created_at;
  out["score"] = score_to_json(game.score);
  return out;
}

std::optional<std::string> env(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

}  // namespace

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParseError:
      return 400;
    case ErrorCode::kNotFound:
    case ErrorCode::kUnknownGame:
    case ErrorCode::kUnknownSession:
    case ErrorCode::kUnknownSuspect:
      return 404;
    case ErrorCode::kDuplicateKey:
    case ErrorCode::kIllegalAction:
      return 409;
    case ErrorCode::kNetworkUnreachable:
    case ErrorCode::kMalformedSource:
      return 502;
    case ErrorCode::kStorageUnavailable:
    case ErrorCode::kMissingManifest:
    case ErrorCode::kChecksumMismatch:
      return 503;
    case ErrorCode::kNoGeo:
    case ErrorCode::kNoPath:
    case ErrorCode::kPoolTooSmall:
    case ErrorCode::kInsufficientFacts:
    case ErrorCode::kInsufficientLocations:
    case ErrorCode::kNoLiableFact:
    case ErrorCode::kAmbiguousVictim:
    case ErrorCode::kInvalidSpec:
      return 422;
  }
  return 500;
}

Json error_body(const Error& error) {
  Json out = Json::object();
  out["code"] = error_code_name(error.code());
  out["stage"] = error.stage();
  out["message"] = error.what();
  return out;
}

// ------------------------------------------------------------------ config

Json ServiceConfig::to_json() const {
  Json out = Json::object();
  out["source"] = source == SourceMode::kFixture ? "fixture" : "live";
  out["fixtures"] = fixtures.string();
  out["live"] = live.to_json();
  out["data_dir"] = data_dir.string();
  out["host"] = host;
  out["port"] = port;
  out["generator"] = generator.to_json();
  return out;
}

ServiceConfig ServiceConfig::from_json(const Json& json, const std::string& origin, const fs::path& base_dir) {
  if (!json.is_object()) throw Error(ErrorCode::kInvalidArgument, origin + ": config must be an object");
  ServiceConfig config;
  auto resolve = [&](const std::string& text) {
    const fs::path p(text);
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  for (const auto& [key, value] : json.items()) {
    if (key == "source") {
      const std::string mode = value.is_string() ? value.get<std::string>() : "";
      if (mode == "fixture") config.source = SourceMode::kFixture;
      else if (mode == "live") config.source = SourceMode::kLive;
      else throw Error(ErrorCode::kInvalidArgument, origin + ": source must be \"fixture\" or \"live\"");
    } else if (key == "fixtures") {
      config.fixtures = resolve(string_field(json, key, origin));
    } else if (key == "live") {
      config.live = LiveConfig::from_json(value, origin + ": live");
      if (!config.live.cache_dir.empty()) config.live.cache_dir = resolve(config.live.cache_dir.string());
    } else if (key == "data_dir") {
      config.data_dir = resolve(string_field(json, key, origin));
    } else if (key == "host") {
      config.host = string_field(json, key, origin);
    } else if (key == "port") {
      if (!value.is_number_integer() || value.get<std::int64_t>() < 0 || value.get<std::int64_t>() > 65535) {
        throw Error(ErrorCode::kInvalidArgument, origin + ": port must be in [0, 65535]");
      }
      config.port = static_cast<int>(value.get<std::int64_t>());
    } else if (key == "generator") {
      config.generator = GeneratorConfig::from_json(value, origin + ": generator");
    } else {
      throw Error(ErrorCode::kInvalidArgument, origin + ": unknown config key '" + key + "'");
    }
  }
  if (config.source == SourceMode::kFixture && config.fixtures.empty()) {
    throw Error(ErrorCode::kInvalidArgument, origin + ": fixture mode needs 'fixtures'");
  }
  config.generator.validate();
  return config;
}

ServiceConfig load_service_config(const std::optional<fs::path>& path) {
  std::optional<fs::path> chosen = path;
  if (auto from_env = env(kConfigEnv)) chosen = fs::path(*from_env);
  ServiceConfig config;
  if (chosen) {
    std::error_code ec;
    if (!fs::exists(*chosen, ec)) {
      throw Error(ErrorCode::kInvalidArgument, "config file " + chosen->string() + " does not exist");
    }
    config = ServiceConfig::from_json(parse_json(read_file(*chosen), chosen->string()), chosen->string(),
                                      chosen->parent_path());
  }
  if (auto port = env(kPortEnv)) {
    try {
      std::size_t used = 0;
      const int value = std::stoi(*port, &used);
      if (used != port->size() || value < 0 || value > 65535) throw std::out_of_range("port");
      config.port = value;
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, std::string(kPortEnv) + " must be a port number, got '" + *port + "'");
    }
  }
  return config;
}

std::shared_ptr<const DataSource> open_source(const ServiceConfig& config) {
  if (config.source == SourceMode::kLive) return std::make_shared<LiveSource>(config.live);
  return FixtureCorpus::load(config.fixtures);
}

std::string random_token() {
  unsigned char bytes[16];
  if (RAND_bytes(bytes, sizeof bytes) != 1) {
    throw Error(ErrorCode::kStorageUnavailable, "system random source unavailable", "service");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char b : bytes) {
    out += kHex[b >> 4];
    out += kHex[b & 0xf];
  }
  return out;
}

// ------------------------------------------------------------------ games

GameStore::GameStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::kStorageUnavailable, "cannot create " + root_.string(), "service");
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (entry.path().filename().string().rfind(kStagingPrefix, 0) == 0) fs::remove_all(entry.path(), ec);
  }
}

StoredGame GameStore::put(const GameSpec& spec, const FaultHook& hook) {
  const ValidationReport report = validate_solvability(spec);
  if (!report.passed()) {
    throw Error(ErrorCode::kInvalidSpec, "refusing to store an unsolvable spec: " + report.to_json().dump(), "service");
  }
  StoredGame game;
  game.game_id = random_token();
  game.spec_id = game_spec_id(spec);
  game.created_at = utc_now_iso8601();
  game.score = score_game(spec);
  game.spec = std::make_shared<const GameSpec>(spec);

  const fs::path staging = root_ / (std::string(kStagingPrefix) + game.game_id);
  const fs::path target = root_ / game.game_id;
  std::error_code ec;
  fs::create_directories(staging, ec);
  if (ec) throw Error(ErrorCode::kStorageUnavailable, "cannot create " + staging.string(), "service");
  try {
    write_file_atomic(staging / "spec.json", serialize_game_spec(spec));
    write_file_atomic(staging / "meta.json", canonical_dump(meta_to_json(game)));
    if (hook) hook("staged");
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
  std::unique_lock lock(mutex_);
  fs::rename(staging, target, ec);
  if (ec) {
    fs::remove_all(staging, ec);
    throw Error(ErrorCode::kStorageUnavailable, "cannot publish game " + game.game_id, "service");
  }
  cache_[game.game_id] = game;
  return game;
}

std::optional<StoredGame> GameStore::load(const std::string& game_id) const {
  const fs::path dir = root_ / game_id;
  std::error_code ec;
  if (!fs::exists(dir / "meta.json", ec) || !fs::exists(dir / "spec.json", ec)) return std::nullopt;
  const std::string meta_origin = (dir / "meta.json").string();
  const Json meta = parse_json(read_file(dir / "meta.json"), meta_origin);
  auto spec = std::make_shared<GameSpec>(parse_game_spec(read_file(dir / "spec.json"), (dir / "spec.json").string()));
  StoredGame game;
  game.game_id = require_string(meta, "game_id", meta_origin);
  game.spec_id = require_string(meta, "spec_id", meta_origin);
  game.created_at = require_string(meta, "created_at", meta_origin);
  const Json& score = require(meta, "score", meta_origin);
  game.score.transformation = require_number(score, "transformation", meta_origin);
  game.score.functionality = require_number(score, "functionality", meta_origin);
  if (game.game_id != game_id || game.spec_id != game_spec_id(*spec)) {
    throw Error(ErrorCode::kChecksumMismatch, "stored game " + game_id + " does not match its metadata", "service");
  }
  game.spec = std::move(spec);
  return game;
}

std::optional<StoredGame> GameStore::get(const std::string& game_id) const {
  if (!is_token(game_id)) return std::nullopt;
  {
    std::shared_lock lock(mutex_);
    if (const auto it = cache_.find(game_id); it != cache_.end()) return it->second;
  }
  auto game = load(game_id);
  if (game) {
    std::unique_lock lock(mutex_);
    cache_.emplace(game_id, *game);
  }
  return game;
}

std::vector<std::string> GameStore::ids() const {
  std::vector<std::pair<std::string, std::string>> found;  // (created_at, id)
  std::shared_lock lock(mutex_);
  for (const auto& entry : fs::directory_iterator(root_)) {
    const std::string name = entry.path().filename().string();
    if (!is_token(name) || !entry.is_directory()) continue;
    const fs::path meta = entry.path() / "meta.json";
    std::error_code ec;
    if (!fs::exists(meta, ec)) continue;
    const Json json = parse_json(read_file(meta), meta.string());
    found.emplace_back(require_string(json, "created_at", meta.string()), name);
  }
  std::sort(found.begin(), found.end());
  std::vector<std::string> out;
  for (auto& [created, id] : found) out.push_back(std::move(id));
  return out;
}

// ------------------------------------------------------------------ sessions

Json session_record_to_json(const SessionRecord& record) {
  Json out = Json::object();
  out["session_id"] = record.session_id;
  out["game_id"] = record.game_id;
  out["state"] = game_state_to_json(record.state);
  return out;
}

SessionRecord session_record_from_json(const Json& json, const std::string& origin) {
  SessionRecord record;
  record.session_id = require_string(json, "session_id", origin);
  record.game_id = require_string(json, "game_id", origin);
  record.state = game_state_from_json(require(json, "state", origin), origin);
  return record;
}

SessionStore::SessionStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::kStorageUnavailable, "cannot create " + root_.string(), "service");
}

fs::path SessionStore::file_of(const std::string& session_id) const { return root_ / (session_id + ".json"); }

std::mutex& SessionStore::lock_of(const std::string& session_id) {
  std::lock_guard guard(locks_mutex_);
  auto& slot = locks_[session_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

SessionRecord SessionStore::create(const std::string& game_id, const GameState& state) {
  SessionRecord record{random_token(), game_id, state};
  write_file_atomic(file_of(record.session_id), canonical_dump(session_record_to_json(record)));
  return record;
}

std::optional<SessionRecord> SessionStore::get(const std::string& session_id) const {
  if (!is_token(session_id)) return std::nullopt;
  const fs::path file = file_of(session_id);
  std::error_code ec;
  if (!fs::exists(file, ec)) return std::nullopt;
  return session_record_from_json(parse_json(read_file(file), file.string()), file.string());
}

SessionRecord SessionStore::update(const std::string& session_id,
                                   const std::function<std::optional<GameState>(const SessionRecord&)>& step) {
  if (!is_token(session_id)) throw Error(ErrorCode::kUnknownSession, "no session " + session_id, "service");
  std::lock_guard guard(lock_of(session_id));
  auto record = get(session_id);
  if (!record) throw Error(ErrorCode::kUnknownSession, "no session " + session_id, "service");
  if (auto next = step(*record)) {
    record->state = std::move(*next);
    write_file_atomic(file_of(session_id), canonical_dump(session_record_to_json(*record)));
  }
  return *record;
}

// ------------------------------------------------------------------ service

Service::Service(ServiceConfig config, std::shared_ptr<const DataSource> source)
    : config_(std::move(config)),
      source_(std::move(source)),
      games_(config_.data_dir / "games"),
      sessions_(config_.data_dir / "sessions"),
      ledger_(config_.data_dir / "feedback.tsv") {
  std::error_code ec;
  fs::create_directories(config_.data_dir / "idempotency", ec);
  if (ec) throw Error(ErrorCode::kStorageUnavailable, "cannot create " + config_.data_dir.string(), "service");
}

Service::~Service() = default;

ServiceReply Service::create_game(const Json& request, const std::optional<std::string>& idempotency_key) {
  return guarded([&]() -> ServiceReply {
    const std::string origin = "POST /games";
    if (!request.is_object()) throw Error(ErrorCode::kInvalidArgument, origin + ": body must be an object", "service");
    for (const auto& [key, value] : request.items()) {
      if (key != "victim" && key != "mode" && key != "seed" && key != "options") {
        throw Error(ErrorCode::kInvalidArgument, origin + ": unknown field '" + key + "'", "service");
      }
    }
    const std::string victim = string_field(request, "victim", origin);
    const auto mode = parse_game_mode(string_field(request, "mode", origin));
    if (!mode) throw Error(ErrorCode::kInvalidArgument, origin + ": unknown mode", "service");
    if (!request.contains("seed") || !request["seed"].is_number_unsigned()) {
      throw Error(ErrorCode::kInvalidArgument, origin + ": 'seed' must be a non-negative integer", "service");
    }
    const std::uint64_t seed = request["seed"].get<std::uint64_t>();
    Json merged = config_.generator.to_json();
    if (request.contains("options")) {
      if (!request["options"].is_object()) {
        throw Error(ErrorCode::kInvalidArgument, origin + ": 'options' must be an object", "service");
      }
      merged.merge_patch(request["options"]);
    }
    GeneratorConfig generator;
    try {
      generator = GeneratorConfig::from_json(merged, origin + ": options");
      generator.validate();
    } catch (const Error& e) {
      throw e.with_stage("config");
    }

    Json normalized = Json::object();
    normalized["victim"] = victim;
    normalized["mode"] = game_mode_name(*mode);
    normalized["seed"] = seed;
    normalized["options"] = request.value("options", Json::object());
    const std::string request_hash = sha256_hex(canonical_dump(normalized));

    std::unique_lock<std::mutex> keyed;
    fs::path key_file;
    if (idempotency_key) {
      keyed = std::unique_lock(idempotency_mutex_);
      key_file = config_.data_dir / "idempotency" / (sha256_hex(*idempotency_key) + ".json");
      std::error_code ec;
      if (fs::exists(key_file, ec)) {
        const Json entry = parse_json(read_file(key_file), key_file.string());
        if (require_string(entry, "request_hash", key_file.string()) != request_hash) {
          throw Error(ErrorCode::kDuplicateKey, "idempotency key already used for a different request", "service");
        }
        const std::string game_id = require_string(entry, "game_id", key_file.string());
        const auto game = games_.get(game_id);
        if (!game) throw Error(ErrorCode::kUnknownGame, "idempotency key refers to missing game " + game_id, "service");
        return {200, game_summary(*game)};
      }
    }

    const GameSpec spec = assemble_game(*source_, victim, *mode, seed, generator, ledger_.exclusions());
    if (fault_hook_) fault_hook_("generated");
    const StoredGame game = games_.put(spec, fault_hook_);
    if (idempotency_key) {
      Json entry = Json::object();
      entry["request_hash"] = request_hash;
      entry["game_id"] = game.game_id;
      write_file_atomic(key_file, canonical_dump(entry));
    }
    return {201, game_summary(game)};
  });
}

ServiceReply Service::get_game(const std::string& game_id) const {
  return guarded([&]() -> ServiceReply {
    const auto game = games_.get(game_id);
    if (!game) throw Error(ErrorCode::kUnknownGame, "no game " + game_id, "service");
    Json out = meta_to_json(*game);
    out["spec"] = game_spec_to_json(*game->spec);
    return {200, out};
  });
}

ServiceReply Service::get_score(const std::string& game_id) const {
  return guarded([&]() -> ServiceReply {
    const auto game = games_.get(game_id);
    if (!game) throw Error(ErrorCode::kUnknownGame, "no game " + game_id, "service");
    const FunctionalityCount count = count_functionality(*game->spec);
    Json out = Json::object();
    out["game_id"] = game->game_id;
    out["score"] = score_to_json(game->score);
    out["functionality"] = {{"gating", count.gating}, {"decorative", count.decorative}, {"total", count.total()}};
    return {200, out};
  });
}

ServiceReply Service::create_session(const std::string& game_id) {
  return guarded([&]() -> ServiceReply {
    const auto game = games_.get(game_id);
    if (!game) throw Error(ErrorCode::kUnknownGame, "no game " + game_id, "service");
    const GameState state = new_session(*game->spec);
    const SessionRecord record = sessions_.create(game_id, state);
    Json out = session_record_to_json(record);
    out["observation"] = describe_location(*game->spec, state);
    return {201, out};
  });
}

ServiceReply Service::get_session(const std::string& session_id) const {
  return guarded([&]() -> ServiceReply {
    const auto record = sessions_.get(session_id);
    if (!record) throw Error(ErrorCode::kUnknownSession, "no session " + session_id, "service");
    const auto game = games_.get(record->game_id);
    if (!game) throw Error(ErrorCode::kUnknownGame, "no game " + record->game_id, "service");
    const Knowledge k = knowledge_of(*game->spec, record->state);
    Json out = session_record_to_json(*record);
    Json knowledge = Json::object();
    knowledge["unlocked"] = set_to_json(k.unlocked);
    knowledge["known"] = set_to_json(k.known);
    knowledge["revealed_evidence"] = set_to_json(k.revealed_evidence);
    out["knowledge"] = std::move(knowledge);
    out["observation"] = describe_location(*game->spec, record->state);
    return {200, out};
  });
}

ServiceReply Service::post_action(const std::string& session_id, const Json& request) {
  return guarded([&]() -> ServiceReply {
    const Action action = action_from_json(request, "POST /sessions/" + session_id + "/actions");
    std::shared_ptr<const GameSpec> spec;
    StepResult result;
    bool just_lost = false;
    const SessionRecord record = sessions_.update(session_id, [&](const SessionRecord& current) -> std::optional<GameState> {
      const auto game = games_.get(current.game_id);
      if (!game) throw Error(ErrorCode::kUnknownGame, "no game " + current.game_id, "service");
      spec = game->spec;
      result = apply_action(*spec, current.state, action);
      if (result.state == current.state) return std::nullopt;
      just_lost = current.state.status != GameStatus::kLost && result.state.status == GameStatus::kLost;
      return result.state;
    });
    if (just_lost) {
      if (const auto culprit = spec->suspects.culprit()) {
        ledger_.record(*culprit, FeedbackKind::kUnsolved, record.game_id);
      }
    }
    Json out = session_record_to_json(record);
    out["observation"] = result.observation;
    out["verdict"] = result.verdict ? Json(verdict_name(*result.verdict)) : Json(nullptr);
    return {200, out};
  });
}

ServiceReply Service::post_feedback(const std::string& game_id, const Json& request) {
  return guarded([&]() -> ServiceReply {
    const std::string origin = "POST /games/" + game_id + "/feedback";
    const auto game = games_.get(game_id);
    if (!game) throw Error(ErrorCode::kUnknownGame, "no game " + game_id, "service");
    if (!request.is_object()) throw Error(ErrorCode::kInvalidArgument, origin + ": body must be an object", "service");
    const EntityId suspect(string_field(request, "suspect", origin));
    FeedbackKind kind = FeedbackKind::kReport;
    if (request.contains("kind")) {
      const auto parsed = parse_feedback_kind(string_field(request, "kind", origin));
      if (!parsed) throw Error(ErrorCode::kInvalidArgument, origin + ": kind must be report or unsolved", "service");
      kind = *parsed;
    }
    if (!game->spec->suspects.contains(suspect)) {
      throw Error(ErrorCode::kUnknownSuspect, suspect.iri() + " is not a suspect of game " + game_id, "service");
    }
    const ExclusionList excluded = ledger_.record(suspect, kind, game_id);
    Json out = Json::object();
    out["game_id"] = game_id;
    out["suspect"] = suspect.iri();
    out["kind"] = feedback_kind_name(kind);
    out["excluded"] = set_to_json(excluded);
    return {201, out};
  });
}

ServiceReply Service::bias_audit(std::optional<std::size_t> limit, std::size_t top) const {
  return guarded([&]() -> ServiceReply {
    std::vector<std::string> ids = games_.ids();
    if (limit && *limit < ids.size()) ids.erase(ids.begin(), ids.end() - static_cast<std::ptrdiff_t>(*limit));
    std::vector<GameSpec> specs;
    for (const auto& id : ids) {
      if (const auto game = games_.get(id)) specs.push_back(*game->spec);
    }
    return {200, bias_report_to_json(forge::bias_audit(specs, RegionTable::builtin(), top))};
  });
}

void Service::install(httplib::Server& server) {
  auto send = [](httplib::Response& res, const ServiceReply& reply) {
    res.status = reply.status;
    res.set_content(canonical_dump(reply.body), "application/json");
  };
  auto parse_body = [](const httplib::Request& req) -> Json {
    if (req.body.empty()) return Json::object();
    return parse_json(req.body, req.method + " " + req.path);
  };
  auto with_body = [=](const httplib::Request& req, httplib::Response& res, auto&& handler) {
    Json body;
    try {
      body = parse_body(req);
    } catch (const Error& e) {
      send(res, {400, error_body(e.with_stage("service"))});
      return;
    }
    send(res, handler(body));
  };
  auto parse_count = [](const httplib::Request& req, const char* name) -> std::optional<std::size_t> {
    if (!req.has_param(name)) return std::nullopt;
    const std::string text = req.get_param_value(name);
    if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw Error(ErrorCode::kInvalidArgument, std::string(name) + " must be a non-negative integer", "service");
    }
    return static_cast<std::size_t>(std::stoull(text));
  };

  server.Post("/games", [=, this](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> key;
    if (req.has_header("Idempotency-Key")) key = req.get_header_value("Idempotency-Key");
    with_body(req, res, [&](const Json& body) { return create_game(body, key); });
  });
  server.Get(R"(/games/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
    send(res, get_game(req.matches[1]));
  });
  server.Get(R"(/games/([^/]+)/score)", [=, this](const httplib::Request& req, httplib::Response& res) {
    send(res, get_score(req.matches[1]));
  });
  server.Post(R"(/games/([^/]+)/sessions)", [=, this](const httplib::Request& req, httplib::Response& res) {
    send(res, create_session(req.matches[1]));
  });
  server.Post(R"(/games/([^/]+)/feedback)", [=, this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    with_body(req, res, [&](const Json& body) { return post_feedback(id, body); });
  });
  server.Get(R"(/sessions/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
    send(res, get_session(req.matches[1]));
  });
  server.Post(R"(/sessions/([^/]+)/actions)", [=, this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    with_body(req, res, [&](const Json& body) { return post_action(id, body); });
  });
  server.Get("/audits/bias", [=, this](const httplib::Request& req, httplib::Response& res) {
    send(res, guarded([&]() {
           const auto limit = parse_count(req, "limit");
           const auto top = parse_count(req, "top").value_or(kDefaultTopLocations);
           return bias_audit(limit, top);
         }));
  });
  server.set_error_handler([=](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    Json out = Json::object();
    out["code"] = res.status == 404 ? "not-found" : "invalid-argument";
    out["stage"] = "service";
    out["message"] = "no route for " + req.method + " " + req.path;
    res.set_content(canonical_dump(out), "application/json");
  });
}

void Service::listen() {
  server_ = std::make_unique<httplib::Server>();
  install(*server_);
  if (!server_->listen(config_.host, config_.port)) {
    throw Error(ErrorCode::kStorageUnavailable,
                "cannot listen on " + config_.host + ":" + std::to_string(config_.port), "service");
  }
}

void Service::stop() {
  if (server_) server_->stop();
}

}  // namespace forge
