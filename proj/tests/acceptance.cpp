// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "forge/dialog.h"
#include "forge/error.h"
#include "forge/graph.h"
#include "forge/metrics.h"
#include "forge/plot.h"
#include "forge/rng.h"
#include "forge/runtime.h"
#include "forge/service.h"
#include "httplib.h"
#include "test_support.h"

using namespace forge;
using forge::test::dbr;

namespace {

constexpr int kBatchSeeds = 100;
constexpr double kBatchBudgetSeconds = 60.0;
constexpr int kEvolutionPools = 25;
constexpr std::size_t kEvolutionMaxPool = 20;
constexpr int kEvolutionK = 5;
constexpr double kEvolutionTolerance = 1e-9;
constexpr int kEvolutionRequiredOptimal = 23;
constexpr int kPathGraphs = 50;
constexpr int kPathMaxNodes = 10;
constexpr int kDataAgentSeeds = 20;
constexpr const char* kVictim = "Justin Bieber";

class Checker {
 public:
  // Runs one criterion; the body returns a detail string and sets `ok`.
  void run(const std::string& name, const std::function<std::string(bool&)>& body) {
    bool ok = false;
    std::string detail;
    try {
      detail = body(ok);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
    failures_ += ok ? 0 : 1;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

struct TempDir {
  TempDir() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("forge-accept-" + std::to_string(rd()) + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path path;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// ------------------------------------------------------------ batch

struct BatchRun {
  std::vector<GameSpec> specs;
  std::vector<std::string> bytes;
  int generated = 0;
  int valid = 0;
  int won = 0;
  double seconds = 0.0;
  std::string first_error;
};

BatchRun run_batch(const DataSource& source) {
  BatchRun run;
  const auto start = std::chrono::steady_clock::now();
  for (int seed = 1; seed <= kBatchSeeds; ++seed) {
    try {
      GameSpec spec = assemble_game(source, kVictim, GameMode::kWikimystery, seed, GeneratorConfig{});
      ++run.generated;
      if (validate_solvability(spec).passed()) ++run.valid;
      if (solve_greedy(spec).won) ++run.won;
      run.bytes.push_back(serialize_game_spec(spec));
      run.specs.push_back(std::move(spec));
    } catch (const Error& e) {
      if (run.first_error.empty()) run.first_error = fmt("seed %d: %s", seed, e.what());
    }
  }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

// ------------------------------------------------------------ evolution

SuspectPool random_pool(std::size_t n, std::mt19937_64& engine) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SuspectPool pool;
  for (std::size_t i = 0; i < n; ++i) {
    pool.candidates.emplace_back(fmt("urn:accept:c%02zu", i));
    pool.to_victim.push_back(unit(engine));
  }
  pool.pairwise.assign(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pool.pairwise[i][j] = pool.pairwise[j][i] = unit(engine);
  }
  return pool;
}

double exhaustive_best(const SuspectPool& pool, std::size_t k) {
  double best = -1.0;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (pick.size() == k) {
      double pair = 0.0, victim = 0.0;
      int pairs = 0;
      for (std::size_t a = 0; a < k; ++a) {
        victim += pool.to_victim[pick[a]];
        for (std::size_t b = a + 1; b < k; ++b, ++pairs) pair += pool.pairwise[pick[a]][pick[b]];
      }
      best = std::max(best, (pairs ? pair / pairs : 0.0) + victim / static_cast<double>(k));
      return;
    }
    for (std::size_t i = from; i < pool.size(); ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return best;
}

// ------------------------------------------------------------ paths

KnowledgeGraph random_graph(int n, Rng& rng) {
  std::map<EntityId, Entity> entities;
  auto id = [](int i) { return EntityId("urn:accept:n" + std::to_string(i)); };
  for (int i = 0; i < n; ++i) {
    Entity e;
    e.id = id(i);
    e.label = "n" + std::to_string(i);
    e.kind = EntityKind::kPerson;
    entities.emplace(e.id, e);
  }
  std::vector<Edge> edges;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (rng.below(100) < 22) edges.push_back({id(a), Predicate::kColleague, id(b)});
    }
  }
  return KnowledgeGraph(std::move(entities), std::move(edges));
}

std::optional<std::vector<EntityId>> brute_force_path(const KnowledgeGraph& g, const EntityId& src,
                                                      const EntityId& dst, int max_len) {
  std::optional<std::vector<EntityId>> best;
  std::vector<EntityId> current{src};
  std::set<EntityId> on_path{src};
  std::function<void()> walk = [&] {
    if (current.back() == dst) {
      if (!best || current.size() < best->size() || (current.size() == best->size() && current < *best)) {
        best = current;
      }
      return;
    }
    if (static_cast<int>(current.size()) - 1 >= max_len) return;
    for (const auto& next : g.neighbors(current.back())) {
      if (on_path.count(next)) continue;
      current.push_back(next);
      on_path.insert(next);
      walk();
      on_path.erase(next);
      current.pop_back();
    }
  };
  walk();
  return best;
}

// ------------------------------------------------------------ mode contracts

bool stated_in_bundle(const GameSpec& spec, const Fact& claim) {
  const auto it = spec.bundle.find(claim.subject);
  if (it == spec.bundle.end()) return false;
  for (const auto& fact : it->second.facts) {
    if (same_claim(fact, claim)) return true;
  }
  return false;
}

// Every accusation attempted with fewer than all evidence items collected
// must be rejected. Walks the greedy solver's actions and tries every
// suspect at each intermediate state.
bool short_accusations_rejected(const GameSpec& spec, int& attempts) {
  const SolveResult solved = solve_greedy(spec);
  GameState state = new_session(spec);
  for (const auto& action : solved.actions) {
    std::vector<EntityId> presented;
    for (const auto& e : spec.evidence) {
      if (state.collected.count(e.id)) presented.push_back(e.id);
    }
    if (presented.size() < spec.evidence.size() && state.status == GameStatus::kInProgress) {
      for (const auto& suspect : spec.suspects.ids()) {
        ++attempts;
        const StepResult r = evaluate_accusation(spec, state, suspect, presented);
        if (r.verdict != Verdict::kRejected || !(r.state == state)) return false;
      }
    }
    if (action.kind == ActionKind::kAccuse) break;
    state = apply_action(spec, state, action).state;
  }
  return true;
}

// ------------------------------------------------------------ metrics

NpcRecord npc(const std::string& name, const std::string& home, std::size_t images = 0) {
  NpcRecord record;
  record.entity = dbr(name);
  record.home = dbr(home);
  for (std::size_t i = 0; i < images; ++i) record.images.push_back({"http://img/" + std::to_string(i), name, 1.0});
  return record;
}

Location location(const std::string& name, std::size_t features = 0) {
  Location l;
  l.id = dbr(name);
  l.map.place = l.id;
  for (std::size_t i = 0; i < features; ++i) l.map.features.push_back({FeatureKind::kRoad, "road", {{0, 0}, {0, 1}}});
  return l;
}

ClueRecord casefile_link(const std::string& at, const std::string& element, const std::string& unlocks) {
  ClueRecord r;
  r.id = clue_id(1);
  r.giver = EntityId(kCaseFileId);
  r.at_location = dbr(at);
  r.about = dbr(element);
  r.element = dbr(element);
  r.unlocks = dbr(unlocks);
  return r;
}

ItemRecord casefile(const std::string& at) {
  ItemRecord item;
  item.id = EntityId(kCaseFileId);
  item.location = dbr(at);
  return item;
}

EvidenceItem evidence(std::size_t n, const std::string& at) {
  EvidenceItem e;
  e.id = evidence_id(n);
  e.placed_at = dbr(at);
  return e;
}

struct HandCount {
  GameSpec spec;
  std::size_t gating;
  std::size_t decorative;
};

std::vector<HandCount> constructed_specs() {
  std::vector<HandCount> out;
  {
    // gating: A, casefile, L1 (start), L2 (unlocked), 2 evidence; decorative: B, 2 images, 1 map
    GameSpec spec;
    spec.start = dbr("L1");
    spec.npcs = {npc("A", "L2", 2), npc("B", "L1")};
    spec.items = {casefile("L1")};
    spec.locations = {location("L1", 3), location("L2")};
    spec.clue_chain = {casefile_link("L1", "A", "L2")};
    spec.evidence = {evidence(1, "L2"), evidence(2, "L2")};
    out.push_back({spec, 6, 4});
  }
  {
    GameSpec spec;
    spec.start = dbr("L1");
    spec.npcs = {npc("A", "L2")};
    spec.items = {casefile("L1")};
    spec.locations = {location("L1"), location("L2")};
    spec.clue_chain = {casefile_link("L1", "A", "L2")};
    out.push_back({spec, 4, 0});
  }
  {
    GameSpec spec;
    spec.start = dbr("L1");
    spec.npcs = {npc("A", "L1", 3)};
    out.push_back({spec, 0, 4});
  }
  return out;
}

std::vector<GameSpec> bias_batch(const DataSource& source) {
  const std::vector<std::tuple<std::string, GameMode, std::uint64_t>> plan{
      {"Justin Bieber", GameMode::kWikimystery, 1}, {"Justin Bieber", GameMode::kWikimystery, 2},
      {"Justin Bieber", GameMode::kDataAgent, 3},   {"Justin Bieber", GameMode::kLinkpath, 4},
      {"Rihanna", GameMode::kWikimystery, 1},       {"Rihanna", GameMode::kLinkpath, 2},
      {"Drake", GameMode::kWikimystery, 1},         {"Albert Einstein", GameMode::kLinkpath, 1},
      {"Marie Curie", GameMode::kLinkpath, 1},      {"Selena Gomez", GameMode::kDataAgent, 1},
  };
  std::vector<GameSpec> specs;
  for (const auto& [victim, mode, seed] : plan) specs.push_back(assemble_game(source, victim, mode, seed, GeneratorConfig{}));
  return specs;
}

// ------------------------------------------------------------ service

struct HttpService {
  explicit HttpService(const std::filesystem::path& dir) : service(config_for(dir), test::standard()) {
    service.install(server);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~HttpService() {
    server.stop();
    thread.join();
  }
  static ServiceConfig config_for(const std::filesystem::path& dir) {
    ServiceConfig config;
    config.fixtures = test::kStandard;
    config.data_dir = dir;
    return config;
  }
  std::pair<int, Json> post(const std::string& path, const Json& body) {
    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(std::chrono::seconds(30));
    const auto result = client.Post(path, canonical_dump(body), "application/json");
    if (!result) throw std::runtime_error("no response for POST " + path);
    return {result->status, parse_json(result->body, path)};
  }
  std::pair<int, Json> get(const std::string& path) {
    httplib::Client client("127.0.0.1", port);
    const auto result = client.Get(path);
    if (!result) throw std::runtime_error("no response for GET " + path);
    return {result->status, parse_json(result->body, path)};
  }

  Service service;
  httplib::Server server;
  std::thread thread;
  int port = 0;
};

Json bieber(std::uint64_t seed) { return {{"victim", kVictim}, {"mode", "wikimystery"}, {"seed", seed}}; }

std::size_t staging_dirs(const std::filesystem::path& games) {
  std::size_t n = 0;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(games, ec)) {
    if (entry.path().filename().string().rfind(".staging-", 0) == 0) ++n;
  }
  return n;
}

// Each crash point leaves neither a listed nor a loadable game.
std::string crash_injection(bool& ok) {
  TempDir dir;
  const auto games = dir.path / "games";
  int clean = 0;
  for (const char* point : {"generated", "staged"}) {
    Service service(HttpService::config_for(dir.path), test::standard());
    service.set_fault_hook([point](std::string_view at) {
      if (at == point) throw std::runtime_error("injected crash");
    });
    const ServiceReply reply = service.create_game(bieber(7), std::nullopt);
    if (reply.status == 500 && service.games().ids().empty() && staging_dirs(games) == 0) ++clean;
  }
  const pid_t child = ::fork();
  if (child < 0) throw std::runtime_error("fork failed");
  if (child == 0) {
    Service service(HttpService::config_for(dir.path), test::standard());
    service.set_fault_hook([](std::string_view at) {
      if (at == "staged") ::_exit(3);
    });
    service.create_game(bieber(7), std::nullopt);
    ::_exit(0);
  }
  int status = 0;
  ::waitpid(child, &status, 0);
  const bool died = WIFEXITED(status) && WEXITSTATUS(status) == 3;
  const std::size_t left_behind = staging_dirs(games);
  Service reopened(HttpService::config_for(dir.path), test::standard());
  bool unreadable = reopened.games().ids().empty() && staging_dirs(games) == 0;
  for (const auto& entry : std::filesystem::directory_iterator(games)) {
    if (reopened.games().get(entry.path().filename().string())) unreadable = false;
  }
  if (died && left_behind == 1 && unreadable) ++clean;
  ok = clean == 3;
  return fmt("%d/3 crash points left no readable game", clean);
}

}  // namespace

int main() {
  Checker check;
  const auto source = test::standard();
  BatchRun batch;

  check.run("batch-solvability", [&](bool& ok) {
    batch = run_batch(*source);
    ok = batch.generated == kBatchSeeds && batch.valid == kBatchSeeds && batch.won == kBatchSeeds &&
         batch.seconds < kBatchBudgetSeconds;
    std::string detail = fmt("seeds 1..%d: generated %d, valid %d, greedy wins %d, %.2f s (budget %.0f s)", kBatchSeeds,
                             batch.generated, batch.valid, batch.won, batch.seconds, kBatchBudgetSeconds);
    if (!batch.first_error.empty()) detail += "; " + batch.first_error;
    return detail;
  });

  check.run("determinism", [&](bool& ok) {
    int identical = 0;
    for (int seed = 1; seed <= static_cast<int>(batch.bytes.size()); ++seed) {
      const GameSpec again = assemble_game(*source, kVictim, GameMode::kWikimystery, seed, GeneratorConfig{});
      if (serialize_game_spec(again) == batch.bytes[seed - 1]) ++identical;
    }
    const std::string golden = read_file(test::kGolden / "wikimystery-bieber-7.json");
    const bool golden_same = batch.bytes.size() >= 7 && batch.bytes[6] == golden;
    ok = identical == kBatchSeeds && golden_same;
    return fmt("%d/%d regenerated specs byte-identical; seed 7 %s the stored golden file", identical, kBatchSeeds,
               golden_same ? "matches" : "differs from");
  });

  check.run("evolution-oracle", [&](bool& ok) {
    std::mt19937_64 engine(20250601);
    int optimal = 0, at_least_greedy = 0;
    for (int trial = 0; trial < kEvolutionPools; ++trial) {
      const std::size_t n = kEvolutionK + 1 + engine() % (kEvolutionMaxPool - kEvolutionK);  // 6..20
      const SuspectPool pool = random_pool(n, engine);
      const SuspectSet evolved = evolve_suspect_set(pool, kEvolutionK, static_cast<std::uint64_t>(trial) + 1);
      const SuspectSet greedy = greedy_suspect_set(pool, kEvolutionK);
      if (std::abs(evolved.fitness - exhaustive_best(pool, kEvolutionK)) <= kEvolutionTolerance) ++optimal;
      if (evolved.fitness >= greedy.fitness) ++at_least_greedy;
    }
    ok = optimal >= kEvolutionRequiredOptimal && at_least_greedy == kEvolutionPools;
    return fmt("optimal within %.0e in %d/%d (need %d), >= greedy in %d/%d", kEvolutionTolerance, optimal,
               kEvolutionPools, kEvolutionRequiredOptimal, at_least_greedy, kEvolutionPools);
  });

  check.run("path-oracle", [&](bool& ok) {
    Rng rng(777);
    int agree = 0, no_path = 0;
    for (int trial = 0; trial < kPathGraphs; ++trial) {
      const int n = 2 + static_cast<int>(rng.below(kPathMaxNodes - 1));
      const KnowledgeGraph g = random_graph(n, rng);
      const EntityId src("urn:accept:n" + std::to_string(rng.below(n)));
      const EntityId dst("urn:accept:n" + std::to_string(rng.below(n)));
      const int max_len = 1 + static_cast<int>(rng.below(6));
      const auto expected = brute_force_path(g, src, dst, max_len);
      std::optional<std::vector<EntityId>> got;
      try {
        got = find_path(g, src, dst, max_len).nodes;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNoPath) throw;
      }
      if (got == expected) ++agree;
      if (!expected) ++no_path;
    }
    ok = agree == kPathGraphs && no_path > 0;
    return fmt("%d/%d agree with brute force, %d of them no-path", agree, kPathGraphs, no_path);
  });

  check.run("mode-contracts", [&](bool& ok) {
    int mystery_ok = 0, attempts = 0;
    for (const auto& spec : batch.specs) {
      if (spec.suspects.culprit_flags() == 1 && spec.evidence.size() == 4 && short_accusations_rejected(spec, attempts)) {
        ++mystery_ok;
      }
    }
    int agent_ok = 0;
    for (int seed = 1; seed <= kDataAgentSeeds; ++seed) {
      const GameSpec spec = assemble_game(*source, kVictim, GameMode::kDataAgent, seed, GeneratorConfig{});
      std::set<EntityId> contradicting;
      for (const auto& n : spec.npcs) {
        for (const auto& line : n.dialog.lines) {
          if (line.claim && !stated_in_bundle(spec, *line.claim)) contradicting.insert(n.entity);
        }
      }
      if (contradicting.size() != 1 || *contradicting.begin() != spec.suspects.culprit() || !spec.lie) continue;
      // The true fact sits on a fact clue the player can collect.
      std::optional<EntityId> truth_clue;
      for (const auto& clue : spec.clue_chain) {
        if (clue.kind == ClueKind::kFact && clue.fact && same_claim(*clue.fact, spec.lie->truth)) truth_clue = clue.id;
      }
      if (!truth_clue || !stated_in_bundle(spec, spec.lie->truth)) continue;
      const SolveResult solved = solve_greedy(spec);
      if (solved.won && solved.state.collected.count(*truth_clue)) ++agent_ok;
    }
    ok = mystery_ok == static_cast<int>(batch.specs.size()) && !batch.specs.empty() && agent_ok == kDataAgentSeeds;
    return fmt("wikimystery %d/%zu (1 culprit, 4 evidence, %d short accusations all rejected); data-agent %d/%d "
               "(one contradicting suspect, truth reachable)",
               mystery_ok, batch.specs.size(), attempts, agent_ok, kDataAgentSeeds);
  });

  check.run("metrics", [&](bool& ok) {
    GeneratorConfig verbatim;
    verbatim.fidelity = Fidelity::kVerbatim;
    const GameSpec plain = assemble_game(*source, kVictim, GameMode::kWikimystery, 7, verbatim);
    const double base = score_transformation(plain);
    std::size_t altered_up = 0, altered_total = 0;
    std::size_t index = 0;
    for (std::size_t n = 0; n < plain.npcs.size(); ++n) {
      for (std::size_t l = 0; l < plain.npcs[n].dialog.lines.size(); ++l, ++index) {
        const DialogLine& line = plain.npcs[n].dialog.lines[l];
        if (!line.claim) continue;
        GameSpec spec = plain;
        LiedFact lie{*line.claim, *line.claim, plain.npcs[n].entity};
        lie.altered.object = Literal{"a claim nobody made", LiteralType::kText};
        const LabelFn labels = [&plain](const EntityId& id) { return plain.label_of(id); };
        spec.npcs[n].dialog.lines[l] = render_lie_line(lie, labels, {Fidelity::kVerbatim, {}, nullptr});
        ++altered_total;
        if (score_transformation(spec) > base) ++altered_up;
      }
    }
    int hand_ok = 0;
    for (const auto& c : constructed_specs()) {
      const FunctionalityCount count = count_functionality(c.spec);
      const std::size_t total = c.gating + c.decorative;
      const double expected = total == 0 ? 0.0 : static_cast<double>(c.gating) / static_cast<double>(total);
      if (count.gating == c.gating && count.decorative == c.decorative && score_functionality(c.spec) == expected) {
        ++hand_ok;
      }
    }
    // Hand tally of the ten-spec batch (tests/oracles/oracles.py bias).
    const BiasReport report = bias_audit(bias_batch(*source));
    const std::map<std::string, std::size_t> regions{{"Africa", 0},         {"Asia", 0},        {"Europe", 4},
                                                     {"Latin America", 2}, {"Middle East", 0}, {"North America", 26},
                                                     {"Oceania", 0}};
    const std::vector<std::pair<EntityId, std::size_t>> top{
        {dbr("London,_Ontario"), 6}, {dbr("Boca_Raton,_Florida"), 4}, {dbr("Toronto"), 4},
        {dbr("Champaign,_Illinois"), 3}, {dbr("Dallas"), 3}, {dbr("New_York_City"), 3},
        {dbr("Saint_Michael,_Barbados"), 2}, {dbr("Ulm"), 2}};
    const bool bias_ok = report.batch_size == 10 && report.occurrences == 32 && report.region_counts == regions &&
                         report.top_locations == top && report.top_locations.size() <= kDefaultTopLocations &&
                         report.unmapped.empty();
    ok = base == 0.0 && altered_total > 0 && altered_up == altered_total && hand_ok == 3 && bias_ok;
    return fmt("verbatim score %.1f; %zu/%zu single alterations raise it; functionality hand counts %d/3; bias tally "
               "%s (top list %zu <= %zu)",
               base, altered_up, altered_total, hand_ok, bias_ok ? "matches" : "differs", report.top_locations.size(),
               kDefaultTopLocations);
  });

  check.run("service-equivalence", [&](bool& ok) {
    TempDir dir;
    const GameSpec golden = test::golden_spec("wikimystery-bieber-7.json");
    const auto path = test::kGolden / "walkthrough-wikimystery-bieber-7.json";
    const Json walkthrough = parse_json(read_file(path), path.string());
    std::vector<Action> actions;
    for (const auto& a : walkthrough["actions"]) actions.push_back(action_from_json(a, path.string()));

    std::string http_state;
    {
      HttpService http(dir.path);
      const auto [created, game] = http.post("/games", bieber(7));
      if (created != 201) throw std::runtime_error("create returned " + std::to_string(created));
      const auto [opened, session] = http.post("/games/" + game["game_id"].get<std::string>() + "/sessions", Json::object());
      if (opened != 201) throw std::runtime_error("session returned " + std::to_string(opened));
      const std::string sid = session["session_id"];
      for (const auto& action : actions) {
        const auto [status, body] = http.post("/sessions/" + sid + "/actions", action_to_json(action));
        if (status != 200) throw std::runtime_error("action returned " + std::to_string(status));
      }
      http_state = canonical_dump(http.get("/sessions/" + sid).second["state"]);
    }
    const std::string direct = canonical_dump(game_state_to_json(replay(golden, actions).state));
    bool crash_ok = false;
    const std::string crash = crash_injection(crash_ok);
    ok = actions.size() == 12 && http_state == direct && crash_ok;
    return fmt("%zu-action HTTP walkthrough state %s direct replay; %s", actions.size(),
               http_state == direct ? "byte-identical to" : "differs from", crash.c_str());
  });

  check.run("feedback-loop", [&](bool& ok) {
    TempDir dir;
    HttpService http(dir.path);
    const auto [s1, first] = http.post("/games", bieber(7));
    if (s1 != 201) throw std::runtime_error("create returned " + std::to_string(s1));
    int excluded_everywhere = 0, reports = 0;
    std::set<std::string> reported;
    Json game = first;
    for (int round = 0; round < 3; ++round) {
      const std::string suspect = game["suspects"][0];
      const auto [fs, fb] = http.post("/games/" + game["game_id"].get<std::string>() + "/feedback", {{"suspect", suspect}});
      if (fs != 201) throw std::runtime_error("feedback returned " + std::to_string(fs));
      reported.insert(suspect);
      ++reports;
      const auto [s2, next] = http.post("/games", bieber(7));
      if (s2 != 201) throw std::runtime_error("create returned " + std::to_string(s2));
      bool clean = true;
      for (const auto& s : next["suspects"]) clean = clean && !reported.count(s.get<std::string>());
      if (clean) ++excluded_everywhere;
      game = next;
    }
    ok = excluded_everywhere == reports;
    return fmt("%d/%d follow-up games exclude every reported suspect", excluded_everywhere, reports);
  });

  std::cout << (check.failures() == 0 ? "ALL PASS" : fmt("%d criteria FAILED", check.failures())) << std::endl;
  return check.failures() == 0 ? 0 : 1;
}
