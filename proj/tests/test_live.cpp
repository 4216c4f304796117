#include <atomic>
#include <regex>
#include <thread>

#include "doctest.h"
#include "forge/error.h"
#include "forge/live.h"
#include "forge/plot.h"
#include "httplib.h"
#include "test_support.h"

using namespace forge;
using forge::test::dbr;

namespace {

constexpr const char* kOntology = "http://dbpedia.org/ontology/";
constexpr const char* kXsd = "http://www.w3.org/2001/XMLSchema#";

Json uri(const std::string& value) { return {{"type", "uri"}, {"value", value}}; }

Json literal_binding(const Literal& literal) {
  switch (literal.type) {
    case LiteralType::kDate: return {{"type", "typed-literal"}, {"datatype", std::string(kXsd) + "date"}, {"value", literal.value}};
    case LiteralType::kNumber:
      return {{"type", "typed-literal"}, {"datatype", std::string(kXsd) + "double"}, {"value", literal.value}};
    default: return {{"type", "literal"}, {"xml:lang", "en"}, {"value", literal.value}};
  }
}

std::string type_iri(EntityKind kind) {
  switch (kind) {
    case EntityKind::kPerson: return std::string(kOntology) + "Person";
    case EntityKind::kPlace: return std::string(kOntology) + "Place";
    case EntityKind::kWork: return std::string(kOntology) + "Work";
    case EntityKind::kOrganization: return std::string(kOntology) + "Organisation";
    default: return "http://www.w3.org/2002/07/owl#Thing";
  }
}

Json sparql_results(Json bindings) { return {{"head", Json::object()}, {"results", {{"bindings", std::move(bindings)}}}}; }

// Serves a fixture corpus the way the public endpoints would: SPARQL
// results, page summaries, media search results and Overpass elements.
class MockEndpoints {
 public:
  explicit MockEndpoints(std::shared_ptr<const FixtureCorpus> corpus) : corpus_(std::move(corpus)) {
    server_.Get("/sparql", [this](const httplib::Request& req, httplib::Response& res) { sparql(req, res); });
    server_.Get(R"(/wiki/page/summary/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      const std::string title = req.matches[1];
      if (title == "Unlabeled_Thing") {
        res.set_content(R"({"title": "Summary Title"})", "application/json");
      } else {
        res.status = 404;
      }
    });
    server_.Get("/commons", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      Json pages = Json::object();
      if (req.get_param_value("gsrsearch") == "Vera Victim") {
        pages["11"] = {{"title", "File:Vera Victim portrait.jpg"},
                       {"imageinfo", Json::array({{{"url", "http://img.test/vera.jpg"},
                                                   {"extmetadata", {{"ImageDescription", {{"value", "<p>Vera <b>Victim</b> at work</p>"}}}}}}})}};
        pages["12"] = {{"title", "File:Harbor at dawn.jpg"},
                       {"imageinfo", Json::array({{{"url", "http://img.test/harbor.jpg"}}})}};
      }
      res.set_content(Json{{"query", {{"pages", pages}}}}.dump(), "application/json");
    });
    server_.Post("/overpass", [this](const httplib::Request& req, httplib::Response& res) { overpass(req, res); });
    port = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockEndpoints() { stop(); }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  LiveConfig config(const std::filesystem::path& cache = {}) const {
    const std::string base = "http://127.0.0.1:" + std::to_string(port);
    LiveConfig c;
    c.sparql_url = base + "/sparql";
    c.wiki_rest_url = base + "/wiki";
    c.commons_url = base + "/commons";
    c.overpass_url = base + "/overpass";
    c.timeout_ms = 2000;
    c.retries = 2;
    c.cache_dir = cache;
    return c;
  }

  int port = 0;
  std::atomic<int> requests{0};
  std::atomic<int> fail_next{0};   // answer this many requests with 503
  std::atomic<bool> garbage{false};  // answer SPARQL with a non-JSON body

 private:
  void sparql(const httplib::Request& req, httplib::Response& res) {
    ++requests;
    if (fail_next > 0) {
      --fail_next;
      res.status = 503;
      return;
    }
    if (garbage) {
      res.set_content("<html>rate limited</html>", "text/html");
      return;
    }
    const std::string query = req.get_param_value("query");
    std::smatch m;
    Json bindings = Json::array();
    if (std::regex_search(query, m, std::regex(R"(^SELECT \?p \?o WHERE \{ <([^>]+)> \?p \?o \})"))) {
      const EntityId id(m[1].str());
      if (corpus_->entities().count(id)) {
        const Entity& e = corpus_->entities().at(id);
        bindings.push_back({{"p", uri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")}, {"o", uri(type_iri(e.kind))}});
        bindings.push_back({{"p", uri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")},
                            {"o", uri("http://www.w3.org/2002/07/owl#Thing")}});
        bindings.push_back({{"p", uri("http://www.w3.org/2000/01/rdf-schema#label")},
                            {"o", {{"type", "literal"}, {"xml:lang", "de"}, {"value", e.label + " (de)"}}}});
        bindings.push_back({{"p", uri("http://www.w3.org/2000/01/rdf-schema#label")},
                            {"o", {{"type", "literal"}, {"xml:lang", "en"}, {"value", e.label}}}});
        bindings.push_back({{"p", uri(std::string(kOntology) + "wikiPageID")},
                            {"o", {{"type", "typed-literal"}, {"datatype", std::string(kXsd) + "integer"}, {"value", "42"}}}});
        bindings.push_back({{"p", uri(std::string(kOntology) + "abstract")},
                            {"o", {{"type", "literal"}, {"xml:lang", "en"}, {"value", "Long text."}}}});
        bindings.push_back({{"p", uri("http://www.w3.org/2002/07/owl#sameAs")}, {"o", uri("http://wikidata.org/entity/Q1")}});
        if (e.geo) {
          char lat[32], lon[32];
          std::snprintf(lat, sizeof lat, "%.6f", e.geo->lat);
          std::snprintf(lon, sizeof lon, "%.6f", e.geo->lon);
          bindings.push_back({{"p", uri("http://www.w3.org/2003/01/geo/wgs84_pos#lat")},
                              {"o", {{"type", "typed-literal"}, {"datatype", std::string(kXsd) + "float"}, {"value", lat}}}});
          bindings.push_back({{"p", uri("http://www.w3.org/2003/01/geo/wgs84_pos#long")},
                              {"o", {{"type", "typed-literal"}, {"datatype", std::string(kXsd) + "float"}, {"value", lon}}}});
        }
        for (const auto& fact : e.facts) {
          const Json p = uri(std::string(kOntology) + fact.raw_predicate);
          if (const auto* target = object_entity(fact)) {
            bindings.push_back({{"p", p}, {"o", uri(target->iri())}});
          } else {
            bindings.push_back({{"p", p}, {"o", literal_binding(*object_literal(fact))}});
          }
        }
        // Foreign-language and off-namespace values the mapper must drop.
        bindings.push_back({{"p", uri(std::string(kOntology) + "occupation")},
                            {"o", {{"type", "literal"}, {"xml:lang", "fr"}, {"value", "métier"}}}});
        bindings.push_back({{"p", uri(std::string(kOntology) + "associatedActs")},
                            {"o", uri("http://example.org/elsewhere/Someone")}});
      } else if (id.iri() == std::string(test::kDbr) + "Unlabeled_Thing") {
        bindings.push_back({{"p", uri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")},
                            {"o", uri(std::string(kOntology) + "Work")}});
      } else if (id.iri() == std::string(test::kDbr) + "Bad_Place") {
        bindings.push_back({{"p", uri("http://www.w3.org/2003/01/geo/wgs84_pos#lat")},
                            {"o", {{"type", "typed-literal"}, {"value", "north"}}}});
      }
    } else if (std::regex_search(query, m, std::regex(R"(^SELECT \?s \?p WHERE \{ \?s \?p <([^>]+)>)"))) {
      const EntityId id(m[1].str());
      for (const auto& [other, entity] : corpus_->entities()) {
        for (const auto& fact : entity.facts) {
          if (const auto* target = object_entity(fact); target && *target == id) {
            bindings.push_back({{"s", uri(other.iri())}, {"p", uri(std::string(kOntology) + fact.raw_predicate)}});
          }
        }
      }
      bindings.push_back({{"s", uri("http://example.org/elsewhere/Fan")}, {"p", uri(std::string(kOntology) + "knownFor")}});
    } else if (std::regex_search(query, m, std::regex(R"re(rdf-schema#label> "((?:[^"\\]|\\.)*)"@en)re"))) {
      for (const auto& id : corpus_->find_by_label(m[1].str())) bindings.push_back({{"s", uri(id.iri())}});
    } else {
      res.status = 400;
      return;
    }
    res.set_content(sparql_results(std::move(bindings)).dump(), "application/sparql-results+json");
  }

  void overpass(const httplib::Request& req, httplib::Response& res) {
    ++requests;
    const std::string data = req.get_param_value("data");
    std::smatch m;
    if (!std::regex_search(data, m, std::regex(R"(\(([-0-9.]+),([-0-9.]+),([-0-9.]+),([-0-9.]+)\))"))) {
      res.status = 400;
      return;
    }
    const BoundingBox box{std::stod(m[1]), std::stod(m[2]), std::stod(m[3]), std::stod(m[4])};
    const GeoPoint center{(box.min_lat + box.max_lat) / 2, (box.min_lon + box.max_lon) / 2};
    Json elements = Json::array();
    for (const auto& [id, e] : corpus_->entities()) {
      if (!e.geo || std::abs(e.geo->lat - center.lat) > 1e-5 || std::abs(e.geo->lon - center.lon) > 1e-5) continue;
      for (const auto& f : corpus_->fetch_map_features(e, box)) {
        Json tags = {{"name", f.name}};
        if (f.kind == FeatureKind::kLandmark) {
          tags["tourism"] = "attraction";
          elements.push_back({{"type", "node"}, {"lat", f.points[0].lat}, {"lon", f.points[0].lon}, {"tags", tags}});
          continue;
        }
        if (f.kind == FeatureKind::kBuilding) tags["building"] = "yes";
        if (f.kind == FeatureKind::kRoad) tags["highway"] = "residential";
        if (f.kind == FeatureKind::kWater) tags["natural"] = "water";
        Json geometry = Json::array();
        for (const auto& p : f.points) geometry.push_back({{"lat", p.lat}, {"lon", p.lon}});
        elements.push_back({{"type", "way"}, {"tags", tags}, {"geometry", geometry}});
      }
    }
    elements.push_back({{"type", "relation"}, {"tags", Json::object()}});
    res.set_content(Json{{"elements", elements}}.dump(), "application/json");
  }

  std::shared_ptr<const FixtureCorpus> corpus_;
  httplib::Server server_;
  std::thread thread_;
};

// Facts without provenance, for comparing sources.
std::vector<std::tuple<Predicate, std::string, std::string>> claims(const Entity& e) {
  std::vector<std::tuple<Predicate, std::string, std::string>> out;
  for (const auto& f : e.facts) {
    out.emplace_back(f.predicate, f.raw_predicate, object_entity(f) ? object_entity(f)->iri() : object_literal(f)->value);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

int closed_port() {
  httplib::Server s;
  return s.bind_to_any_port("127.0.0.1");  // released when `s` goes away
}

}  // namespace

TEST_CASE("source predicate mapping") {
  CHECK(map_source_predicate("http://dbpedia.org/ontology/birthDate") == Predicate::kBirthDate);
  CHECK(map_source_predicate("associatedMusicalArtist") == Predicate::kColleague);
  CHECK(map_source_predicate("http://dbpedia.org/ontology/country") == Predicate::kLocatedIn);
  CHECK(map_source_predicate("http://dbpedia.org/ontology/notableWork") == Predicate::kCreatorOf);
  CHECK(map_source_predicate("http://dbpedia.org/property/knownFor") == Predicate::kKnownFor);
  CHECK(map_source_predicate("http://dbpedia.org/ontology/genre") == Predicate::kGenericLink);
}

TEST_CASE("live config JSON and URL splitting") {
  LiveConfig config;
  config.cache_dir = "/tmp/c";
  config.retries = 5;
  CHECK(LiveConfig::from_json(config.to_json(), "live").to_json() == config.to_json());
  CHECK_THROWS_AS(LiveConfig::from_json({{"sparql_url", "ftp://x"}}, "live"), Error);
  CHECK_THROWS_AS(LiveConfig::from_json({{"speed", 1}}, "live"), Error);
  CHECK_THROWS_AS(LiveConfig::from_json({{"retries", -1}}, "live"), Error);
  const SplitUrl a = split_url("http://127.0.0.1:8080/sparql");
  CHECK(a.origin == "http://127.0.0.1:8080");
  CHECK(a.path == "/sparql");
  CHECK(split_url("https://example.org").path == "/");
  CHECK_THROWS_AS(split_url("example.org/x"), Error);
}

TEST_CASE("live entities map to the same facts as the fixture") {
  MockEndpoints mock(test::small12());
  const LiveSource live(mock.config());
  CHECK(live.mode() == FetchMode::kLive);
  for (const auto& [id, fixture] : test::small12()->entities()) {
    const Entity remote = live.fetch_entity(id);
    CHECK(remote.label == fixture.label);
    CHECK(remote.kind == fixture.kind);
    CHECK(remote.geo.has_value() == fixture.geo.has_value());
    if (remote.geo) {
      CHECK(remote.geo->lat == doctest::Approx(fixture.geo->lat).epsilon(1e-9));
      CHECK(remote.geo->lon == doctest::Approx(fixture.geo->lon).epsilon(1e-9));
    }
    CHECK(claims(remote) == claims(fixture));
    for (const auto& fact : remote.facts) {
      CHECK(fact.provenance.repository == Repository::kDbpedia);
      CHECK(is_utc_timestamp(fact.provenance.retrieved_at));
      CHECK(fact.provenance.source_ref.rfind(mock.config().sparql_url + "?query=", 0) == 0);
    }
  }
}

TEST_CASE("live labels fall back to the page summary, images come from media search") {
  MockEndpoints mock(test::small12());
  const LiveSource live(mock.config());
  CHECK(live.fetch_entity(dbr("Unlabeled_Thing")).label == "Summary Title");
  CHECK(live.fetch_entity(dbr("Unlabeled_Thing")).kind == EntityKind::kWork);

  const Entity vera = live.fetch_entity(dbr("Vera_Victim"));
  REQUIRE(vera.images.size() == 2);
  const auto ranked = fetch_image_candidates(vera);
  CHECK(ranked[0].url == "http://img.test/vera.jpg");
  CHECK(ranked[0].caption == "Vera Victim at work");
  CHECK(ranked[0].confidence == 1.0);
  CHECK_FALSE(ranked[0].flagged());
  CHECK(ranked[1].caption == "Harbor at dawn");
  CHECK(ranked[1].flagged());
}

TEST_CASE("live neighbors include incoming links") {
  MockEndpoints mock(test::small12());
  const LiveSource live(mock.config());
  for (const char* name : {"Vera_Victim", "Ada_One", "Harbor_City", "Gus_Seven"}) {
    CHECK(live.fetch_neighbors(dbr(name), std::nullopt) == test::small12()->fetch_neighbors(dbr(name), std::nullopt));
  }
  const PredicateFilter colleagues = std::set<Predicate>{Predicate::kColleague};
  CHECK(live.fetch_neighbors(dbr("Ada_One"), colleagues) == test::small12()->fetch_neighbors(dbr("Ada_One"), colleagues));
}

TEST_CASE("live label search and map features") {
  MockEndpoints mock(test::small12());
  const LiveSource live(mock.config());
  CHECK(live.find_by_label("Vera Victim") == std::vector<EntityId>{dbr("Vera_Victim")});
  CHECK(live.find_by_label("Nobody \"Quoted\"").empty());
  const MapExtract remote = fetch_map_extract(live, dbr("Harbor_City"), kDefaultMapRadiusKm);
  const MapExtract fixture = fetch_map_extract(*test::small12(), dbr("Harbor_City"), kDefaultMapRadiusKm);
  REQUIRE(remote.features.size() == fixture.features.size());
  for (std::size_t i = 0; i < remote.features.size(); ++i) {
    CHECK(remote.features[i].kind == fixture.features[i].kind);
    CHECK(remote.features[i].name == fixture.features[i].name);
    CHECK(remote.features[i].points.size() == fixture.features[i].points.size());
  }
}

TEST_CASE("live errors") {
  MockEndpoints mock(test::small12());
  LiveConfig config = mock.config();
  const LiveSource live(config);
  CHECK(code_of([&] { live.fetch_entity(dbr("No_Such_Page")); }) == ErrorCode::kNotFound);
  CHECK(code_of([&] { live.fetch_entity(dbr("Bad_Place")); }) == ErrorCode::kMalformedSource);

  mock.garbage = true;
  CHECK(code_of([&] { live.fetch_entity(dbr("Ada_One")); }) == ErrorCode::kMalformedSource);
  mock.garbage = false;

  mock.fail_next = 2;
  CHECK(live.fetch_entity(dbr("Ada_One")).label == "Ada One");
  mock.fail_next = 3;
  CHECK(code_of([&] { live.fetch_entity(dbr("Ada_One")); }) == ErrorCode::kMalformedSource);
  mock.fail_next = 0;

  LiveConfig closed = config;
  closed.sparql_url = "http://127.0.0.1:" + std::to_string(closed_port()) + "/sparql";
  closed.retries = 0;
  closed.timeout_ms = 500;
  CHECK(code_of([&] { LiveSource(closed).fetch_entity(dbr("Ada_One")); }) == ErrorCode::kNetworkUnreachable);
}

TEST_CASE("cached responses replay after the endpoint goes away") {
  test::TempDir cache;
  auto mock = std::make_unique<MockEndpoints>(test::small12());
  const LiveConfig config = mock->config(cache.path());
  const Entity first = LiveSource(config).fetch_entity(dbr("Vera_Victim"));
  const int after_first = mock->requests;
  const Entity again = LiveSource(config).fetch_entity(dbr("Vera_Victim"));
  CHECK(mock->requests == after_first);
  CHECK(entity_to_json(again) == entity_to_json(first));
  mock.reset();

  const Entity offline = LiveSource(config).fetch_entity(dbr("Vera_Victim"));
  CHECK(entity_to_json(offline) == entity_to_json(first));

  LiveConfig cache_only = config;
  cache_only.offline_cache_only = true;
  CHECK(entity_to_json(LiveSource(cache_only).fetch_entity(dbr("Vera_Victim"))) == entity_to_json(first));
  CHECK(code_of([&] { LiveSource(cache_only).fetch_entity(dbr("Ada_One")); }) == ErrorCode::kNetworkUnreachable);
  LiveConfig empty_cache = cache_only;
  test::TempDir other;
  empty_cache.cache_dir = other.path();
  CHECK(code_of([&] { LiveSource(empty_cache).fetch_entity(dbr("Vera_Victim")); }) == ErrorCode::kNetworkUnreachable);
}

TEST_CASE("concurrent live fetches share the cache") {
  test::TempDir cache;
  MockEndpoints mock(test::small12());
  const LiveSource live(mock.config(cache.path()));
  std::vector<std::thread> threads;
  std::atomic<int> failures{0};
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (const auto& [id, entity] : test::small12()->entities()) {
        try {
          if (live.fetch_entity(id).id != id) ++failures;
        } catch (const Error&) {
          ++failures;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(failures == 0);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(cache.path())) ++files;
  CHECK(files > 0);
}

TEST_CASE("a game assembled over the live source matches the fixture game") {
  MockEndpoints mock(test::small12());
  const LiveSource live(mock.config());
  GeneratorConfig config;
  const GameSpec remote = assemble_game(live, "Vera Victim", GameMode::kWikimystery, 3, config);
  const GameSpec fixture = assemble_game(*test::small12(), "Vera Victim", GameMode::kWikimystery, 3, config);
  CHECK(validate_solvability(remote).passed());
  CHECK(remote.suspects.ids() == fixture.suspects.ids());
  CHECK(remote.suspects.culprit() == fixture.suspects.culprit());
  CHECK(remote.clue_chain.size() == fixture.clue_chain.size());
  CHECK(remote.evidence.size() == fixture.evidence.size());
  for (const auto& [id, entity] : remote.bundle) {
    for (const auto& fact : entity.facts) CHECK(fact.provenance.repository == Repository::kDbpedia);
  }
}
