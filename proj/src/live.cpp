#include "forge/live.h"

#include <algorithm>
#include <chrono>
#include <map>
#include <thread>

#include "forge/error.h"
#include "httplib.h"

namespace forge {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
constexpr std::string_view kRdfsLabel = "http://www.w3.org/2000/01/rdf-schema#label";
constexpr std::string_view kGeoLat = "http://www.w3.org/2003/01/geo/wgs84_pos#lat";
constexpr std::string_view kGeoLong = "http://www.w3.org/2003/01/geo/wgs84_pos#long";

// Bookkeeping predicates that never become facts.
constexpr std::string_view kSkippedLocalNames[] = {
    "type",        "label",          "comment",       "abstract",          "sameAs",
    "isPrimaryTopicOf", "primaryTopic", "wasDerivedFrom", "wikiPageID",     "wikiPageRevisionID",
    "wikiPageExternalLink", "wikiPageLength", "thumbnail", "depiction",     "point",
    "lat",         "long",           "wikiPageRedirects", "wikiPageDisambiguates", "seeAlso",
};

std::string local_name(std::string_view iri) {
  const auto cut = iri.find_last_of("/#");
  return std::string(cut == std::string_view::npos ? iri : iri.substr(cut + 1));
}

std::string namespace_of(std::string_view iri) {
  const auto cut = iri.find_last_of('/');
  return std::string(cut == std::string_view::npos ? iri : iri.substr(0, cut + 1));
}

bool skipped(std::string_view predicate_iri) {
  const std::string name = local_name(predicate_iri);
  return std::find(std::begin(kSkippedLocalNames), std::end(kSkippedLocalNames), name) !=
         std::end(kSkippedLocalNames);
}

EntityKind kind_from_type(std::string_view type_iri) {
  const std::string name = local_name(type_iri);
  if (name == "Person") return EntityKind::kPerson;
  if (name == "Place" || name == "PopulatedPlace" || name == "Country" || name == "City" ||
      name == "Settlement" || name == "Town" || name == "Village") {
    return EntityKind::kPlace;
  }
  if (name == "Work" || name == "MusicalWork" || name == "Album" || name == "Song" || name == "Film" ||
      name == "WrittenWork" || name == "Book") {
    return EntityKind::kWork;
  }
  if (name == "Organisation" || name == "Organization" || name == "Company" || name == "RecordLabel") {
    return EntityKind::kOrganization;
  }
  return EntityKind::kOther;
}

// Resources usually carry several rdf:types; the lowest rank wins.
int kind_rank(EntityKind kind) {
  switch (kind) {
    case EntityKind::kPerson: return 0;
    case EntityKind::kPlace: return 1;
    case EntityKind::kWork: return 2;
    case EntityKind::kOrganization: return 3;
    case EntityKind::kOther: return 4;
  }
  return 4;
}

std::optional<Literal> literal_from_binding(const Json& binding) {
  const std::string value = binding.value("value", "");
  const std::string lang = binding.value("xml:lang", "");
  if (!lang.empty() && lang != "en") return std::nullopt;
  const std::string datatype = local_name(binding.value("datatype", ""));
  if (datatype == "date" || datatype == "dateTime") {
    const std::string day = value.substr(0, 10);
    if (!Date::parse(day)) return std::nullopt;
    return Literal{day, LiteralType::kDate};
  }
  if (datatype == "integer" || datatype == "int" || datatype == "double" || datatype == "float" ||
      datatype == "decimal" || datatype == "nonNegativeInteger" || datatype == "positiveInteger") {
    try {
      std::size_t used = 0;
      (void)std::stod(value, &used);
      if (used != value.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
    return Literal{value, LiteralType::kNumber};
  }
  if (!datatype.empty() && datatype != "string" && datatype != "langString") return std::nullopt;
  if (value.empty()) return std::nullopt;
  return Literal{value, LiteralType::kText};
}

std::string sparql_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

std::string strip_tags(std::string_view html) {
  std::string out;
  bool in_tag = false;
  for (char c : html) {
    if (c == '<') in_tag = true;
    else if (c == '>') in_tag = false;
    else if (!in_tag) out += c;
  }
  const auto first = out.find_first_not_of(" \t\n");
  if (first == std::string::npos) return {};
  return out.substr(first, out.find_last_not_of(" \t\n") - first + 1);
}

const Json& bindings_of(const Json& response, const std::string& origin) {
  if (!response.is_object() || !response.contains("results") || !response["results"].is_object() ||
      !response["results"].contains("bindings") || !response["results"]["bindings"].is_array()) {
    throw Error(ErrorCode::kMalformedSource, origin + ": SPARQL response without results.bindings", "ingest");
  }
  return response["results"]["bindings"];
}

Json parse_response(const HttpResponse& response) {
  try {
    return Json::parse(response.body);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedSource, response.url + ": response is not JSON", "ingest");
  }
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

Json LiveConfig::to_json() const {
  Json out = Json::object();
  out["sparql_url"] = sparql_url;
  out["wiki_rest_url"] = wiki_rest_url;
  out["commons_url"] = commons_url;
  out["overpass_url"] = overpass_url;
  out["timeout_ms"] = timeout_ms;
  out["retries"] = retries;
  out["cache_dir"] = cache_dir.string();
  out["offline_cache_only"] = offline_cache_only;
  return out;
}

LiveConfig LiveConfig::from_json(const Json& json, const std::string& origin) {
  if (!json.is_object()) throw Error(ErrorCode::kInvalidArgument, origin + ": live config must be an object");
  LiveConfig config;
  for (const auto& [key, value] : json.items()) {
    auto text = [&]() {
      if (!value.is_string()) throw Error(ErrorCode::kInvalidArgument, origin + ": " + key + " must be a string");
      return value.get<std::string>();
    };
    auto integer = [&]() {
      if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
        throw Error(ErrorCode::kInvalidArgument, origin + ": " + key + " must be a non-negative integer");
      }
      return static_cast<int>(value.get<std::int64_t>());
    };
    if (key == "sparql_url") config.sparql_url = text();
    else if (key == "wiki_rest_url") config.wiki_rest_url = text();
    else if (key == "commons_url") config.commons_url = text();
    else if (key == "overpass_url") config.overpass_url = text();
    else if (key == "timeout_ms") config.timeout_ms = integer();
    else if (key == "retries") config.retries = integer();
    else if (key == "cache_dir") config.cache_dir = text();
    else if (key == "offline_cache_only") {
      if (!value.is_boolean()) throw Error(ErrorCode::kInvalidArgument, origin + ": offline_cache_only must be a boolean");
      config.offline_cache_only = value.get<bool>();
    } else {
      throw Error(ErrorCode::kInvalidArgument, origin + ": unknown live config key '" + key + "'");
    }
  }
  for (const auto* url : {&config.sparql_url, &config.wiki_rest_url, &config.commons_url, &config.overpass_url}) {
    if (url->rfind("http://", 0) != 0 && url->rfind("https://", 0) != 0) {
      throw Error(ErrorCode::kInvalidArgument, origin + ": endpoint '" + *url + "' is not an http(s) URL");
    }
  }
  return config;
}

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "not a URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

HttpResponse HttpFetcher::get(const std::string& url) const { return perform("GET", url, {}); }

HttpResponse HttpFetcher::post_form(const std::string& url, const std::string& form_body) const {
  return perform("POST", url, form_body);
}

HttpResponse HttpFetcher::perform(const std::string& method, const std::string& url, const std::string& body) const {
  fs::path cache_file;
  if (!config_.cache_dir.empty()) {
    cache_file = config_.cache_dir / (sha256_hex(method + "\n" + url + "\n" + body) + ".json");
    std::error_code ec;
    if (fs::exists(cache_file, ec)) {
      const Json entry = parse_json(read_file(cache_file), cache_file.string());
      return {static_cast<int>(require_int(entry, "status", cache_file.string())),
              require_string(entry, "body", cache_file.string()),
              require_string(entry, "retrieved_at", cache_file.string()), url};
    }
  }
  if (config_.offline_cache_only) {
    throw Error(ErrorCode::kNetworkUnreachable, "offline cache has no response for " + method + " " + url, "ingest");
  }

  const SplitUrl parts = split_url(url);
  httplib::Client client(parts.origin);
  const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  client.set_follow_location(true);

  HttpResponse out;
  out.url = url;
  std::string last_error = "no attempt made";
  bool answered = false;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
    httplib::Result result = method == "GET"
                                 ? client.Get(parts.path)
                                 : client.Post(parts.path, body, "application/x-www-form-urlencoded");
    if (!result) {
      last_error = httplib::to_string(result.error());
      continue;
    }
    out.status = result->status;
    out.body = result->body;
    answered = true;
    if (!retryable(result->status)) break;
    last_error = "HTTP " + std::to_string(result->status);
  }
  if (!answered) {
    throw Error(ErrorCode::kNetworkUnreachable, method + " " + url + ": " + last_error, "ingest");
  }
  out.retrieved_at = utc_now_iso8601();
  if (retryable(out.status)) {
    throw Error(ErrorCode::kMalformedSource, method + " " + url + ": " + last_error, "ingest");
  }
  if (!cache_file.empty() && (out.status / 100 == 2 || out.status == 404)) {
    Json entry = Json::object();
    entry["method"] = method;
    entry["url"] = url;
    entry["status"] = out.status;
    entry["retrieved_at"] = out.retrieved_at;
    entry["body"] = out.body;
    std::lock_guard lock(cache_mutex_);
    fs::create_directories(config_.cache_dir);
    write_file_atomic(cache_file, canonical_dump(entry));
  }
  return out;
}

Predicate map_source_predicate(std::string_view raw) {
  static const std::map<std::string, Predicate, std::less<>> kTable = {
      {"birthDate", Predicate::kBirthDate},
      {"deathDate", Predicate::kDeathDate},
      {"occupation", Predicate::kOccupation},
      {"birthPlace", Predicate::kBirthPlace},
      {"spouse", Predicate::kSpouse},
      {"colleague", Predicate::kColleague},
      {"associate", Predicate::kColleague},
      {"associatedActs", Predicate::kColleague},
      {"associatedMusicalArtist", Predicate::kColleague},
      {"doctoralAdvisor", Predicate::kColleague},
      {"doctoralStudent", Predicate::kColleague},
      {"knownFor", Predicate::kKnownFor},
      {"country", Predicate::kLocatedIn},
      {"location", Predicate::kLocatedIn},
      {"isPartOf", Predicate::kLocatedIn},
      {"locatedInArea", Predicate::kLocatedIn},
      {"notableWork", Predicate::kCreatorOf},
  };
  const auto it = kTable.find(local_name(raw));
  return it == kTable.end() ? Predicate::kGenericLink : it->second;
}

Json LiveSource::sparql(const std::string& query) const {
  const std::string url = http_.config().sparql_url + "?query=" + percent_encode(query) +
                          "&format=" + percent_encode("application/sparql-results+json");
  const HttpResponse response = http_.get(url);
  if (response.status != 200) {
    throw Error(ErrorCode::kMalformedSource, url + ": HTTP " + std::to_string(response.status), "ingest");
  }
  Json json = parse_response(response);
  json["__url"] = response.url;
  json["__retrieved_at"] = response.retrieved_at;
  return json;
}

std::optional<std::string> LiveSource::wiki_title(const EntityId& id) const {
  const std::string title = local_name(id.iri());
  if (title.empty()) return std::nullopt;
  const HttpResponse response =
      http_.get(http_.config().wiki_rest_url + "/page/summary/" + percent_encode(percent_decode(title)));
  if (response.status == 404) return std::nullopt;
  if (response.status != 200) {
    throw Error(ErrorCode::kMalformedSource, response.url + ": HTTP " + std::to_string(response.status), "ingest");
  }
  const Json json = parse_response(response);
  if (!json.is_object() || !json.contains("title") || !json["title"].is_string()) {
    throw Error(ErrorCode::kMalformedSource, response.url + ": summary without title", "ingest");
  }
  return json["title"].get<std::string>();
}

std::vector<ImageCandidate> LiveSource::fetch_images(const EntityId& id) const {
  std::string title = percent_decode(local_name(id.iri()));
  std::replace(title.begin(), title.end(), '_', ' ');
  const std::string url = http_.config().commons_url +
                          "?action=query&format=json&generator=search&gsrnamespace=6&gsrlimit=5&gsrsearch=" +
                          percent_encode(title) + "&prop=imageinfo&iiprop=" + percent_encode("url|extmetadata");
  const HttpResponse response = http_.get(url);
  if (response.status == 404) return {};
  if (response.status != 200) {
    throw Error(ErrorCode::kMalformedSource, url + ": HTTP " + std::to_string(response.status), "ingest");
  }
  const Json json = parse_response(response);
  if (!json.is_object()) throw Error(ErrorCode::kMalformedSource, url + ": not an object", "ingest");
  if (!json.contains("query")) return {};
  const Json& pages = json["query"].value("pages", Json::object());
  if (!pages.is_object()) throw Error(ErrorCode::kMalformedSource, url + ": query.pages is not an object", "ingest");
  std::vector<ImageCandidate> out;
  for (const auto& [key, page] : pages.items()) {
    if (!page.is_object() || !page.contains("imageinfo") || !page["imageinfo"].is_array() ||
        page["imageinfo"].empty()) {
      continue;
    }
    const Json& info = page["imageinfo"][0];
    const std::string image_url = info.value("url", "");
    if (image_url.empty()) continue;
    std::string caption;
    if (info.contains("extmetadata") && info["extmetadata"].contains("ImageDescription")) {
      caption = strip_tags(info["extmetadata"]["ImageDescription"].value("value", ""));
    }
    if (caption.empty()) {
      caption = page.value("title", "");
      if (caption.rfind("File:", 0) == 0) caption = caption.substr(5);
      if (const auto dot = caption.rfind('.'); dot != std::string::npos) caption = caption.substr(0, dot);
    }
    out.push_back({image_url, caption, 0.0});
  }
  return out;
}

Entity LiveSource::fetch_entity(const EntityId& id) const {
  const Json response =
      sparql("SELECT ?p ?o WHERE { <" + id.iri() + "> ?p ?o } ORDER BY ?p ?o LIMIT 2000");
  const std::string origin = response["__url"].get<std::string>();
  const Json& bindings = bindings_of(response, origin);
  if (bindings.empty()) throw Error(ErrorCode::kNotFound, "no entity " + id.iri(), "ingest");

  const SourceRecord provenance{Repository::kDbpedia, response["__retrieved_at"].get<std::string>(), origin};
  const std::string resource_ns = namespace_of(id.iri());
  Entity entity;
  entity.id = id;
  std::optional<double> lat;
  std::optional<double> lon;
  for (const auto& row : bindings) {
    if (!row.is_object() || !row.contains("p") || !row.contains("o")) {
      throw Error(ErrorCode::kMalformedSource, origin + ": binding without ?p/?o", "ingest");
    }
    const std::string p = row["p"].value("value", "");
    const Json& o = row["o"];
    const std::string o_type = o.value("type", "");
    if (p == kRdfType) {
      const EntityKind kind = kind_from_type(o.value("value", ""));
      if (kind_rank(kind) < kind_rank(entity.kind)) entity.kind = kind;
      continue;
    }
    if (p == kRdfsLabel) {
      const std::string lang = o.value("xml:lang", "");
      if (entity.label.empty() && (lang.empty() || lang == "en")) entity.label = o.value("value", "");
      continue;
    }
    if (p == kGeoLat || p == kGeoLong) {
      try {
        (p == kGeoLat ? lat : lon) = std::stod(o.value("value", ""));
      } catch (const std::exception&) {
        throw Error(ErrorCode::kMalformedSource, origin + ": unparseable coordinate", "ingest");
      }
      continue;
    }
    if (skipped(p)) continue;
    Fact fact;
    fact.subject = id;
    fact.predicate = map_source_predicate(p);
    fact.raw_predicate = local_name(p);
    fact.provenance = provenance;
    if (o_type == "uri") {
      const std::string target = o.value("value", "");
      // Only links to other articles of the same resource space.
      if (target == id.iri() || namespace_of(target) != resource_ns || !EntityId::is_valid(target)) continue;
      fact.object = EntityId(target);
    } else if (o_type == "literal" || o_type == "typed-literal") {
      auto literal = literal_from_binding(o);
      if (!literal) continue;
      fact.object = *literal;
    } else {
      continue;
    }
    entity.facts.push_back(std::move(fact));
  }
  if (lat && lon) entity.geo = GeoPoint{*lat, *lon};
  if (entity.kind == EntityKind::kPlace && !entity.geo) entity.kind = EntityKind::kOther;
  if (entity.label.empty()) {
    if (auto title = wiki_title(id)) entity.label = *title;
  }
  if (entity.label.empty()) {
    std::string fallback = percent_decode(local_name(id.iri()));
    std::replace(fallback.begin(), fallback.end(), '_', ' ');
    entity.label = fallback;
  }
  entity.images = fetch_images(id);
  try {
    normalize_entity(entity, origin);
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedSource, e.what(), "ingest");
  }
  return entity;
}

std::vector<Neighbor> LiveSource::fetch_neighbors(const EntityId& id, const PredicateFilter& filter) const {
  const Entity entity = fetch_entity(id);
  auto keep = [&](Predicate p) { return !filter || filter->count(p) > 0; };
  std::vector<Neighbor> out;
  for (const auto& fact : entity.facts) {
    if (const auto* target = object_entity(fact); target && keep(fact.predicate)) {
      out.push_back({fact.predicate, *target});
    }
  }
  const Json response =
      sparql("SELECT ?s ?p WHERE { ?s ?p <" + id.iri() + "> FILTER(isIRI(?s)) } ORDER BY ?s ?p LIMIT 2000");
  const std::string origin = response["__url"].get<std::string>();
  const std::string resource_ns = namespace_of(id.iri());
  for (const auto& row : bindings_of(response, origin)) {
    if (!row.is_object() || !row.contains("s") || !row.contains("p")) {
      throw Error(ErrorCode::kMalformedSource, origin + ": binding without ?s/?p", "ingest");
    }
    const std::string s = row["s"].value("value", "");
    const std::string p = row["p"].value("value", "");
    if (s == id.iri() || skipped(p) || namespace_of(s) != resource_ns || !EntityId::is_valid(s)) continue;
    const Predicate predicate = map_source_predicate(p);
    if (keep(predicate)) out.push_back({predicate, EntityId(s)});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<MapFeature> LiveSource::fetch_map_features(const Entity&, const BoundingBox& box) const {
  char bbox[128];
  std::snprintf(bbox, sizeof bbox, "(%.6f,%.6f,%.6f,%.6f)", box.min_lat, box.min_lon, box.max_lat, box.max_lon);
  const std::string b = bbox;
  const std::string query = "[out:json][timeout:25];(way[\"highway\"]" + b + ";way[\"building\"]" + b +
                            ";way[\"natural\"=\"water\"]" + b + ";way[\"waterway\"]" + b + ";node[\"tourism\"]" +
                            b + ";node[\"historic\"]" + b + ";);out geom;";
  const HttpResponse response = http_.post_form(http_.config().overpass_url, "data=" + percent_encode(query));
  if (response.status != 200) {
    throw Error(ErrorCode::kMalformedSource, response.url + ": HTTP " + std::to_string(response.status), "ingest");
  }
  const Json json = parse_response(response);
  if (!json.is_object() || !json.contains("elements") || !json["elements"].is_array()) {
    throw Error(ErrorCode::kMalformedSource, response.url + ": response without elements", "ingest");
  }
  std::vector<MapFeature> out;
  for (const auto& element : json["elements"]) {
    if (!element.is_object()) continue;
    const Json tags = element.value("tags", Json::object());
    MapFeature feature;
    feature.name = tags.value("name", "");
    const std::string type = element.value("type", "");
    try {
      if (type == "node") {
        feature.kind = FeatureKind::kLandmark;
        feature.points.push_back({element.at("lat").get<double>(), element.at("lon").get<double>()});
      } else if (type == "way") {
        if (tags.contains("building")) feature.kind = FeatureKind::kBuilding;
        else if (tags.contains("highway")) feature.kind = FeatureKind::kRoad;
        else if (tags.contains("waterway") || tags.value("natural", "") == "water") feature.kind = FeatureKind::kWater;
        else continue;
        for (const auto& point : element.at("geometry")) {
          feature.points.push_back({point.at("lat").get<double>(), point.at("lon").get<double>()});
        }
      } else {
        continue;
      }
    } catch (const Json::exception&) {
      throw Error(ErrorCode::kMalformedSource, response.url + ": element without coordinates", "ingest");
    }
    if (!feature.points.empty()) out.push_back(std::move(feature));
  }
  return out;
}

std::vector<EntityId> LiveSource::find_by_label(std::string_view label) const {
  const Json response = sparql("SELECT DISTINCT ?s WHERE { ?s <" + std::string(kRdfsLabel) + "> \"" +
                               sparql_escape(label) + "\"@en } ORDER BY ?s LIMIT 50");
  const std::string origin = response["__url"].get<std::string>();
  std::vector<EntityId> out;
  for (const auto& row : bindings_of(response, origin)) {
    const std::string s = row.contains("s") ? row["s"].value("value", "") : "";
    if (EntityId::is_valid(s)) out.emplace_back(s);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace forge
