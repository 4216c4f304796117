#pragma once

// Live backend over public open-data endpoints: a SPARQL endpoint for facts,
// a wiki REST endpoint for page summaries, a media-commons API for image
// candidates and an Overpass-style endpoint for map features. Every response
// is cached on disk under the SHA-256 of its request, so a cached session
// replays offline and can be frozen into a fixture corpus.

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "forge/ingest.h"

namespace forge {

struct LiveConfig {
  std::string sparql_url = "https://dbpedia.org/sparql";
  std::string wiki_rest_url = "https://en.wikipedia.org/api/rest_v1";
  std::string commons_url = "https://commons.wikimedia.org/w/api.php";
  std::string overpass_url = "https://overpass-api.de/api/interpreter";
  int timeout_ms = 10000;
  int retries = 2;
  // Empty disables caching.
  std::filesystem::path cache_dir;
  // Cached responses are used even when the endpoint is reachable.
  bool offline_cache_only = false;

  Json to_json() const;
  static LiveConfig from_json(const Json& json, const std::string& origin);
};

// scheme://host[:port] and the path prefix, e.g.
// "http://127.0.0.1:8080/sparql" -> {"http://127.0.0.1:8080", "/sparql"}.
struct SplitUrl {
  std::string origin;
  std::string path;
};
SplitUrl split_url(const std::string& url);

struct HttpResponse {
  int status = 0;
  std::string body;
  std::string retrieved_at;
  std::string url;  // the full request URL, used as provenance
};

// One GET/POST with retries and the response cache. kNetworkUnreachable when
// every attempt fails to connect, or when offline_cache_only misses.
class HttpFetcher {
 public:
  explicit HttpFetcher(LiveConfig config) : config_(std::move(config)) {}

  HttpResponse get(const std::string& url) const;
  HttpResponse post_form(const std::string& url, const std::string& form_body) const;
  const LiveConfig& config() const { return config_; }

 private:
  HttpResponse perform(const std::string& method, const std::string& url, const std::string& body) const;

  LiveConfig config_;
  mutable std::mutex cache_mutex_;
};

// Maps a source predicate IRI (or local name) to the vocabulary; generic-link
// for anything unrecognized.
Predicate map_source_predicate(std::string_view raw);

class LiveSource final : public DataSource {
 public:
  explicit LiveSource(LiveConfig config) : http_(std::move(config)) {}

  FetchMode mode() const override { return FetchMode::kLive; }
  Entity fetch_entity(const EntityId& id) const override;
  std::vector<Neighbor> fetch_neighbors(const EntityId& id, const PredicateFilter& filter) const override;
  std::vector<MapFeature> fetch_map_features(const Entity& place, const BoundingBox& box) const override;
  std::vector<EntityId> find_by_label(std::string_view label) const override;

 private:
  Json sparql(const std::string& query) const;
  std::vector<ImageCandidate> fetch_images(const EntityId& id) const;
  std::optional<std::string> wiki_title(const EntityId& id) const;

  HttpFetcher http_;
};

}  // namespace forge
