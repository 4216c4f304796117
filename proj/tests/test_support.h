#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <random>
#include <string>

#include "forge/canonical.h"
#include "forge/gamespec.h"
#include "forge/ingest.h"

namespace forge::test {

inline const std::filesystem::path kSourceDir = FORGE_SOURCE_DIR;
inline const std::filesystem::path kStandard = kSourceDir / "fixtures" / "standard";
inline const std::filesystem::path kSmall12 = kSourceDir / "tests" / "data" / "small12";
inline const std::filesystem::path kGolden = kSourceDir / "tests" / "golden";

inline constexpr const char* kDbr = "http://dbpedia.org/resource/";
inline EntityId dbr(const std::string& name) { return EntityId(kDbr + name); }

inline std::shared_ptr<const FixtureCorpus> standard() {
  static auto corpus = FixtureCorpus::load(kStandard);
  return corpus;
}

inline std::shared_ptr<const FixtureCorpus> small12() {
  static auto corpus = FixtureCorpus::load(kSmall12);
  return corpus;
}

inline GameSpec golden_spec(const std::string& name) {
  const auto path = kGolden / name;
  return parse_game_spec(read_file(path), path.string());
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("forge-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Fact literal_fact(const EntityId& subject, Predicate predicate, const std::string& value,
                         LiteralType type = LiteralType::kText, const std::string& raw = {}) {
  Fact fact;
  fact.subject = subject;
  fact.predicate = predicate;
  fact.raw_predicate = raw.empty() ? std::string(predicate_name(predicate)) : raw;
  fact.object = Literal{value, type};
  fact.provenance = {Repository::kFixture, "2024-05-01T12:00:00Z", "test/" + subject.iri()};
  return fact;
}

inline Fact link_fact(const EntityId& subject, Predicate predicate, const EntityId& object) {
  Fact fact;
  fact.subject = subject;
  fact.predicate = predicate;
  fact.raw_predicate = std::string(predicate_name(predicate));
  fact.object = object;
  fact.provenance = {Repository::kFixture, "2024-05-01T12:00:00Z", "test/" + subject.iri()};
  return fact;
}

}  // namespace forge::test
