#include <set>

#include "doctest.h"
#include "forge/canonical.h"
#include "forge/entity.h"
#include "forge/error.h"
#include "forge/rng.h"
#include "test_support.h"

using namespace forge;

TEST_CASE("canonical dump: fixed reals, one-line scalar arrays, trailing newline") {
  Json value = Json::object();
  value["b"] = 1.5;
  value["a"] = Json::array({1, 2, 3});
  value["n"] = Json::object();
  value["n"]["x"] = -0.0;
  value["n"]["big"] = 1234567890123LL;
  value["list"] = Json::array({Json::object({{"k", 0.1}})});
  const std::string text = canonical_dump(value);
  CHECK(text ==
        "{\n"
        "  \"b\": 1.500000,\n"
        "  \"a\": [1, 2, 3],\n"
        "  \"n\": {\n"
        "    \"x\": 0.000000,\n"
        "    \"big\": 1234567890123\n"
        "  },\n"
        "  \"list\": [\n"
        "    {\n"
        "      \"k\": 0.100000\n"
        "    }\n"
        "  ]\n"
        "}\n");
}

TEST_CASE("canonical dump keeps UTF-8 unescaped") {
  const Json value = Json::object({{"name", "Mileva Marić"}});
  CHECK(canonical_dump(value).find("Marić") != std::string::npos);
}

TEST_CASE("parse_json reports origin and line") {
  try {
    parse_json("{\n  \"a\": 1,\n  oops\n}", "file.json");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseError);
    CHECK(std::string(e.what()).rfind("file.json:3:", 0) == 0);
  }
}

TEST_CASE("sha256 matches the FIPS 180-2 test vector") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("percent encoding round trip") {
  const std::string iri = "http://dbpedia.org/resource/Hell's_Kitchen,_Manhattan";
  const std::string encoded = percent_encode(iri);
  CHECK(encoded == "http%3A%2F%2Fdbpedia.org%2Fresource%2FHell%27s_Kitchen%2C_Manhattan");
  CHECK(percent_decode(encoded) == iri);
}

TEST_CASE("timestamps") {
  CHECK(is_utc_timestamp("2024-05-01T12:00:00Z"));
  CHECK_FALSE(is_utc_timestamp("2024-05-01 12:00:00"));
  CHECK(is_utc_timestamp(utc_now_iso8601()));
}

TEST_CASE("atomic write leaves no temp files") {
  test::TempDir dir;
  write_file_atomic(dir / "a.txt", "one");
  write_file_atomic(dir / "a.txt", "two");
  CHECK(read_file(dir / "a.txt") == "two");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(dir.path())) ++files;
  CHECK(files == 1);
}

TEST_CASE("rng engine is the standard mt19937_64") {
  // The standard fixes the 10000th output for the default seed.
  Rng rng(5489u);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next();
  CHECK(x == 9981545732273789042ULL);
}

TEST_CASE("derive_seed values from an independent splitmix64/fnv1a implementation") {
  // tests/oracles: python re-implementation of splitmix64(seed ^ fnv1a64(stage)).
  CHECK(derive_seed(1, "culprit") == 0x93321bdb4ffc5c97ULL);
  CHECK(derive_seed(7, "evolve") == 0x5a93dc6087d8a0dcULL);
  CHECK(derive_seed(0, "") == 0xc3817c016ba4ff30ULL);
}

TEST_CASE("below() is unbiased rejection sampling") {
  // Rebuild the documented algorithm on a raw engine and compare draws.
  std::mt19937_64 engine(42);
  Rng rng(42);
  for (std::uint64_t n : {1ULL, 2ULL, 3ULL, 5ULL, 7ULL, 1000ULL, (1ULL << 63) + 1}) {
    const std::uint64_t limit = (0 - n) % n;
    std::uint64_t x = engine();
    while (x < limit) x = engine();
    CHECK(rng.below(n) == x % n);
  }
}

TEST_CASE("shuffle is a permutation") {
  Rng rng(3);
  std::vector<int> items{1, 2, 3, 4, 5, 6, 7, 8};
  rng.shuffle(items);
  CHECK(std::set<int>(items.begin(), items.end()).size() == 8);
}

TEST_CASE("dates") {
  CHECK(Date::parse("2000-02-29"));
  CHECK_FALSE(Date::parse("1900-02-29"));
  CHECK_FALSE(Date::parse("1879-13-01"));
  CHECK_FALSE(Date::parse("879-03-14"));
  CHECK(Date::parse("1879-03-14")->str() == "1879-03-14");
}

TEST_CASE("entity ids") {
  CHECK(EntityId::is_valid("http://dbpedia.org/resource/Justin_Bieber"));
  CHECK(EntityId::is_valid("urn:forge:clue:1"));
  CHECK_FALSE(EntityId::is_valid("no scheme"));
  CHECK_FALSE(EntityId::is_valid("http://x/<y>"));
  CHECK_FALSE(EntityId::is_valid(""));
}

TEST_CASE("predicate vocabulary names round trip") {
  for (Predicate p : kAllPredicates) CHECK(parse_predicate(predicate_name(p)) == p);
  CHECK_FALSE(parse_predicate("birthDate"));
}
