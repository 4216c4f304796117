#pragma once

// Canonical text encoding shared by fixture files, game specs, replay logs and
// reports: JSON with a fixed key order (insertion order of the ordered_json
// tree), two-space indentation, LF line endings, a trailing newline, UTF-8
// strings without \u escaping of non-ASCII, integers printed in full and every
// real printed with exactly six decimals.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

namespace forge {

using Json = nlohmann::ordered_json;

std::string canonical_dump(const Json& value);

// Parses JSON text. Syntax errors raise kParseError with "<origin>:<line>: ..."
// so corpus loading can name the offending file and line.
Json parse_json(std::string_view text, const std::string& origin);

std::string read_file(const std::filesystem::path& path);

// Writes via a sibling temp file and rename so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string sha256_hex(std::string_view data);

// RFC 3986 percent-encoding of everything outside the unreserved set.
std::string percent_encode(std::string_view text);
std::string percent_decode(std::string_view text);

// UTC timestamp "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_now_iso8601();
bool is_utc_timestamp(std::string_view text);

// Required-field accessors used by all parsers; they raise kParseError naming
// `origin` when a field is missing or has the wrong JSON type.
const Json& require(const Json& object, std::string_view key, const std::string& origin);
std::string require_string(const Json& object, std::string_view key, const std::string& origin);
double require_number(const Json& object, std::string_view key, const std::string& origin);
std::int64_t require_int(const Json& object, std::string_view key, const std::string& origin);
const Json& require_array(const Json& object, std::string_view key, const std::string& origin);

}  // namespace forge
