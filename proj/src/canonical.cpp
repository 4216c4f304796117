#include "forge/canonical.h"

#include <openssl/evp.h>

#include <array>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "forge/error.h"

namespace forge {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kMalformedSource: return "malformed-source";
    case ErrorCode::kNetworkUnreachable: return "network-unreachable";
    case ErrorCode::kMissingManifest: return "missing-manifest";
    case ErrorCode::kChecksumMismatch: return "checksum-mismatch";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kNoGeo: return "no-geo";
    case ErrorCode::kNoPath: return "no-path";
    case ErrorCode::kPoolTooSmall: return "pool-too-small";
    case ErrorCode::kInsufficientFacts: return "insufficient-facts";
    case ErrorCode::kInsufficientLocations: return "insufficient-locations";
    case ErrorCode::kNoLiableFact: return "no-liable-fact";
    case ErrorCode::kAmbiguousVictim: return "ambiguous-victim";
    case ErrorCode::kInvalidSpec: return "invalid-spec";
    case ErrorCode::kIllegalAction: return "illegal-action";
    case ErrorCode::kStorageUnavailable: return "storage-unavailable";
    case ErrorCode::kUnknownGame: return "unknown-game";
    case ErrorCode::kUnknownSession: return "unknown-session";
    case ErrorCode::kUnknownSuspect: return "unknown-suspect";
    case ErrorCode::kDuplicateKey: return "duplicate-key";
  }
  return "unknown";
}

namespace {

void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

void dump_value(const Json& value, std::string& out, int depth) {
  switch (value.type()) {
    case Json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, item] : value.items()) {
        if (!first) out += ",\n";
        first = false;
        indent(out, depth + 1);
        out += Json(key).dump();
        out += ": ";
        dump_value(item, out, depth + 1);
      }
      out += "\n";
      indent(out, depth);
      out += "}";
      return;
    }
    case Json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars (coordinate pairs, id lists) stay on one line.
      bool scalars = true;
      for (const auto& item : value) scalars = scalars && !item.is_structured();
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < value.size(); ++i) {
          if (i) out += ", ";
          dump_value(value[i], out, depth);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (i) out += ",\n";
        indent(out, depth + 1);
        dump_value(value[i], out, depth + 1);
      }
      out += "\n";
      indent(out, depth);
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      double number = value.get<double>();
      if (number == 0.0) number = 0.0;  // no "-0.000000"
      char buffer[64];
      std::snprintf(buffer, sizeof buffer, "%.6f", number);
      out += buffer;
      return;
    }
    default:
      out += value.dump(-1, ' ', false, Json::error_handler_t::strict);
      return;
  }
}

}  // namespace

std::string canonical_dump(const Json& value) {
  std::string out;
  dump_value(value, out, 0);
  out += "\n";
  return out;
}

Json parse_json(std::string_view text, const std::string& origin) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < limit; ++i) {
      if (text[i] == '\n') ++line;
    }
    throw Error(ErrorCode::kParseError, origin + ":" + std::to_string(line) + ": invalid JSON");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  static thread_local std::mt19937_64 salt{std::random_device{}()};
  auto tmp = path;
  tmp += ".tmp-" + std::to_string(salt());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kStorageUnavailable, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kStorageUnavailable, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kStorageUnavailable, "cannot rename into " + path.string());
  }
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string percent_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

std::string percent_decode(std::string_view text) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size()) {
      const int hi = nibble(text[i + 1]);
      const int lo = nibble(text[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += text[i];
  }
  return out;
}

std::string utc_now_iso8601() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

bool is_utc_timestamp(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SSZ
  if (text.size() != 20) return false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    switch (i) {
      case 4: case 7: if (c != '-') return false; break;
      case 10: if (c != 'T') return false; break;
      case 13: case 16: if (c != ':') return false; break;
      case 19: if (c != 'Z') return false; break;
      default: if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
  }
  return true;
}

const Json& require(const Json& object, std::string_view key, const std::string& origin) {
  if (!object.is_object()) throw Error(ErrorCode::kParseError, origin + ": expected an object");
  const auto it = object.find(key);
  if (it == object.end()) {
    throw Error(ErrorCode::kParseError, origin + ": missing field '" + std::string(key) + "'");
  }
  return *it;
}

std::string require_string(const Json& object, std::string_view key, const std::string& origin) {
  const Json& value = require(object, key, origin);
  if (!value.is_string()) {
    throw Error(ErrorCode::kParseError, origin + ": field '" + std::string(key) + "' must be a string");
  }
  return value.get<std::string>();
}

double require_number(const Json& object, std::string_view key, const std::string& origin) {
  const Json& value = require(object, key, origin);
  if (!value.is_number()) {
    throw Error(ErrorCode::kParseError, origin + ": field '" + std::string(key) + "' must be a number");
  }
  return value.get<double>();
}

std::int64_t require_int(const Json& object, std::string_view key, const std::string& origin) {
  const Json& value = require(object, key, origin);
  if (!value.is_number_integer()) {
    throw Error(ErrorCode::kParseError, origin + ": field '" + std::string(key) + "' must be an integer");
  }
  return value.get<std::int64_t>();
}

const Json& require_array(const Json& object, std::string_view key, const std::string& origin) {
  const Json& value = require(object, key, origin);
  if (!value.is_array()) {
    throw Error(ErrorCode::kParseError, origin + ": field '" + std::string(key) + "' must be an array");
  }
  return value;
}

}  // namespace forge
