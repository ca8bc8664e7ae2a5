#pragma once

// Internal helpers for schema-checked JSON access. Every accessor names the
// offending field path in its Schema error so callers can surface it as-is.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "persuade/error.hpp"

namespace persuade::jsonio {

using nlohmann::json;

inline json parse(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    raise(ErrorCode::Schema, what + ": not valid JSON");
  }
  return j;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot read '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) raise(ErrorCode::Io, "read error on '" + path + "'");
  return text;
}

inline const json& member(const json& j, const std::string& key,
                          const std::string& path) {
  if (!j.is_object()) raise(ErrorCode::Schema, path + ": expected object");
  auto it = j.find(key);
  if (it == j.end()) {
    raise(ErrorCode::Schema, path + "." + key + ": missing");
  }
  return *it;
}

inline std::string get_string(const json& j, const std::string& key,
                              const std::string& path) {
  const json& v = member(j, key, path);
  if (!v.is_string()) {
    raise(ErrorCode::Schema, path + "." + key + ": expected string");
  }
  return v.get<std::string>();
}

inline std::vector<std::string> get_string_array(const json& j,
                                                 const std::string& key,
                                                 const std::string& path) {
  const json& v = member(j, key, path);
  if (!v.is_array()) {
    raise(ErrorCode::Schema, path + "." + key + ": expected array");
  }
  std::vector<std::string> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) {
      raise(ErrorCode::Schema,
            path + "." + key + "[" + std::to_string(i) + "]: expected string");
    }
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

inline std::int64_t get_int(const json& j, const std::string& key,
                            const std::string& path) {
  const json& v = member(j, key, path);
  if (!v.is_number_integer()) {
    raise(ErrorCode::Schema, path + "." + key + ": expected integer");
  }
  return v.get<std::int64_t>();
}

inline double get_number(const json& j, const std::string& key,
                         const std::string& path) {
  const json& v = member(j, key, path);
  if (!v.is_number()) {
    raise(ErrorCode::Schema, path + "." + key + ": expected number");
  }
  return v.get<double>();
}

template <typename T>
T value_or(const json& j, const std::string& key, T fallback) {
  if (!j.is_object()) return fallback;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

// Resolves a possibly-relative path against the directory of the file it was
// read from, so configs can reference their siblings by bare name.
inline std::string resolve_sibling(const std::string& config_path,
                                   const std::string& ref) {
  if (ref.empty()) return ref;
  std::filesystem::path p(ref);
  if (p.is_absolute()) return ref;
  return (std::filesystem::path(config_path).parent_path() / p).string();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) raise(ErrorCode::Io, "write error on '" + path + "'");
}

}  // namespace persuade::jsonio
