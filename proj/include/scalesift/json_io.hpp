#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "json.hpp"

namespace scalesift {

using Json = nlohmann::ordered_json;

// Reals are always written with 17 significant digits so every double
// round-trips bit-exactly.
std::string format_real(double v);

// Serializes like Json::dump but with format_real for floating point values.
// indent < 0 gives the compact single-line form.
std::string dump_json(const Json& doc, int indent = 2);

Json parse_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// Minimal CSV support: fields never contain commas, quotes or newlines.
std::vector<std::string> split_csv_line(std::string_view line);

// Strict decimal parse; throws ParseError (with line) on trailing junk.
double parse_real(std::string_view field, std::size_t line);

// Strict reader for one JSON object. Every key must be consumed, and type
// errors report the JSON path ("$.world.concepts[2].scale") as ConfigError.
class JsonObjectReader {
 public:
  JsonObjectReader(const Json& obj, std::string path);

  bool has(const std::string& key) const { return obj_.contains(key); }
  std::string path_of(const std::string& key) const { return path_ + "." + key; }
  const std::string& path() const noexcept { return path_; }

  // Marks the key consumed and returns it; throws if absent.
  const Json& required(const std::string& key);
  const Json* optional(const std::string& key);

  template <class T>
  T get(const std::string& key) {
    return convert<T>(required(key), path_of(key));
  }
  template <class T>
  T get_or(const std::string& key, T fallback) {
    const Json* v = optional(key);
    return v ? convert<T>(*v, path_of(key)) : fallback;
  }

  // Throws on any key that was never consumed.
  void finish() const;

  template <class T>
  static T convert(const Json& v, const std::string& path);

 private:
  const Json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

[[noreturn]] void throw_type_error(const std::string& path, const char* expected);

template <class T>
T JsonObjectReader::convert(const Json& v, const std::string& path) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw_type_error(path, "boolean");
    return v.get<bool>();
  } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
    if (!v.is_number_unsigned()) throw_type_error(path, "nonnegative integer");
    return v.get<T>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw_type_error(path, "integer");
    return v.get<T>();
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw_type_error(path, "number");
    return v.get<T>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw_type_error(path, "string");
    return v.get<std::string>();
  } else {
    return v.get<T>();
  }
}

}  // namespace scalesift
