#include "scalesift/json_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "scalesift/error.hpp"

namespace scalesift {
namespace {

void dump_value(const Json& v, int indent, int depth, std::string& out) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out.push_back('\n');
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case Json::value_t::number_float:
      out += format_real(v.get<double>());
      return;
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line; matrices get one row per line.
      bool scalars = std::none_of(v.begin(), v.end(),
                                  [](const Json& e) { return e.is_structured(); });
      out.push_back('[');
      bool first = true;
      for (const auto& e : v) {
        if (!first) out.push_back(',');
        first = false;
        if (!scalars) newline(depth + 1);
        dump_value(e, indent, depth + 1, out);
      }
      if (!scalars) newline(depth);
      out.push_back(']');
      return;
    }
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out.push_back('{');
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_value(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out.push_back('}');
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string format_real(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // Keep reals recognisable as reals when they happen to be integral.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string dump_json(const Json& doc, int indent) {
  std::string out;
  dump_value(doc, indent, 0, out);
  if (indent >= 0) out.push_back('\n');
  return out;
}

Json parse_json_file(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  write_text_file(path, dump_json(doc));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_real(std::string_view field, std::size_t line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw ParseError("not a decimal number: '" + std::string(field) + "'", line);
  }
  return v;
}

JsonObjectReader::JsonObjectReader(const Json& obj, std::string path)
    : obj_(obj), path_(std::move(path)) {
  if (!obj_.is_object()) throw_type_error(path_, "object");
}

const Json& JsonObjectReader::required(const std::string& key) {
  auto it = obj_.find(key);
  if (it == obj_.end()) throw ConfigError("missing required key: " + path_of(key));
  used_.insert(key);
  return *it;
}

const Json* JsonObjectReader::optional(const std::string& key) {
  auto it = obj_.find(key);
  if (it == obj_.end()) return nullptr;
  used_.insert(key);
  return &*it;
}

void JsonObjectReader::finish() const {
  for (auto it = obj_.begin(); it != obj_.end(); ++it) {
    if (!used_.count(it.key())) throw ConfigError("unknown key: " + path_of(it.key()));
  }
}

void throw_type_error(const std::string& path, const char* expected) {
  throw ConfigError("type mismatch at " + path + ": expected " + expected);
}

}  // namespace scalesift
