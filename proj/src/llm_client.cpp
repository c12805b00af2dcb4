#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "scalesift/error.hpp"
#include "scalesift/modality.hpp"

namespace scalesift {

void LLMClientConfig::validate() const {
  if (mode == Mode::Scripted && scripted_path.empty())
    throw ConfigError("llm: scripted mode requires scripted_path");
  if (mode == Mode::Http && endpoint.empty()) throw ConfigError("llm: http mode requires endpoint");
  if (!(timeout_seconds > 0.0)) throw ConfigError("llm: timeout must be > 0");
  if (max_retries < 0) throw ConfigError("llm: max_retries must be >= 0");
  if (max_in_flight < 1) throw ConfigError("llm: max_in_flight must be >= 1");
}

LLMClient::LLMClient(LLMClientConfig config) : config_(std::move(config)) {
  config_.validate();
  if (config_.mode != LLMClientConfig::Mode::Scripted) return;
  std::string text = read_text_file(config_.scripted_path);
  std::size_t pos = 0, line_no = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (header) {
      header = false;
      if (line == "concept,answer") continue;
    }
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 2) throw ParseError("scripted LLM file: expected 'concept,answer'", line_no);
    script_[f[0]] = f[1];
  }
}

LLMClient::~LLMClient() = default;

std::string LLMClient::complete(const std::string& prompt) const {
  if (config_.mode == LLMClientConfig::Mode::Http) return complete_http(prompt);
  std::size_t nl = prompt.rfind('\n');
  std::string query = nl == std::string::npos ? prompt : prompt.substr(nl + 1);
  auto it = script_.find(query);
  if (it == script_.end()) throw NotFoundError("scripted LLM has no answer for concept: " + query);
  return it->second;
}

std::string LLMClient::complete_http(const std::string& prompt) const {
  // Split "scheme://host[:port]/path" into the client base and the path.
  const std::string& url = config_.endpoint;
  std::size_t scheme_end = url.find("://");
  std::size_t path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  std::string base = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  std::string body = Json{{"prompt", prompt}, {"max_tokens", 4}}.dump();
  httplib::Headers headers;
  if (const char* token = std::getenv(config_.token_env.c_str()); token && *token)
    headers.emplace("Authorization", std::string("Bearer ") + token);

  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.backoff_base * (1 << (attempt - 1)));
    httplib::Client client(base);
    client.set_connection_timeout(secs.count(), static_cast<time_t>(usecs.count()));
    client.set_read_timeout(secs.count(), static_cast<time_t>(usecs.count()));
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    Json doc = Json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("text") || !doc["text"].is_string())
      throw ProtocolError("LLM response has no string field 'text'", res->body);
    return doc["text"].get<std::string>();
  }
  throw TransportError("LLM request to " + url + " failed after " +
                           std::to_string(config_.max_retries) + " retries: " + last_error,
                       config_.max_retries);
}

}  // namespace scalesift
