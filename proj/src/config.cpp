#include "scalesift/config.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "scalesift/error.hpp"

#ifndef SCALESIFT_VERSION
#define SCALESIFT_VERSION "0.0.0"
#endif

namespace scalesift {

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  split_seed = s;
  train.seed = s;
  if (world) world->seed = s;
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

void require_file(const std::filesystem::path& p, const std::string& json_path) {
  if (!std::filesystem::is_regular_file(p))
    throw ConfigError("file referenced at " + json_path + " does not exist: " + p.string());
}

ProviderConfig parse_provider(const Json& doc, const std::string& path,
                              const std::filesystem::path& base, ProviderKind fallback) {
  JsonObjectReader r(doc, path);
  ProviderConfig p;
  p.kind = fallback;
  if (const Json* k = r.optional("kind")) {
    try {
      p.kind = provider_kind_from_string(JsonObjectReader::convert<std::string>(*k, r.path_of("kind")));
    } catch (const ValidationError& e) {
      throw ConfigError(r.path_of("kind") + ": " + e.what());
    }
  }
  p.steepness = r.get_or<double>("steepness", p.steepness);
  if (const Json* f = r.optional("path")) {
    p.path = resolve(base, JsonObjectReader::convert<std::string>(*f, r.path_of("path")));
    require_file(p.path, r.path_of("path"));
  }
  r.finish();
  if (p.kind == ProviderKind::Cached && p.path.empty())
    throw ConfigError("missing required key: " + path + ".path (cached provider)");
  if (p.kind == ProviderKind::KDModel)
    throw ConfigError(path + ".kind: kd-model providers come from the distill stage");
  if (!(p.steepness > 0.0)) throw ConfigError(path + ".steepness must be > 0");
  return p;
}

LLMClientConfig parse_llm(const Json& doc, const std::string& path,
                          const std::filesystem::path& base) {
  JsonObjectReader r(doc, path);
  LLMClientConfig c;
  std::string mode = r.get_or<std::string>("mode", "http");
  if (mode == "http") c.mode = LLMClientConfig::Mode::Http;
  else if (mode == "scripted") c.mode = LLMClientConfig::Mode::Scripted;
  else throw ConfigError(r.path_of("mode") + ": expected 'http' or 'scripted', got '" + mode + "'");
  c.endpoint = r.get_or<std::string>("endpoint", "");
  c.token_env = r.get_or<std::string>("token_env", c.token_env);
  c.timeout_seconds = r.get_or<double>("timeout_seconds", c.timeout_seconds);
  c.max_in_flight = r.get_or<int>("max_in_flight", c.max_in_flight);
  if (const Json* s = r.optional("scripted_path")) {
    c.scripted_path = resolve(base, JsonObjectReader::convert<std::string>(*s, r.path_of("scripted_path")));
    require_file(c.scripted_path, r.path_of("scripted_path"));
  }
  r.finish();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return c;
}

template <class Fn>
auto rethrow_as_config(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace

RunConfig parse_config(const Json& doc, const std::filesystem::path& base_dir) {
  JsonObjectReader r(doc, "$");
  RunConfig c;
  c.set_seed(r.get_or<std::uint64_t>("seed", c.seed));

  const Json* world = r.optional("world");
  const Json* world_file = r.optional("world_file");
  if (world && world_file) throw ConfigError("$: give either world or world_file, not both");
  if (!world && !world_file) throw ConfigError("missing required key: $.world (or $.world_file)");
  if (world) {
    c.world = world_spec_from_json(*world, "$.world");
    if (!world->contains("seed")) c.world->seed = c.seed;
    rethrow_as_config("$.world", [&] { c.world->validate(); return 0; });
  } else {
    c.world_file =
        resolve(base_dir, JsonObjectReader::convert<std::string>(*world_file, "$.world_file"));
    require_file(*c.world_file, "$.world_file");
  }

  if (const Json* s = r.optional("split")) {
    JsonObjectReader sr(*s, "$.split");
    if (const Json* f = sr.optional("fractions")) {
      auto v = JsonObjectReader::convert<std::vector<double>>(*f, sr.path_of("fractions"));
      if (v.size() != 3) throw ConfigError("$.split.fractions must have 3 entries");
      c.split_fractions = {v[0], v[1], v[2]};
    }
    c.split_seed = sr.get_or<std::uint64_t>("seed", c.split_seed);
    sr.finish();
  }

  {
    JsonObjectReader pr(r.required("providers"), "$.providers");
    c.lr = parse_provider(pr.required("lr"), "$.providers.lr", base_dir, ProviderKind::SyntheticLR);
    c.hr = parse_provider(pr.required("hr"), "$.providers.hr", base_dir, ProviderKind::SyntheticHR);
    pr.finish();
    if (c.lr.kind == ProviderKind::SyntheticHR)
      throw ConfigError("$.providers.lr.kind: synthetic-hr cannot serve as the LR provider");
    if (c.hr.kind == ProviderKind::SyntheticLR)
      throw ConfigError("$.providers.hr.kind: synthetic-lr cannot serve as the HR provider");
  }

  if (const Json* t = r.optional("train")) {
    JsonObjectReader tr(*t, "$.train");
    c.train.learning_rate = tr.get_or<double>("learning_rate", c.train.learning_rate);
    c.train.epochs = tr.get_or<int>("epochs", c.train.epochs);
    c.train.hidden_dim = tr.get_or<int>("hidden_dim", c.train.hidden_dim);
    c.train.init_scale = tr.get_or<double>("init_scale", c.train.init_scale);
    c.train.seed = tr.get_or<std::uint64_t>("seed", c.train.seed);
    tr.finish();
    if (!(c.train.learning_rate > 0.0)) throw ConfigError("$.train.learning_rate must be > 0");
    if (c.train.epochs < 0) throw ConfigError("$.train.epochs must be >= 0");
    if (c.train.hidden_dim < 1) throw ConfigError("$.train.hidden_dim must be >= 1");
    if (!(c.train.init_scale > 0.0)) throw ConfigError("$.train.init_scale must be > 0");
  }

  if (const Json* m = r.optional("modality")) {
    JsonObjectReader mr(*m, "$.modality");
    if (const Json* s = mr.optional("strategy"))
      c.modality = rethrow_as_config("$.modality.strategy", [&] {
        return modality_strategy_from_string(JsonObjectReader::convert<std::string>(*s, "$.modality.strategy"));
      });
    c.area_threshold_m2 = mr.get_or<double>("area_threshold_m2", c.area_threshold_m2);
    if (const Json* l = mr.optional("llm")) c.llm = parse_llm(*l, "$.modality.llm", base_dir);
    mr.finish();
    if (c.modality == ModalityStrategy::LLM && !c.llm)
      throw ConfigError("missing required key: $.modality.llm (strategy llm)");
  }

  if (const Json* s = r.optional("sampler"))
    c.sampler = rethrow_as_config("$.sampler", [&] {
      return sampler_strategy_from_string(JsonObjectReader::convert<std::string>(*s, "$.sampler"));
    });

  const Json& budget = r.required("budget");
  if (budget.is_object()) {
    JsonObjectReader br(budget, "$.budget");
    if (!br.has("max_locations")) throw ConfigError("missing required key: $.budget.max_locations");
    if (!br.required("max_locations").is_number_integer())
      throw_type_error("$.budget.max_locations", "integer");
    c.budget.max_locations = br.get<long>("max_locations");
    c.budget.area_per_location = br.get_or<double>("area_per_location", c.budget.area_per_location);
    br.finish();
  } else {
    c.budget.max_locations = JsonObjectReader::convert<long>(budget, "$.budget");
  }
  rethrow_as_config("$.budget", [&] { c.budget.validate(); return 0; });

  c.query_concepts = r.get_or<std::vector<std::string>>("query_concepts", {});

  if (const Json* e = r.optional("eval")) {
    JsonObjectReader er(*e, "$.eval");
    c.k = er.get_or<int>("k", c.k);
    c.precision_k = er.get_or<std::vector<int>>("precision_k", {});
    er.finish();
    if (c.k < 1) throw ConfigError("$.eval.k must be >= 1");
    for (int k : c.precision_k)
      if (k < 1) throw ConfigError("$.eval.precision_k values must be >= 1");
  }

  if (const Json* s = r.optional("sweep")) {
    JsonObjectReader sr(*s, "$.sweep");
    c.sweep_budgets = sr.get_or<std::vector<long>>("budgets", {});
    sr.finish();
    for (long b : c.sweep_budgets)
      if (b < 0) throw ConfigError("$.sweep.budgets values must be >= 0");
  }

  if (const Json* o = r.optional("output_dir"))
    c.output_dir = resolve(base_dir, JsonObjectReader::convert<std::string>(*o, "$.output_dir"));
  r.finish();
  return c;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  Json doc;
  try {
    doc = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

Json to_json(const RunConfig& c) {
  Json doc = Json::object();
  doc["seed"] = c.seed;
  if (c.world) doc["world"] = to_json(*c.world);
  if (c.world_file) doc["world_file"] = c.world_file->string();
  doc["split"] = {{"fractions", c.split_fractions}, {"seed", c.split_seed}};
  auto provider = [](const ProviderConfig& p) {
    Json j{{"kind", to_string(p.kind)}, {"steepness", p.steepness}};
    if (!p.path.empty()) j["path"] = p.path.string();
    return j;
  };
  doc["providers"] = {{"lr", provider(c.lr)}, {"hr", provider(c.hr)}};
  doc["train"] = {{"learning_rate", c.train.learning_rate}, {"epochs", c.train.epochs},
                  {"hidden_dim", c.train.hidden_dim},       {"init_scale", c.train.init_scale},
                  {"seed", c.train.seed}};
  Json modality{{"strategy", to_string(c.modality)}, {"area_threshold_m2", c.area_threshold_m2}};
  if (c.llm) {
    Json l{{"mode", c.llm->mode == LLMClientConfig::Mode::Http ? "http" : "scripted"},
           {"token_env", c.llm->token_env},
           {"timeout_seconds", c.llm->timeout_seconds},
           {"max_in_flight", c.llm->max_in_flight}};
    if (!c.llm->endpoint.empty()) l["endpoint"] = c.llm->endpoint;
    if (!c.llm->scripted_path.empty()) l["scripted_path"] = c.llm->scripted_path.string();
    modality["llm"] = l;
  }
  doc["modality"] = modality;
  doc["sampler"] = to_string(c.sampler);
  doc["budget"] = to_json(c.budget);
  doc["query_concepts"] = c.query_concepts;
  doc["eval"] = {{"k", c.k}, {"precision_k", c.precision_k}};
  doc["sweep"] = {{"budgets", c.sweep_budgets}};
  doc["output_dir"] = c.output_dir.string();
  return doc;
}

std::string file_digest(const std::filesystem::path& path) {
  std::string bytes = read_text_file(path);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed for " + path.string());
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i)
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return out.str();
}

std::string utc_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json RunManifest::to_json(const std::filesystem::path& output_dir) const {
  Json files = Json::array();
  for (const auto& rel : outputs)
    files.push_back({{"path", rel.generic_string()},
                     {"sha256", file_digest(output_dir / rel)},
                     {"bytes", std::filesystem::file_size(output_dir / rel)}});
  return Json{{"subcommand", subcommand}, {"version", version},  {"started_at", started_at},
              {"finished_at", finished_at}, {"seeds", seeds},   {"config", config},
              {"outputs", files}};
}

}  // namespace scalesift
