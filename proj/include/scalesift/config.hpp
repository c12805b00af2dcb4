#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scalesift/acquisition.hpp"
#include "scalesift/distill.hpp"
#include "scalesift/json_io.hpp"
#include "scalesift/modality.hpp"
#include "scalesift/scoring.hpp"
#include "scalesift/world.hpp"

namespace scalesift {

struct ProviderConfig {
  ProviderKind kind = ProviderKind::SyntheticLR;
  std::filesystem::path path;  // cached only
  double steepness = kDefaultSteepness;
};

// One experiment. Required keys: "world" or "world_file", "providers",
// "budget"; everything else has a default.
struct RunConfig {
  std::uint64_t seed = 7;  // sampler seed, and the default for every other seed
  std::optional<WorldSpec> world;
  std::optional<std::filesystem::path> world_file;
  std::array<double, 3> split_fractions{0.5, 0.2, 0.3};
  std::uint64_t split_seed = 7;
  ProviderConfig lr{ProviderKind::SyntheticLR, {}, kDefaultSteepness};
  ProviderConfig hr{ProviderKind::SyntheticHR, {}, kDefaultSteepness};
  TrainConfig train;  // seen_mask is filled from the world
  ModalityStrategy modality = ModalityStrategy::Oracle;
  double area_threshold_m2 = 1.0e6;
  std::optional<LLMClientConfig> llm;
  SamplerStrategy sampler = SamplerStrategy::Disagreement;
  Budget budget;
  std::vector<std::string> query_concepts;  // empty: every concept
  int k = 40;
  std::vector<int> precision_k;     // empty: max(1, |test| / 10)
  std::vector<long> sweep_budgets;  // empty: 0 to |test| in tenths
  std::filesystem::path output_dir = "out";

  // Overrides the run seed and every seed derived from it.
  void set_seed(std::uint64_t s);
};

// Strict: unknown keys, missing required keys and type mismatches throw
// ConfigError with the JSON path. Relative file paths resolve against `base_dir`.
RunConfig parse_config(const Json& doc, const std::filesystem::path& base_dir = {});
RunConfig parse_config_file(const std::filesystem::path& path);

// The fully resolved config, defaults included.
Json to_json(const RunConfig& config);

// Lowercase hex SHA-256 of a file's bytes.
std::string file_digest(const std::filesystem::path& path);

struct RunManifest {
  std::string subcommand;
  Json config;
  std::string version;
  std::string started_at;
  std::string finished_at;
  Json seeds;
  std::vector<std::filesystem::path> outputs;  // relative to the output dir

  // Digests are taken when serialized.
  Json to_json(const std::filesystem::path& output_dir) const;
};

std::string utc_timestamp();

}  // namespace scalesift
