#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scalesift/config.hpp"
#include "scalesift/distill.hpp"
#include "scalesift/pipeline.hpp"
#include "scalesift/world.hpp"

namespace scalesift {

// Everything a config resolves to before any stage runs: the world, the split
// and the LR/HR providers. Candidates and evaluation use the test split.
struct Experiment {
  RunConfig config;
  std::shared_ptr<const World> world;
  Split split;
  std::vector<std::string> concepts;
  std::vector<std::string> seen;
  std::vector<std::string> query;
  Providers providers;
  std::shared_ptr<const KDModel> kd;

  static Experiment prepare(const RunConfig& config);

  TrainConfig train_config() const;
  // Distills HR scores on the train split and attaches the model.
  TrainResult train();
  void attach_kd(KDModel model);

  // Validation tables are only scored for the oracle and llm strategies.
  ModalitySelector selector(const LLMClient* llm = nullptr) const;
  PlanRequest plan_request(const ModalitySelector& selector) const;
  LabelTable test_labels() const;
  int default_precision_k() const;
};

struct CommandOptions {
  std::optional<std::filesystem::path> scores;  // eval
  std::optional<std::filesystem::path> labels;  // eval: CSV location_id,concept_id,label
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"generate", "score", "distill", "select",
                                              "plan",     "run",   "eval",    "sweep"};
  return names;
}

// Runs one stage, writes its artifacts and manifest_<subcommand>.json into
// config.output_dir, and returns the files written (relative paths).
std::vector<std::filesystem::path> run_command(const std::string& subcommand,
                                               const RunConfig& config,
                                               const CommandOptions& options = {});

// {"error": {"kind", "message", ...}} for the CLI's failure output.
Json error_json(const std::exception& e);

LabelTable parse_label_csv(const std::string& text);

}  // namespace scalesift
