#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "scalesift/commands.hpp"
#include "scalesift/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Budget-aware multi-resolution concept retrieval"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<long> budget;
  std::optional<std::string> strategy;
  std::optional<std::string> scores;
  std::optional<std::string> labels;

  const std::map<std::string, std::string> about{
      {"generate", "Write the synthetic world and its split"},
      {"score", "Score the test split with the LR and HR providers"},
      {"distill", "Train the KD model on HR scores of the train split"},
      {"select", "Select HR locations under the budget"},
      {"plan", "Decide modalities and select HR locations"},
      {"run", "Plan, execute, and evaluate on the test split"},
      {"eval", "Evaluate a score file against labels"},
      {"sweep", "Evaluate precision and mAP across budgets"}};
  for (const auto& name : scalesift::subcommands()) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides config)");
    sub->add_option("--seed", seed, "Seed for every random stage (overrides config)");
    sub->add_option("--budget", budget, "HR location budget (overrides config)");
    sub->add_option("--strategy", strategy, "Sampler strategy (overrides config)");
    if (name == "eval") {
      sub->add_option("--scores", scores, "Score CSV to evaluate (default <out>/scores_final.csv)");
      sub->add_option("--labels", labels, "Label CSV location_id,concept_id,label");
    }
  }

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  try {
    scalesift::RunConfig config = scalesift::parse_config_file(config_path);
    if (out_dir) config.output_dir = *out_dir;
    if (seed) config.set_seed(*seed);
    if (budget) {
      config.budget.max_locations = *budget;
      config.budget.validate();
    }
    if (strategy) config.sampler = scalesift::sampler_strategy_from_string(*strategy);
    scalesift::CommandOptions options;
    if (scores) options.scores = *scores;
    if (labels) options.labels = *labels;
    for (const auto& f : scalesift::run_command(subcommand, config, options))
      std::cout << (config.output_dir / f).string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << scalesift::error_json(e).dump() << '\n';
    return 1;
  }
  return 0;
}
