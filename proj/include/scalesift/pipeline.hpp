#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "scalesift/acquisition.hpp"
#include "scalesift/json_io.hpp"
#include "scalesift/modality.hpp"
#include "scalesift/scoring.hpp"
#include "scalesift/tables.hpp"

namespace scalesift {

struct Providers {
  ScoreProvider lr;
  ScoreProvider hr;
  std::optional<ScoreProvider> kd;                   // kd-model or a cache of KD scores
  std::unordered_map<std::string, double> aux_weights;  // weighted sampling
};

// How concepts are routed. The oracle compares validation AP@k; llm uses the
// oracle for seen concepts and asks the LLM about the rest, with the seen
// decisions as in-context examples.
struct ModalitySelector {
  ModalityStrategy strategy = ModalityStrategy::Oracle;
  std::optional<ScoreTable> val_hr;
  std::optional<ScoreTable> val_lr;
  std::optional<LabelTable> val_labels;
  int k = 40;
  const LLMClient* llm = nullptr;
  std::map<std::string, double> mean_area_m2;
  double area_threshold_m2 = 1.0e6;

  DecisionMap decide(const std::vector<std::string>& query,
                     const std::vector<std::string>& seen) const;
};

struct PlanRequest {
  std::vector<std::string> query;
  std::vector<std::string> seen;
  std::vector<std::string> candidates;
  ModalitySelector modality;
  // Reuse earlier decisions instead of consulting the selector again.
  std::optional<DecisionMap> decisions;
  SamplerStrategy sampler = SamplerStrategy::Disagreement;
  Budget budget;
  std::uint64_t seed = 0;
};

struct AcquisitionPlan {
  std::vector<std::string> query_concepts;
  DecisionMap decisions;
  SelectionResult hr_locations;
  Budget budget;
  std::string modality_strategy;
  std::string sampler_strategy;
  std::size_t num_candidates = 0;

  std::vector<std::string> concepts_with(Modality m) const;
};

struct CostReport {
  std::size_t hr_location_count = 0;
  std::size_t hr_tile_count = 0;
  double hr_area_km2 = 0.0;
  std::size_t lr_inference_count = 0;
  std::size_t kd_inference_count = 0;
};

// Decides every query concept, then (if any concept routes to HR) selects one
// shared HR location set over the candidates. Disagreement uses KD vs LR on
// the seen concepts. Throws ConfigError when KD is needed but absent.
AcquisitionPlan plan_run(const PlanRequest& request, const Providers& providers);

// LR rows for LR-routed concepts; for HR-routed ones the HR score at selected
// locations and the KD score everywhere else. HR is only queried at selected
// locations.
ScoreTable execute_plan(const AcquisitionPlan& plan, const Providers& providers,
                        const std::vector<std::string>& locations);

CostReport cost_report(const AcquisitionPlan& plan, int tiles_per_location);

Json to_json(const AcquisitionPlan& plan);
AcquisitionPlan plan_from_json(const Json& doc);
Json to_json(const CostReport& report);

}  // namespace scalesift
