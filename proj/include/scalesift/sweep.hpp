#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scalesift/pipeline.hpp"

namespace scalesift {

struct SweepRow {
  long budget = 0;
  std::string strategy;
  double precision_at_k = 0.0;
  double map_at_k = 0.0;
  std::uint64_t seed = 0;
};

struct SweepRequest {
  PlanRequest plan;  // budget.max_locations is replaced per row
  LabelTable labels;  // over plan.candidates
  std::vector<long> budgets;
  int k_precision = 10;
  int k_map = 40;
  // Concepts the metrics average over; empty means plan.query.
  std::vector<std::string> eval_concepts;
};

// One full plan + execute + evaluate per budget, all with the same seed.
// Budgets must be nonnegative and sorted ascending.
std::vector<SweepRow> budget_sweep(const SweepRequest& request, const Providers& providers);

// CSV `budget,strategy,precision_at_k,map_at_k,seed`.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace scalesift
