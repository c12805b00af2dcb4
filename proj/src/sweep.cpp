#include "scalesift/sweep.hpp"

#include <algorithm>

#include "scalesift/error.hpp"
#include "scalesift/metrics.hpp"

namespace scalesift {

std::vector<SweepRow> budget_sweep(const SweepRequest& request, const Providers& providers) {
  for (long b : request.budgets)
    if (b < 0) throw ValidationError("sweep budgets must be >= 0");
  if (!std::is_sorted(request.budgets.begin(), request.budgets.end()))
    throw ValidationError("sweep budgets must be sorted ascending");
  const auto& concepts = request.eval_concepts.empty() ? request.plan.query : request.eval_concepts;

  PlanRequest base = request.plan;
  if (!base.decisions) base.decisions = base.modality.decide(base.query, base.seen);

  std::vector<SweepRow> rows;
  for (long b : request.budgets) {
    PlanRequest pr = base;
    pr.budget.max_locations = b;
    AcquisitionPlan plan = plan_run(pr, providers);
    ScoreTable scores = execute_plan(plan, providers, pr.candidates).select(concepts, pr.candidates);
    SweepRow row;
    row.budget = b;
    row.strategy = to_string(pr.sampler);
    row.seed = pr.seed;
    row.precision_at_k = mean_precision_at_k(scores, request.labels, concepts, request.k_precision);
    row.map_at_k = map_at_k(scores, request.labels, request.k_map).map;
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "budget,strategy,precision_at_k,map_at_k,seed\n";
  for (const auto& r : rows)
    out += std::to_string(r.budget) + ',' + r.strategy + ',' + format_real(r.precision_at_k) + ',' +
           format_real(r.map_at_k) + ',' + std::to_string(r.seed) + '\n';
  return out;
}

}  // namespace scalesift
