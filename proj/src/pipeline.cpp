#include "scalesift/pipeline.hpp"

#include <algorithm>
#include <set>

#include "scalesift/error.hpp"

namespace scalesift {

DecisionMap ModalitySelector::decide(const std::vector<std::string>& query,
                                     const std::vector<std::string>& seen) const {
  auto oracle = [&](const std::vector<std::string>& concepts) {
    if (!val_hr || !val_lr || !val_labels)
      throw ConfigError(std::string(to_string(strategy)) +
                        " modality strategy needs validation HR/LR scores and labels");
    return validation_modality_oracle(*val_hr, *val_lr, *val_labels, concepts, k);
  };
  switch (strategy) {
    case ModalityStrategy::Oracle:
      return oracle(query);
    case ModalityStrategy::LLM: {
      ModalityContext ctx;
      ctx.llm = llm;
      ctx.seen_decisions = oracle(seen);
      std::set<std::string> seen_set(seen.begin(), seen.end());
      std::vector<std::string> unseen;
      DecisionMap out;
      for (const auto& c : query) {
        if (seen_set.count(c)) out[c] = ctx.seen_decisions.at(c);
        else unseen.push_back(c);
      }
      for (auto& [c, d] : decide_modalities(strategy, unseen, ctx)) out[c] = d;
      return out;
    }
    default: {
      ModalityContext ctx;
      ctx.mean_area_m2 = mean_area_m2;
      ctx.area_threshold_m2 = area_threshold_m2;
      return decide_modalities(strategy, query, ctx);
    }
  }
}

std::vector<std::string> AcquisitionPlan::concepts_with(Modality m) const {
  std::vector<std::string> out;
  for (const auto& c : query_concepts)
    if (decisions.at(c).choice == m) out.push_back(c);
  return out;
}

AcquisitionPlan plan_run(const PlanRequest& request, const Providers& providers) {
  request.budget.validate();
  if (request.query.empty()) throw ValidationError("plan: no query concepts");
  IdIndex check_query(request.query, "query concept");
  (void)check_query;

  AcquisitionPlan plan;
  plan.query_concepts = request.query;
  plan.budget = request.budget;
  plan.modality_strategy = to_string(request.modality.strategy);
  plan.sampler_strategy = to_string(request.sampler);
  plan.num_candidates = request.candidates.size();
  if (request.decisions) {
    for (const auto& c : request.query) {
      auto it = request.decisions->find(c);
      if (it == request.decisions->end()) throw ConfigError("no modality decision for concept " + c);
      plan.decisions[c] = it->second;
    }
  } else {
    plan.decisions = request.modality.decide(request.query, request.seen);
  }

  plan.hr_locations.strategy = plan.sampler_strategy;
  if (plan.concepts_with(Modality::HR).empty()) return plan;
  if (!providers.kd)
    throw ConfigError("a concept routes to HR but no KD model is available; run distill first");

  SelectionInputs in;
  in.candidates = request.candidates;
  switch (request.sampler) {
    case SamplerStrategy::Disagreement: {
      if (request.seen.empty()) throw ConfigError("disagreement sampling needs seen concepts");
      ScoreTable kd = score_lr(*providers.kd, request.candidates, request.seen);
      ScoreTable lr = score_lr(providers.lr, request.candidates, request.seen);
      in.criterion = disagreement_proxy(kd, lr, request.seen);
      break;
    }
    case SamplerStrategy::Uncertainty:
      in.scores = score_lr(providers.lr, request.candidates, plan.concepts_with(Modality::HR));
      break;
    case SamplerStrategy::Weighted:
      for (const auto& l : request.candidates) {
        auto it = providers.aux_weights.find(l);
        if (it == providers.aux_weights.end())
          throw NotFoundError("no auxiliary weight for location " + l);
        in.weights.push_back(it->second);
      }
      break;
    case SamplerStrategy::Random:
      break;
  }
  plan.hr_locations = select_locations(request.sampler, in, request.budget, request.seed);
  return plan;
}

ScoreTable execute_plan(const AcquisitionPlan& plan, const Providers& providers,
                        const std::vector<std::string>& locations) {
  if (static_cast<long>(plan.hr_locations.selected.size()) > plan.budget.max_locations)
    throw ValidationError("plan selects more HR locations than its budget");
  ScoreTable out(plan.query_concepts, locations);
  const auto lr_concepts = plan.concepts_with(Modality::LR);
  const auto hr_concepts = plan.concepts_with(Modality::HR);

  auto copy_rows = [&](const ScoreTable& src, const std::vector<std::string>& concepts,
                       const std::vector<std::size_t>& cols) {
    for (std::size_t c = 0; c < concepts.size(); ++c) {
      std::size_t row = out.concept_index().require(concepts[c]);
      for (std::size_t j = 0; j < cols.size(); ++j) out.set(row, cols[j], src.at(c, j));
    }
  };
  std::vector<std::size_t> all(locations.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  if (!lr_concepts.empty()) copy_rows(score_lr(providers.lr, locations, lr_concepts), lr_concepts, all);
  if (hr_concepts.empty()) return out;
  if (!providers.kd) throw ConfigError("a concept routes to HR but no KD model is available");

  std::set<std::string> selected(plan.hr_locations.selected.begin(),
                                 plan.hr_locations.selected.end());
  std::vector<std::string> hr_locs, kd_locs;
  std::vector<std::size_t> hr_cols, kd_cols;
  for (std::size_t i = 0; i < locations.size(); ++i) {
    if (selected.count(locations[i])) {
      hr_locs.push_back(locations[i]);
      hr_cols.push_back(i);
    } else {
      kd_locs.push_back(locations[i]);
      kd_cols.push_back(i);
    }
  }
  if (!kd_locs.empty()) copy_rows(score_lr(*providers.kd, kd_locs, hr_concepts), hr_concepts, kd_cols);
  if (!hr_locs.empty()) copy_rows(score_hr(providers.hr, hr_locs, hr_concepts), hr_concepts, hr_cols);
  return out;
}

CostReport cost_report(const AcquisitionPlan& plan, int tiles_per_location) {
  if (tiles_per_location < 1) throw ValidationError("cost_report: tiles_per_location must be >= 1");
  CostReport r;
  r.hr_location_count = plan.hr_locations.selected.size();
  r.hr_tile_count = r.hr_location_count * static_cast<std::size_t>(tiles_per_location);
  r.hr_area_km2 = static_cast<double>(r.hr_location_count) * plan.budget.area_per_location;
  const bool any_hr = !plan.concepts_with(Modality::HR).empty();
  const bool any_lr = !plan.concepts_with(Modality::LR).empty();
  const bool proxy = any_hr && plan.sampler_strategy == to_string(SamplerStrategy::Disagreement);
  const bool entropy = any_hr && plan.sampler_strategy == to_string(SamplerStrategy::Uncertainty);
  if (any_lr || proxy || entropy) r.lr_inference_count = plan.num_candidates;
  if (proxy) r.kd_inference_count = plan.num_candidates;
  else if (any_hr) r.kd_inference_count = plan.num_candidates - r.hr_location_count;
  return r;
}

Json to_json(const AcquisitionPlan& plan) {
  Json decisions = Json::object();
  for (const auto& c : plan.query_concepts) decisions[c] = to_json(plan.decisions.at(c));
  return Json{{"query_concepts", plan.query_concepts},
              {"decisions", decisions},
              {"hr_locations", to_json(plan.hr_locations)},
              {"budget", to_json(plan.budget)},
              {"modality_strategy", plan.modality_strategy},
              {"sampler_strategy", plan.sampler_strategy},
              {"num_candidates", plan.num_candidates}};
}

AcquisitionPlan plan_from_json(const Json& doc) {
  JsonObjectReader r(doc, "$");
  AcquisitionPlan plan;
  plan.query_concepts = r.get<std::vector<std::string>>("query_concepts");
  const Json& decisions = r.required("decisions");
  if (!decisions.is_object()) throw_type_error("$.decisions", "object");
  for (const auto& [id, d] : decisions.items())
    plan.decisions[id] = decision_from_json(d, "$.decisions." + id);
  for (const auto& c : plan.query_concepts)
    if (!plan.decisions.count(c)) throw ConfigError("plan has no decision for concept " + c);
  plan.hr_locations = selection_from_json(r.required("hr_locations"));
  JsonObjectReader b(r.required("budget"), "$.budget");
  plan.budget.max_locations = b.get<long>("max_locations");
  plan.budget.area_per_location = b.get<double>("area_per_location");
  b.finish();
  plan.budget.validate();
  plan.modality_strategy = r.get<std::string>("modality_strategy");
  plan.sampler_strategy = r.get<std::string>("sampler_strategy");
  plan.num_candidates = r.get<std::size_t>("num_candidates");
  r.finish();
  return plan;
}

Json to_json(const CostReport& r) {
  return Json{{"hr_location_count", r.hr_location_count},
              {"hr_tile_count", r.hr_tile_count},
              {"hr_area_km2", r.hr_area_km2},
              {"lr_inference_count", r.lr_inference_count},
              {"kd_inference_count", r.kd_inference_count}};
}

}  // namespace scalesift
