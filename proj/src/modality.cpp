#include "scalesift/modality.hpp"

#include <algorithm>
#include <cctype>
#include <future>

#include "scalesift/error.hpp"
#include "scalesift/metrics.hpp"

namespace scalesift {

const char* to_string(Modality m) { return m == Modality::HR ? "hr" : "lr"; }

Modality modality_from_string(const std::string& s) {
  if (s == "lr" || s == "LR") return Modality::LR;
  if (s == "hr" || s == "HR") return Modality::HR;
  throw ValidationError("modality must be 'lr' or 'hr', got '" + s + "'");
}

const char* to_string(ModalityStrategy s) {
  switch (s) {
    case ModalityStrategy::Oracle: return "oracle";
    case ModalityStrategy::LLM: return "llm";
    case ModalityStrategy::AreaHeuristic: return "area-heuristic";
    case ModalityStrategy::AlwaysHR: return "always-hr";
    case ModalityStrategy::AlwaysLR: return "always-lr";
  }
  return "?";
}

ModalityStrategy modality_strategy_from_string(const std::string& name) {
  if (name == "oracle") return ModalityStrategy::Oracle;
  if (name == "llm") return ModalityStrategy::LLM;
  if (name == "area-heuristic") return ModalityStrategy::AreaHeuristic;
  if (name == "always-hr") return ModalityStrategy::AlwaysHR;
  if (name == "always-lr") return ModalityStrategy::AlwaysLR;
  throw ValidationError("unknown modality strategy: " + name);
}

DecisionMap validation_modality_oracle(const ScoreTable& hr, const ScoreTable& lr,
                                       const LabelTable& labels,
                                       const std::vector<std::string>& concepts, int k) {
  if (hr.locations() != lr.locations())
    throw ValidationError("modality oracle: HR and LR tables are not aligned on locations");
  LabelTable y = labels.select(concepts, hr.locations());
  DecisionMap out;
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    const auto& c = concepts[i];
    auto ap_hr = ap_at_k(hr.row(hr.concept_index().require(c)), y.row(i), hr.locations(), k);
    auto ap_lr = ap_at_k(lr.row(lr.concept_index().require(c)), y.row(i), lr.locations(), k);
    ModalityDecision d{c, Modality::LR, "oracle", false};
    if (!ap_hr || !ap_lr) d.undecidable = true;
    else if (*ap_hr > *ap_lr) d.choice = Modality::HR;
    out[c] = d;
  }
  return out;
}

const char* const kPromptInstruction =
    "Please act as a binary classifier for the following concepts to determine if they are "
    "better suited for 'LR' (low resolution) or 'HR' (high resolution) imagery. I will first "
    "give you some examples with the correct response. Then given a concept you are to return "
    "'lr' or 'hr'";

std::string build_incontext_prompt(const DecisionMap& seen, const std::string& query) {
  if (seen.empty()) throw ValidationError("in-context prompt needs at least one seen decision");
  std::string out = kPromptInstruction;
  out += '\n';
  for (const auto& [id, d] : seen) {
    out += id;
    out += ':';
    out += to_string(d.choice);
    out += '\n';
  }
  out += query;
  return out;
}

std::vector<std::string> build_incontext_prompts(const DecisionMap& seen,
                                                 const std::vector<std::string>& queries) {
  std::vector<std::string> out;
  for (const auto& q : queries) out.push_back(build_incontext_prompt(seen, q));
  return out;
}

Modality parse_llm_answer(const std::string& raw) {
  std::size_t b = 0, e = raw.size();
  while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
  std::string s = raw.substr(b, e - b);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (s == "lr") return Modality::LR;
  if (s == "hr") return Modality::HR;
  throw ProtocolError("LLM answered '" + raw + "', expected 'lr' or 'hr'", raw);
}

ModalityDecision decide_modality(ModalityStrategy strategy, const std::string& concept_id,
                                 const ModalityContext& context) {
  ModalityDecision d{concept_id, Modality::LR, to_string(strategy), false};
  switch (strategy) {
    case ModalityStrategy::AlwaysHR:
      d.choice = Modality::HR;
      return d;
    case ModalityStrategy::AlwaysLR:
      return d;
    case ModalityStrategy::AreaHeuristic: {
      auto it = context.mean_area_m2.find(concept_id);
      if (it == context.mean_area_m2.end())
        throw NotFoundError("area heuristic has no mean area for concept: " + concept_id);
      d.choice = it->second < context.area_threshold_m2 ? Modality::HR : Modality::LR;
      return d;
    }
    case ModalityStrategy::LLM: {
      if (!context.llm) throw ConfigError("llm modality strategy needs an LLM client");
      d.choice = parse_llm_answer(
          context.llm->complete(build_incontext_prompt(context.seen_decisions, concept_id)));
      return d;
    }
    case ModalityStrategy::Oracle:
      break;
  }
  throw ValidationError("the oracle strategy needs validation tables; use validation_modality_oracle");
}

DecisionMap decide_modalities(ModalityStrategy strategy, const std::vector<std::string>& concepts,
                              const ModalityContext& context) {
  DecisionMap out;
  const bool concurrent = strategy == ModalityStrategy::LLM && context.llm &&
                          context.llm->config().mode == LLMClientConfig::Mode::Http;
  if (!concurrent) {
    for (const auto& c : concepts) out[c] = decide_modality(strategy, c, context);
    return out;
  }
  const std::size_t window =
      static_cast<std::size_t>(std::max(1, context.llm->config().max_in_flight));
  for (std::size_t start = 0; start < concepts.size(); start += window) {
    std::vector<std::future<ModalityDecision>> batch;
    for (std::size_t i = start; i < std::min(concepts.size(), start + window); ++i)
      batch.push_back(std::async(std::launch::async, [&, i] {
        return decide_modality(strategy, concepts[i], context);
      }));
    for (auto& f : batch) {
      auto d = f.get();
      out[d.concept_id] = d;
    }
  }
  return out;
}

double evaluate_selector(const DecisionMap& predictions, const DecisionMap& truth) {
  if (truth.empty()) throw ValidationError("evaluate_selector: no concepts");
  if (predictions.size() != truth.size())
    throw ValidationError("evaluate_selector: prediction and truth concept sets differ");
  std::size_t hits = 0;
  for (const auto& [id, t] : truth) {
    auto it = predictions.find(id);
    if (it == predictions.end())
      throw ValidationError("evaluate_selector: no prediction for concept " + id);
    hits += it->second.choice == t.choice ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::string decisions_csv(const DecisionMap& decisions) {
  std::string out = "concept_id,choice,source\n";
  for (const auto& [id, d] : decisions) out += id + ',' + to_string(d.choice) + ',' + d.source + '\n';
  return out;
}

Json to_json(const ModalityDecision& d) {
  return Json{{"concept_id", d.concept_id}, {"choice", to_string(d.choice)},
              {"source", d.source}, {"undecidable", d.undecidable}};
}

ModalityDecision decision_from_json(const Json& doc, const std::string& path) {
  JsonObjectReader r(doc, path);
  ModalityDecision d;
  d.concept_id = r.get<std::string>("concept_id");
  d.choice = modality_from_string(r.get<std::string>("choice"));
  d.source = r.get<std::string>("source");
  d.undecidable = r.get_or<bool>("undecidable", false);
  r.finish();
  return d;
}

}  // namespace scalesift
