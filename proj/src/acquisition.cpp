#include "scalesift/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scalesift/error.hpp"
#include "scalesift/rng.hpp"

namespace scalesift {

void Budget::validate() const {
  if (max_locations < 0)
    throw ValidationError("budget.max_locations must be >= 0, got " + std::to_string(max_locations));
  if (!(area_per_location > 0.0) || !std::isfinite(area_per_location))
    throw ValidationError("budget.area_per_location must be a positive real");
}

const char* to_string(SamplerStrategy s) {
  switch (s) {
    case SamplerStrategy::Disagreement: return "disagreement";
    case SamplerStrategy::Random: return "random";
    case SamplerStrategy::Uncertainty: return "uncertainty";
    case SamplerStrategy::Weighted: return "weighted";
  }
  return "?";
}

SamplerStrategy sampler_strategy_from_string(const std::string& name) {
  if (name == "disagreement") return SamplerStrategy::Disagreement;
  if (name == "random") return SamplerStrategy::Random;
  if (name == "uncertainty") return SamplerStrategy::Uncertainty;
  if (name == "weighted") return SamplerStrategy::Weighted;
  throw ValidationError("unknown sampler strategy: " + name);
}

namespace {

std::vector<double> abs_difference(const ScoreTable& a, const ScoreTable& b,
                                   const std::vector<std::string>& seen) {
  if (a.locations() != b.locations())
    throw ValidationError("disagreement: score tables are not aligned on locations");
  std::vector<double> out(a.num_locations(), 0.0);
  for (const auto& c : seen) {
    auto ra = a.row(a.concept_index().require(c));
    auto rb = b.row(b.concept_index().require(c));
    for (std::size_t l = 0; l < out.size(); ++l) out[l] += std::abs(ra[l] - rb[l]);
  }
  return out;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

SelectionResult pick(const SelectionInputs& in, const std::vector<std::size_t>& idx,
                     const std::vector<double>& values, SamplerStrategy s) {
  SelectionResult r;
  r.strategy = to_string(s);
  for (std::size_t i : idx) {
    r.selected.push_back(in.candidates[i]);
    r.criterion_values.push_back(values[i]);
  }
  return r;
}

SelectionResult select_random(const SelectionInputs& in, std::size_t n, std::uint64_t seed) {
  Engine eng = stream_engine(seed, "select-random");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> keys(in.candidates.size());
  for (double& k : keys) k = unif(eng);
  return pick(in, top_by_value(keys, in.candidates, n), keys, SamplerStrategy::Random);
}

SelectionResult select_weighted(const SelectionInputs& in, std::size_t n, std::uint64_t seed) {
  const auto& w = in.weights;
  if (w.size() != in.candidates.size())
    throw ValidationError("weighted sampling needs one weight per candidate");
  for (double v : w)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ValidationError("weighted sampling: weights must be finite and >= 0");
  if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) {
    SelectionResult r = select_random(in, n, seed);
    r.warnings.push_back("all weights are zero; fell back to random sampling");
    return r;
  }
  Engine eng = stream_engine(seed, "select-weighted");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<bool> taken(w.size(), false);
  std::vector<std::size_t> order;
  SelectionResult r;
  r.strategy = to_string(SamplerStrategy::Weighted);
  while (order.size() < n) {
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (!taken[i]) total += w[i];
    if (total <= 0.0) break;
    double u = unif(eng) * total;
    std::size_t chosen = w.size();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (taken[i] || w[i] == 0.0) continue;
      chosen = i;
      u -= w[i];
      if (u < 0.0) break;
    }
    taken[chosen] = true;
    order.push_back(chosen);
  }
  if (order.size() < n) {
    // Positive weights exhausted; the rest are equally (un)likely.
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (!taken[i]) rest.push_back(i);
    std::shuffle(rest.begin(), rest.end(), eng);
    rest.resize(n - order.size());
    order.insert(order.end(), rest.begin(), rest.end());
    r.warnings.push_back("fewer positive weights than the budget; filled uniformly");
  }
  for (std::size_t i : order) {
    r.selected.push_back(in.candidates[i]);
    r.criterion_values.push_back(w[i]);
  }
  return r;
}

void check_unique(const std::vector<std::string>& ids) {
  IdIndex check(ids, "candidate location");
  (void)check;
}

}  // namespace

std::vector<double> disagreement_true(const ScoreTable& hr, const ScoreTable& lr,
                                      const std::vector<std::string>& seen) {
  return abs_difference(hr, lr, seen);
}

std::vector<double> disagreement_proxy(const ScoreTable& kd, const ScoreTable& lr,
                                       const std::vector<std::string>& seen) {
  return abs_difference(kd, lr, seen);
}

std::vector<double> summed_entropy(const ScoreTable& scores) {
  std::vector<double> out(scores.num_locations(), 0.0);
  for (std::size_t c = 0; c < scores.num_concepts(); ++c) {
    auto row = scores.row(c);
    for (std::size_t l = 0; l < out.size(); ++l) out[l] += binary_entropy(row[l]);
  }
  return out;
}

std::vector<std::size_t> top_by_value(const std::vector<double>& values,
                                      const std::vector<std::string>& ids, std::size_t n) {
  if (values.size() != ids.size()) throw ValidationError("top_by_value: one value per id required");
  for (double v : values)
    if (std::isnan(v)) throw ValidationError("selection criterion contains NaN");
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  n = std::min(n, idx.size());
  auto cmp = [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return ids[a] < ids[b];
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(), cmp);
  idx.resize(n);
  return idx;
}

SelectionResult select_locations(SamplerStrategy strategy, const SelectionInputs& inputs,
                                 const Budget& budget, std::uint64_t seed) {
  budget.validate();
  check_unique(inputs.candidates);
  const std::size_t n =
      std::min(static_cast<std::size_t>(budget.max_locations), inputs.candidates.size());
  switch (strategy) {
    case SamplerStrategy::Disagreement: {
      if (inputs.criterion.size() != inputs.candidates.size())
        throw ValidationError("disagreement sampling needs one criterion value per candidate");
      return pick(inputs, top_by_value(inputs.criterion, inputs.candidates, n), inputs.criterion,
                  strategy);
    }
    case SamplerStrategy::Random:
      return select_random(inputs, n, seed);
    case SamplerStrategy::Uncertainty: {
      if (!inputs.scores) throw ValidationError("uncertainty sampling needs LR scores");
      if (inputs.scores->locations() != inputs.candidates)
        throw ValidationError("uncertainty sampling: scores are not aligned with the candidates");
      auto h = summed_entropy(*inputs.scores);
      return pick(inputs, top_by_value(h, inputs.candidates, n), h, strategy);
    }
    case SamplerStrategy::Weighted:
      return select_weighted(inputs, n, seed);
  }
  throw ValidationError("unknown sampler strategy");
}

std::string selection_csv(const SelectionResult& result) {
  std::string out = "rank,location_id,criterion_value,strategy\n";
  for (std::size_t i = 0; i < result.selected.size(); ++i) {
    out += std::to_string(i + 1) + ',' + result.selected[i] + ',' +
           format_real(result.criterion_values[i]) + ',' + result.strategy + '\n';
  }
  return out;
}

SelectionResult parse_selection_csv(const std::string& text) {
  SelectionResult r;
  std::size_t pos = 0, line_no = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (header) {
      if (line != "rank,location_id,criterion_value,strategy")
        throw ParseError("expected header 'rank,location_id,criterion_value,strategy'", line_no);
      header = false;
      continue;
    }
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 4) throw ParseError("expected 4 fields", line_no);
    if (f[0] != std::to_string(r.selected.size() + 1)) throw ParseError("ranks out of order", line_no);
    r.selected.push_back(f[1]);
    r.criterion_values.push_back(parse_real(f[2], line_no));
    if (r.strategy.empty()) r.strategy = f[3];
    else if (r.strategy != f[3]) throw ParseError("mixed strategies", line_no);
  }
  if (header) throw ParseError("missing header", 1);
  return r;
}

Json to_json(const Budget& b) {
  return Json{{"max_locations", b.max_locations}, {"area_per_location", b.area_per_location}};
}

Json to_json(const SelectionResult& s) {
  return Json{{"selected", s.selected}, {"criterion_values", s.criterion_values},
              {"strategy", s.strategy}, {"warnings", s.warnings}};
}

SelectionResult selection_from_json(const Json& doc) {
  JsonObjectReader r(doc, "$.hr_locations");
  SelectionResult s;
  s.selected = r.get<std::vector<std::string>>("selected");
  s.criterion_values = r.get<std::vector<double>>("criterion_values");
  s.strategy = r.get<std::string>("strategy");
  s.warnings = r.get_or<std::vector<std::string>>("warnings", {});
  r.finish();
  if (s.selected.size() != s.criterion_values.size())
    throw ValidationError("hr_locations: one criterion value per selected location required");
  return s;
}

}  // namespace scalesift
