#include "scalesift/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scalesift/error.hpp"

namespace scalesift {
namespace {

void check_aligned(std::size_t scores, std::size_t labels, int k) {
  if (scores != labels)
    throw ValidationError("metric inputs misaligned: " + std::to_string(scores) + " scores vs " +
                          std::to_string(labels) + " labels");
  if (k < 1) throw ValidationError("metric cutoff k must be >= 1");
}

std::vector<std::size_t> index_order(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

double ap_from_order(const std::vector<std::size_t>& order, std::span<const std::uint8_t> labels,
                     std::size_t positives, int k) {
  const std::size_t cutoff = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t j = 0; j < cutoff; ++j) {
    if (!labels[order[j]]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(j + 1);
  }
  return sum / static_cast<double>(std::min<std::size_t>(static_cast<std::size_t>(k), positives));
}

double precision_from_order(const std::vector<std::size_t>& order,
                            std::span<const std::uint8_t> labels, int k) {
  const std::size_t cutoff = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
  if (cutoff == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t j = 0; j < cutoff; ++j) hits += labels[order[j]] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(cutoff);
}

std::size_t count_positives(std::span<const std::uint8_t> labels) {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](std::uint8_t v) { return v != 0; }));
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::vector<std::size_t> rank_order(std::span<const double> scores,
                                    std::span<const std::string> ids) {
  if (scores.size() != ids.size()) throw ValidationError("rank_order: one id per score required");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  return idx;
}

std::optional<double> ap_at_k(std::span<const double> scores, std::span<const std::uint8_t> labels,
                              std::span<const std::string> ids, int k) {
  check_aligned(scores.size(), labels.size(), k);
  std::size_t r = count_positives(labels);
  if (r == 0) return std::nullopt;
  return ap_from_order(rank_order(scores, ids), labels, r, k);
}

std::optional<double> ap_at_k(std::span<const double> scores, std::span<const std::uint8_t> labels,
                              int k) {
  check_aligned(scores.size(), labels.size(), k);
  std::size_t r = count_positives(labels);
  if (r == 0) return std::nullopt;
  return ap_from_order(index_order(scores), labels, r, k);
}

double precision_at_k(std::span<const double> scores, std::span<const std::uint8_t> labels,
                      std::span<const std::string> ids, int k) {
  check_aligned(scores.size(), labels.size(), k);
  return precision_from_order(rank_order(scores, ids), labels, k);
}

double precision_at_k(std::span<const double> scores, std::span<const std::uint8_t> labels, int k) {
  check_aligned(scores.size(), labels.size(), k);
  return precision_from_order(index_order(scores), labels, k);
}

std::optional<double> spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("spearman: inputs have different lengths");
  if (a.size() < 2) return std::nullopt;
  auto ra = average_ranks(a);
  auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

EvalReport map_at_k(const ScoreTable& scores, const LabelTable& labels, int k,
                    const std::vector<int>& precision_cutoffs) {
  if (k < 1) throw ValidationError("map_at_k: k must be >= 1");
  for (int c : precision_cutoffs)
    if (c < 1) throw ValidationError("map_at_k: precision cutoffs must be >= 1");
  LabelTable y = labels.select(scores.concepts(), scores.locations());
  const auto& ids = scores.locations();
  EvalReport report;
  report.k = k;
  std::map<int, double> prec_sum;
  for (std::size_t c = 0; c < scores.num_concepts(); ++c) {
    auto order = rank_order(scores.row(c), ids);
    std::size_t r = count_positives(y.row(c));
    if (r == 0) {
      report.skipped.push_back(scores.concepts()[c]);
      continue;
    }
    report.ap.emplace_back(scores.concepts()[c], ap_from_order(order, y.row(c), r, k));
    for (int cut : precision_cutoffs) prec_sum[cut] += precision_from_order(order, y.row(c), cut);
  }
  if (report.ap.empty())
    throw UndefinedMetricError("mAP undefined: no concept has a positive location");
  double sum = 0.0;
  for (const auto& [id, v] : report.ap) sum += v;
  const double n = static_cast<double>(report.ap.size());
  report.map = sum / n;
  for (const auto& [cut, s] : prec_sum) report.precision[cut] = s / n;
  return report;
}

double mean_precision_at_k(const ScoreTable& scores, const LabelTable& labels,
                           const std::vector<std::string>& concepts, int k) {
  if (concepts.empty()) throw ValidationError("mean_precision_at_k: no concepts");
  ScoreTable s = scores.select(concepts, scores.locations());
  LabelTable y = labels.select(concepts, scores.locations());
  double sum = 0.0;
  for (std::size_t c = 0; c < concepts.size(); ++c)
    sum += precision_at_k(s.row(c), y.row(c), s.locations(), k);
  return sum / static_cast<double>(concepts.size());
}

Json to_json(const EvalReport& report) {
  Json ap = Json::object();
  for (const auto& [id, v] : report.ap) ap[id] = v;
  Json precision = Json::object();
  for (const auto& [cut, v] : report.precision) precision[std::to_string(cut)] = v;
  Json doc{{"k", report.k}, {"map_at_k", report.map}, {"ap_at_k", ap},
           {"skipped", report.skipped}, {"precision_at_k", precision}};
  doc["cost_report"] = report.cost ? *report.cost : Json(nullptr);
  return doc;
}

EvalReport eval_report_from_json(const Json& doc) {
  JsonObjectReader r(doc, "$");
  EvalReport report;
  report.k = r.get<int>("k");
  report.map = r.get<double>("map_at_k");
  for (const auto& [id, v] : r.required("ap_at_k").items()) report.ap.emplace_back(id, v.get<double>());
  report.skipped = r.required("skipped").get<std::vector<std::string>>();
  for (const auto& [cut, v] : r.required("precision_at_k").items())
    report.precision[std::stoi(cut)] = v.get<double>();
  if (const Json* c = r.optional("cost_report"); c && !c->is_null()) report.cost = *c;
  r.finish();
  return report;
}

}  // namespace scalesift
