#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scalesift/json_io.hpp"
#include "scalesift/tables.hpp"

namespace scalesift {

struct CostReport;

// Indices sorted by descending score, ties by ascending id.
std::vector<std::size_t> rank_order(std::span<const double> scores,
                                    std::span<const std::string> ids);

// AP@k = sum_{j<=min(k,N)} P(j) rel(j) / min(k, R). nullopt when R = 0.
std::optional<double> ap_at_k(std::span<const double> scores, std::span<const std::uint8_t> labels,
                              std::span<const std::string> ids, int k);
// Same, with ids taken to be the position (index order breaks ties).
std::optional<double> ap_at_k(std::span<const double> scores, std::span<const std::uint8_t> labels,
                              int k);

// Fraction of positives among the top min(k,N).
double precision_at_k(std::span<const double> scores, std::span<const std::uint8_t> labels,
                      std::span<const std::string> ids, int k);
double precision_at_k(std::span<const double> scores, std::span<const std::uint8_t> labels, int k);

// Average ranks for ties; nullopt for fewer than 2 items or zero variance.
std::optional<double> spearman(std::span<const double> a, std::span<const double> b);

struct EvalReport {
  int k = 0;
  std::vector<std::pair<std::string, double>> ap;  // included concepts, table order
  double map = 0.0;
  std::vector<std::string> skipped;                // zero positives
  std::map<int, double> precision;                 // cutoff -> mean precision over included concepts
  std::optional<Json> cost;
};

// Labels are looked up by id, so the two tables need not share an order.
// Throws UndefinedMetricError if every concept has zero positives.
EvalReport map_at_k(const ScoreTable& scores, const LabelTable& labels, int k,
                    const std::vector<int>& precision_cutoffs = {});

// Mean precision@k over the given concepts (all of them, positives or not).
double mean_precision_at_k(const ScoreTable& scores, const LabelTable& labels,
                           const std::vector<std::string>& concepts, int k);

Json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const Json& doc);

}  // namespace scalesift
