#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scalesift/json_io.hpp"
#include "scalesift/tables.hpp"

namespace scalesift {

struct Budget {
  long max_locations = 0;
  double area_per_location = 5.0;  // km^2

  void validate() const;
};

enum class SamplerStrategy { Disagreement, Random, Uncertainty, Weighted };

const char* to_string(SamplerStrategy s);
SamplerStrategy sampler_strategy_from_string(const std::string& name);

struct SelectionResult {
  std::vector<std::string> selected;    // rank order
  std::vector<double> criterion_values;  // one per selected location
  std::string strategy;
  std::vector<std::string> warnings;
};

// sum over seen concepts of |a - b| per location. Both tables must list the
// same locations in the same order.
std::vector<double> disagreement_true(const ScoreTable& hr, const ScoreTable& lr,
                                      const std::vector<std::string>& seen);
std::vector<double> disagreement_proxy(const ScoreTable& kd, const ScoreTable& lr,
                                       const std::vector<std::string>& seen);

// Sum of binary entropies (nats) of each location's scores.
std::vector<double> summed_entropy(const ScoreTable& scores);

// What a strategy consumes, aligned with `candidates`.
struct SelectionInputs {
  std::vector<std::string> candidates;
  std::vector<double> criterion;    // disagreement
  std::optional<ScoreTable> scores;  // uncertainty (LR scores over candidates)
  std::vector<double> weights;      // weighted
};

// |selected| = min(B, |candidates|). Deterministic given the seed.
SelectionResult select_locations(SamplerStrategy strategy, const SelectionInputs& inputs,
                                 const Budget& budget, std::uint64_t seed);

// Top-n by value, ties by ascending id.
std::vector<std::size_t> top_by_value(const std::vector<double>& values,
                                      const std::vector<std::string>& ids, std::size_t n);

// CSV `rank,location_id,criterion_value,strategy` with 1-based ranks.
std::string selection_csv(const SelectionResult& result);
SelectionResult parse_selection_csv(const std::string& text);

Json to_json(const Budget& b);
Json to_json(const SelectionResult& s);
SelectionResult selection_from_json(const Json& doc);

}  // namespace scalesift
