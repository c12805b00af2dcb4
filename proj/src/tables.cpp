#include "scalesift/tables.hpp"

#include <cmath>

#include "scalesift/error.hpp"

namespace scalesift {

IdIndex::IdIndex(std::vector<std::string> ids, const char* what) : ids_(std::move(ids)), what_(what) {
  pos_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!pos_.emplace(ids_[i], i).second) {
      throw ValidationError(std::string("duplicate ") + what_ + ": " + ids_[i]);
    }
  }
}

std::optional<std::size_t> IdIndex::find(const std::string& id) const {
  auto it = pos_.find(id);
  if (it == pos_.end()) return std::nullopt;
  return it->second;
}

std::size_t IdIndex::require(const std::string& id) const {
  auto it = pos_.find(id);
  if (it == pos_.end()) throw NotFoundError(std::string("unknown ") + what_ + ": " + id);
  return it->second;
}

ScoreTable::ScoreTable(std::vector<std::string> concepts, std::vector<std::string> locations)
    : concepts_(std::move(concepts), "concept"),
      locations_(std::move(locations), "location"),
      values_(concepts_.size() * locations_.size(), 0.0) {}

ScoreTable::ScoreTable(std::vector<std::string> concepts, std::vector<std::string> locations,
                       std::vector<double> values)
    : concepts_(std::move(concepts), "concept"),
      locations_(std::move(locations), "location"),
      values_(std::move(values)) {
  if (values_.size() != concepts_.size() * locations_.size()) {
    throw ValidationError("score table: expected " +
                          std::to_string(concepts_.size() * locations_.size()) + " values, got " +
                          std::to_string(values_.size()));
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    double v = values_[k];
    if (!(v >= 0.0 && v <= 1.0)) {
      std::size_t c = k / locations_.size();
      std::size_t l = k % locations_.size();
      throw ValidationError("score out of [0,1] for concept " + concepts_[c] + " at location " +
                            locations_[l]);
    }
  }
}

double ScoreTable::at(const std::string& concept_id, const std::string& location_id) const {
  return at(concepts_.require(concept_id), locations_.require(location_id));
}

void ScoreTable::set(std::size_t concept_row, std::size_t location_col, double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError("score out of [0,1] for concept " + concepts_[concept_row] +
                          " at location " + locations_[location_col]);
  }
  values_[concept_row * locations_.size() + location_col] = v;
}

std::span<const double> ScoreTable::row(std::size_t concept_row) const {
  return {values_.data() + concept_row * locations_.size(), locations_.size()};
}

ScoreTable ScoreTable::select(const std::vector<std::string>& concepts,
                              const std::vector<std::string>& locations) const {
  std::vector<std::size_t> rows, cols;
  rows.reserve(concepts.size());
  cols.reserve(locations.size());
  for (const auto& c : concepts) rows.push_back(concepts_.require(c));
  for (const auto& l : locations) cols.push_back(locations_.require(l));
  std::vector<double> out;
  out.reserve(rows.size() * cols.size());
  for (auto r : rows)
    for (auto c : cols) out.push_back(at(r, c));
  return ScoreTable(concepts, locations, std::move(out));
}

bool ScoreTable::operator==(const ScoreTable& other) const {
  return concepts_ == other.concepts_ && locations_ == other.locations_ &&
         values_ == other.values_;
}

LabelTable::LabelTable(std::vector<std::string> concepts, std::vector<std::string> locations,
                       std::vector<std::uint8_t> values)
    : concepts_(std::move(concepts), "concept"),
      locations_(std::move(locations), "location"),
      values_(std::move(values)) {
  if (values_.size() != concepts_.size() * locations_.size()) {
    throw ValidationError("label table: size mismatch");
  }
}

std::span<const std::uint8_t> LabelTable::row(std::size_t concept_row) const {
  return {values_.data() + concept_row * locations_.size(), locations_.size()};
}

LabelTable LabelTable::select(const std::vector<std::string>& concepts,
                              const std::vector<std::string>& locations) const {
  std::vector<std::size_t> rows, cols;
  for (const auto& c : concepts) rows.push_back(concepts_.require(c));
  for (const auto& l : locations) cols.push_back(locations_.require(l));
  std::vector<std::uint8_t> out;
  out.reserve(rows.size() * cols.size());
  for (auto r : rows)
    for (auto c : cols) out.push_back(values_[r * locations_.size() + c]);
  return LabelTable(concepts, locations, std::move(out));
}

}  // namespace scalesift
