#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace scalesift {

// Ordered list of unique ids with O(1) lookup.
class IdIndex {
 public:
  IdIndex() = default;
  explicit IdIndex(std::vector<std::string> ids, const char* what = "id");

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& operator[](std::size_t i) const { return ids_[i]; }

  std::optional<std::size_t> find(const std::string& id) const;
  // Throws NotFoundError naming the id.
  std::size_t require(const std::string& id) const;

  bool operator==(const IdIndex& other) const { return ids_ == other.ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> pos_;
  const char* what_ = "id";
};

// Dense concept x location matrix of scores in [0,1]. This is what every
// scoring path produces and every metric consumes.
class ScoreTable {
 public:
  ScoreTable() = default;
  // Zero-filled.
  ScoreTable(std::vector<std::string> concepts, std::vector<std::string> locations);
  // values are row-major (concept-major); every value must be in [0,1].
  ScoreTable(std::vector<std::string> concepts, std::vector<std::string> locations,
             std::vector<double> values);

  std::size_t num_concepts() const noexcept { return concepts_.size(); }
  std::size_t num_locations() const noexcept { return locations_.size(); }
  const std::vector<std::string>& concepts() const noexcept { return concepts_.ids(); }
  const std::vector<std::string>& locations() const noexcept { return locations_.ids(); }
  const IdIndex& concept_index() const noexcept { return concepts_; }
  const IdIndex& location_index() const noexcept { return locations_; }

  double at(std::size_t concept_row, std::size_t location_col) const {
    return values_[concept_row * locations_.size() + location_col];
  }
  double at(const std::string& concept_id, const std::string& location_id) const;
  // Rejects values outside [0,1] and NaN.
  void set(std::size_t concept_row, std::size_t location_col, double v);

  std::span<const double> row(std::size_t concept_row) const;
  const std::vector<double>& values() const noexcept { return values_; }

  // Sub-table in the requested order; unknown ids throw NotFoundError.
  ScoreTable select(const std::vector<std::string>& concepts,
                    const std::vector<std::string>& locations) const;

  bool operator==(const ScoreTable& other) const;

 private:
  IdIndex concepts_;
  IdIndex locations_;
  std::vector<double> values_;
};

// Binary ground truth in the same concept x location layout as ScoreTable.
class LabelTable {
 public:
  LabelTable() = default;
  LabelTable(std::vector<std::string> concepts, std::vector<std::string> locations,
             std::vector<std::uint8_t> values);

  std::size_t num_concepts() const noexcept { return concepts_.size(); }
  std::size_t num_locations() const noexcept { return locations_.size(); }
  const std::vector<std::string>& concepts() const noexcept { return concepts_.ids(); }
  const std::vector<std::string>& locations() const noexcept { return locations_.ids(); }
  const IdIndex& concept_index() const noexcept { return concepts_; }
  const IdIndex& location_index() const noexcept { return locations_; }

  bool at(std::size_t concept_row, std::size_t location_col) const {
    return values_[concept_row * locations_.size() + location_col] != 0;
  }
  std::span<const std::uint8_t> row(std::size_t concept_row) const;

  LabelTable select(const std::vector<std::string>& concepts,
                    const std::vector<std::string>& locations) const;

 private:
  IdIndex concepts_;
  IdIndex locations_;
  std::vector<std::uint8_t> values_;
};

}  // namespace scalesift
