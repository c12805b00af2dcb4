#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "scalesift/tables.hpp"
#include "scalesift/world.hpp"

namespace scalesift {

struct KDModel;

enum class ProviderKind { SyntheticLR, SyntheticHR, Cached, KDModel };

const char* to_string(ProviderKind kind);
ProviderKind provider_kind_from_string(const std::string& name);

// One row per tile, one column per requested concept.
using TileScores = std::vector<std::vector<double>>;

inline constexpr double kDefaultSteepness = 6.0;

double logistic(double z);

// Sparse (location, concept) -> score map read from a score cache. Keeps the
// first-appearance order of both id lists.
class ScoreCache {
 public:
  void insert(const std::string& location, const std::string& concept_id, double score,
              std::size_t line);
  std::optional<double> find(const std::string& location, const std::string& concept_id) const;
  const std::vector<std::string>& concepts() const noexcept { return concepts_; }
  const std::vector<std::string>& locations() const noexcept { return locations_; }
  std::size_t size() const noexcept { return cells_.size(); }
  // Dense table over every seen id; throws if any cell is missing.
  ScoreTable to_table() const;

 private:
  std::map<std::pair<std::string, std::string>, double> cells_;
  std::vector<std::string> concepts_;
  std::vector<std::string> locations_;
  std::map<std::string, bool> seen_concepts_, seen_locations_;
};

// A source of concept scores: synthetic LR/HR models over a World, a score
// cache produced elsewhere (e.g. a real network), or a distilled KD model.
// Read-only after construction apart from the query counter.
class ScoreProvider {
 public:
  static ScoreProvider synthetic_lr(std::shared_ptr<const World> world,
                                    double steepness = kDefaultSteepness);
  static ScoreProvider synthetic_hr(std::shared_ptr<const World> world,
                                    double steepness = kDefaultSteepness);
  static ScoreProvider cached(std::shared_ptr<const ScoreCache> cache);
  static ScoreProvider cached(const std::filesystem::path& path);
  static ScoreProvider kd_model(std::shared_ptr<const KDModel> model,
                                std::shared_ptr<const World> world);

  ProviderKind kind() const noexcept { return kind_; }
  bool scores_tiles() const noexcept { return kind_ == ProviderKind::SyntheticHR; }
  const World* world() const noexcept { return world_.get(); }
  const ScoreCache* cache() const noexcept { return cache_.get(); }
  const KDModel* model() const noexcept { return model_.get(); }
  double steepness() const noexcept { return steepness_; }
  const Eigen::MatrixXd& pseudo_inverse() const noexcept { return pinv_; }

  // Number of locations this provider has been asked to score. For an HR
  // provider this is the number of locations whose imagery was "acquired".
  std::size_t locations_scored() const noexcept { return counter_->load(); }
  void reset_counter() const noexcept { counter_->store(0); }
  void count(std::size_t n) const noexcept { counter_->fetch_add(n); }

 private:
  ProviderKind kind_ = ProviderKind::Cached;
  std::shared_ptr<const World> world_;
  std::shared_ptr<const ScoreCache> cache_;
  std::shared_ptr<const KDModel> model_;
  double steepness_ = kDefaultSteepness;
  Eigen::MatrixXd pinv_;
  std::shared_ptr<std::atomic<std::size_t>> counter_ =
      std::make_shared<std::atomic<std::size_t>>(0);
};

// Location-level scores from an LR-style provider (synthetic-lr, cached, kd-model).
ScoreTable score_lr(const ScoreProvider& provider, const std::vector<std::string>& locations,
                    const std::vector<std::string>& concepts);

// K tile score vectors for one location from a synthetic-hr provider.
TileScores score_hr_tiles(const ScoreProvider& provider, const std::string& location,
                          const std::vector<std::string>& concepts);

// Per-concept maximum over the tiles.
std::vector<double> aggregate_hr(const TileScores& tiles);

// HR location scores: tiles + max for synthetic-hr, passthrough for a cache of
// already aggregated HR scores.
ScoreTable score_hr(const ScoreProvider& provider, const std::vector<std::string>& locations,
                    const std::vector<std::string>& concepts);

// Score cache CSV: header `location_id,concept_id,score`, LF line endings.
void write_score_cache(const ScoreTable& table, const std::filesystem::path& path);
std::string score_cache_csv(const ScoreTable& table);
ScoreCache read_score_cache(const std::filesystem::path& path);
ScoreCache parse_score_cache(const std::string& text);
ScoreTable score_cache_roundtrip(const ScoreTable& table, const std::filesystem::path& path);

}  // namespace scalesift
