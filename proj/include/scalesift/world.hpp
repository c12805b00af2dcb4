#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scalesift/json_io.hpp"
#include "scalesift/tables.hpp"

namespace scalesift {

struct ConceptSpec {
  std::string id;
  double scale = 1.0;       // fraction of a location's extent a positive instance occupies
  double prevalence = 0.5;  // P(location contains the concept)
  bool seen = true;
  // Coarse concept this concept co-occurs with. Empty means an independent draw.
  std::optional<std::string> host;
};

struct WorldSpec {
  int num_locations = 400;
  int tiles_per_location = 16;
  std::vector<ConceptSpec> concepts;
  int feature_dim = 32;
  double lr_noise_fine = 0.25;
  double hr_noise_coarse = 0.5;
  double scale_threshold = 0.5;
  // 0 draws every concept independently; 1 makes a hosted concept appear
  // only where its host does (subject to keeping its prevalence).
  double context_coupling = 0.85;
  std::uint64_t seed = 7;

  // Throws ValidationError naming the violated field.
  void validate() const;

  std::size_t num_concepts() const noexcept { return concepts.size(); }
  bool is_fine(std::size_t concept_index) const {
    return concepts[concept_index].scale < scale_threshold;
  }
  // ceil(scale * K): tiles holding the concept at a positive location.
  int positive_tiles(std::size_t concept_index) const;
  std::vector<std::string> concept_ids() const;
  std::vector<std::string> seen_concepts() const;
  std::vector<std::string> unseen_concepts() const;

  // 400 locations, K=16, six fine (scale 0.06) and six coarse (scale 0.9)
  // concepts at prevalence 0.3, d=32, seed 7.
  static WorldSpec default_spec();
};

// Synthetic ground truth plus the LR observations derived from it.
// Immutable after generation.
struct World {
  WorldSpec spec;
  std::vector<std::string> location_ids;
  std::vector<std::uint8_t> labels;       // N x M, location-major
  std::vector<std::uint8_t> tile_truths;  // N x M x K
  std::vector<double> lr_features;        // N x d
  std::vector<double> aux_weights;        // N

  std::size_t num_locations() const noexcept { return location_ids.size(); }
  std::size_t num_concepts() const noexcept { return spec.concepts.size(); }
  std::size_t num_tiles() const noexcept { return static_cast<std::size_t>(spec.tiles_per_location); }
  std::size_t feature_dim() const noexcept { return static_cast<std::size_t>(spec.feature_dim); }

  bool label(std::size_t location, std::size_t concept_index) const {
    return labels[location * num_concepts() + concept_index] != 0;
  }
  bool tile(std::size_t location, std::size_t concept_index, std::size_t tile_index) const {
    return tile_truths[(location * num_concepts() + concept_index) * num_tiles() + tile_index] != 0;
  }
  std::span<const double> features(std::size_t location) const {
    return {lr_features.data() + location * feature_dim(), feature_dim()};
  }

  std::size_t location_index(const std::string& id) const;
  std::size_t concept_index(const std::string& id) const;

  // Ground truth for the given concepts and locations.
  LabelTable label_table(const std::vector<std::string>& concepts,
                         const std::vector<std::string>& locations) const;
  // Rows of lr_features for the given locations, in order.
  Eigen::MatrixXd feature_matrix(const std::vector<std::string>& locations) const;

  bool operator==(const World& other) const;

 private:
  friend World generate_world(const WorldSpec& spec);
  friend World world_from_json(const Json& doc);
  void build_indices();
  IdIndex location_index_;
  IdIndex concept_index_;
};

struct Split {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

// Deterministic function of the spec, seed included.
World generate_world(const WorldSpec& spec);

// The d x M mixing matrix A behind lr_features, regenerated from the spec.
Eigen::MatrixXd mixing_matrix(const WorldSpec& spec);

// Seeded shuffle then contiguous partition; val/test sizes round(f*N), remainder to train.
Split split_locations(const World& world, std::array<double, 3> fractions, std::uint64_t seed);

Json to_json(const ConceptSpec& c);
Json to_json(const WorldSpec& spec);
Json to_json(const World& world);
Json to_json(const Split& split);
ConceptSpec concept_spec_from_json(const Json& doc, const std::string& path = "$");
// Missing fields take the defaults; a missing concept list gives the default concepts.
WorldSpec world_spec_from_json(const Json& doc, const std::string& path = "$");
World world_from_json(const Json& doc);

}  // namespace scalesift
