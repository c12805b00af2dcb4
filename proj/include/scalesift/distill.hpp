#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scalesift/json_io.hpp"
#include "scalesift/tables.hpp"

namespace scalesift {

class ScoreProvider;
struct World;
struct Split;

// Weights of the one-hidden-layer regressor. Also used for gradients, which
// have exactly the same shape.
struct KDParams {
  Eigen::MatrixXd w1;  // h x d
  Eigen::VectorXd b1;  // h
  Eigen::MatrixXd w2;  // M x h
  Eigen::VectorXd b2;  // M

  static KDParams zeros(Eigen::Index feature_dim, Eigen::Index hidden_dim, Eigen::Index num_concepts);
  Eigen::Index hidden_dim() const { return w1.rows(); }
  Eigen::Index feature_dim() const { return w1.cols(); }
  Eigen::Index num_concepts() const { return w2.rows(); }
  double max_abs() const;
  bool operator==(const KDParams& other) const;
};

// LR features -> per-concept scores: logistic(W2 tanh(W1 x + b1) + b2).
// The output head spans every concept; only the loss is restricted to seen ones.
struct KDModel {
  KDParams params;
  std::vector<std::string> concepts;

  // Rows are samples; returns n x M outputs in (0,1).
  Eigen::MatrixXd forward(const Eigen::MatrixXd& features) const;
};

struct TrainConfig {
  double learning_rate = 0.001;
  int epochs = 500;
  int hidden_dim = 64;
  double init_scale = 0.1;
  std::uint64_t seed = 0;
  std::vector<bool> seen_mask;  // one entry per concept

  void validate(std::size_t num_concepts) const;
};

struct TrainResult {
  KDModel model;
  std::vector<double> loss_history;  // loss before each update
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

// Sum over samples and seen concepts of squared error (no averaging).
double kd_loss(const KDModel& model, const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
               const std::vector<bool>& seen_mask);

// Exact gradient of kd_loss with respect to every parameter.
KDParams kd_gradient(const KDModel& model, const Eigen::MatrixXd& features,
                     const Eigen::MatrixXd& targets, const std::vector<bool>& seen_mask);

// Parameters drawn from N(0, init_scale^2) with the config seed.
KDModel init_kd_model(Eigen::Index feature_dim, const std::vector<std::string>& concepts,
                      const TrainConfig& config);

// Full-batch gradient descent. Throws TrainingError on a non-finite loss
// (with the epoch) or when the final loss is not below the initial one.
TrainResult train_kd(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                     const std::vector<std::string>& concepts, const TrainConfig& config);

// Targets are HR scores (max over tiles) on the train split.
TrainResult train_kd(const World& world, const ScoreProvider& hr, const Split& split,
                     const TrainConfig& config);

ScoreTable kd_predict(const KDModel& model, const Eigen::MatrixXd& features,
                      const std::vector<std::string>& locations);

Json to_json(const KDModel& model);
KDModel kd_model_from_json(const Json& doc);

}  // namespace scalesift
