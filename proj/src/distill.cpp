#include "scalesift/distill.hpp"

#include <algorithm>
#include <cmath>

#include "scalesift/error.hpp"
#include "scalesift/rng.hpp"
#include "scalesift/scoring.hpp"
#include "scalesift/world.hpp"

namespace scalesift {
namespace {

struct Forward {
  Eigen::MatrixXd hidden;  // n x h, after tanh
  Eigen::MatrixXd output;  // n x M, after logistic
};

Forward forward_pass(const KDParams& p, const Eigen::MatrixXd& x) {
  Forward f;
  f.hidden = ((x * p.w1.transpose()).rowwise() + p.b1.transpose()).array().tanh().matrix();
  Eigen::MatrixXd z = (f.hidden * p.w2.transpose()).rowwise() + p.b2.transpose();
  f.output = (1.0 / (1.0 + (-z.array()).exp())).matrix();
  return f;
}

void check_batch(const KDModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& t,
                 const std::vector<bool>& seen_mask) {
  const auto& p = model.params;
  if (x.rows() == 0) throw ValidationError("kd: empty batch");
  if (x.cols() != p.feature_dim())
    throw ValidationError("kd: features have " + std::to_string(x.cols()) + " columns, model expects " +
                          std::to_string(p.feature_dim()));
  if (t.rows() != x.rows() || t.cols() != p.num_concepts())
    throw ValidationError("kd: targets must be " + std::to_string(x.rows()) + " x " +
                          std::to_string(p.num_concepts()));
  if (static_cast<Eigen::Index>(seen_mask.size()) != p.num_concepts())
    throw ValidationError("kd: seen mask length does not match the number of concepts");
  for (Eigen::Index c = 0; c < t.cols(); ++c) {
    if (!seen_mask[static_cast<std::size_t>(c)]) continue;
    for (Eigen::Index i = 0; i < t.rows(); ++i)
      if (!(t(i, c) >= 0.0 && t(i, c) <= 1.0)) throw ValidationError("kd: target outside [0,1]");
  }
}

// Residual on seen concepts; unseen columns are zero whatever their targets.
Eigen::MatrixXd masked_residual(const Eigen::MatrixXd& out, const Eigen::MatrixXd& t,
                                const std::vector<bool>& seen_mask) {
  Eigen::MatrixXd r = out - t;
  for (std::size_t c = 0; c < seen_mask.size(); ++c)
    if (!seen_mask[c]) r.col(static_cast<Eigen::Index>(c)).setZero();
  return r;
}

}  // namespace

KDParams KDParams::zeros(Eigen::Index feature_dim, Eigen::Index hidden_dim, Eigen::Index num_concepts) {
  return {Eigen::MatrixXd::Zero(hidden_dim, feature_dim), Eigen::VectorXd::Zero(hidden_dim),
          Eigen::MatrixXd::Zero(num_concepts, hidden_dim), Eigen::VectorXd::Zero(num_concepts)};
}

double KDParams::max_abs() const {
  double m = 0.0;
  if (w1.size()) m = std::max(m, w1.cwiseAbs().maxCoeff());
  if (b1.size()) m = std::max(m, b1.cwiseAbs().maxCoeff());
  if (w2.size()) m = std::max(m, w2.cwiseAbs().maxCoeff());
  if (b2.size()) m = std::max(m, b2.cwiseAbs().maxCoeff());
  return m;
}

bool KDParams::operator==(const KDParams& o) const {
  auto same = [](const auto& a, const auto& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
  };
  return same(w1, o.w1) && same(b1, o.b1) && same(w2, o.w2) && same(b2, o.b2);
}

Eigen::MatrixXd KDModel::forward(const Eigen::MatrixXd& features) const {
  return forward_pass(params, features).output;
}

void TrainConfig::validate(std::size_t num_concepts) const {
  if (!(learning_rate > 0.0)) throw ValidationError("train config: learning_rate must be > 0");
  if (epochs < 0) throw ValidationError("train config: epochs must be >= 0");
  if (hidden_dim < 1) throw ValidationError("train config: hidden_dim must be >= 1");
  if (!(init_scale > 0.0)) throw ValidationError("train config: init_scale must be > 0");
  if (seen_mask.size() != num_concepts)
    throw ValidationError("train config: seen_mask needs one entry per concept");
  if (std::find(seen_mask.begin(), seen_mask.end(), true) == seen_mask.end())
    throw ValidationError("train config: seen_mask must mark at least one concept");
}

double kd_loss(const KDModel& model, const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
               const std::vector<bool>& seen_mask) {
  check_batch(model, features, targets, seen_mask);
  Forward f = forward_pass(model.params, features);
  return masked_residual(f.output, targets, seen_mask).squaredNorm();
}

KDParams kd_gradient(const KDModel& model, const Eigen::MatrixXd& features,
                     const Eigen::MatrixXd& targets, const std::vector<bool>& seen_mask) {
  check_batch(model, features, targets, seen_mask);
  const KDParams& p = model.params;
  Forward f = forward_pass(p, features);
  Eigen::MatrixXd r = masked_residual(f.output, targets, seen_mask);
  // dL/dz at the output pre-activation: 2 r * o (1 - o).
  Eigen::MatrixXd gz = (2.0 * r.array() * f.output.array() * (1.0 - f.output.array())).matrix();
  // Back through tanh: (gz W2) * (1 - h^2).
  Eigen::MatrixXd gh = ((gz * p.w2).array() * (1.0 - f.hidden.array().square())).matrix();
  KDParams g;
  g.w2 = gz.transpose() * f.hidden;
  g.b2 = gz.colwise().sum().transpose();
  g.w1 = gh.transpose() * features;
  g.b1 = gh.colwise().sum().transpose();
  return g;
}

KDModel init_kd_model(Eigen::Index feature_dim, const std::vector<std::string>& concepts,
                      const TrainConfig& config) {
  const auto m = static_cast<Eigen::Index>(concepts.size());
  KDModel model{KDParams::zeros(feature_dim, config.hidden_dim, m), concepts};
  Engine eng = stream_engine(config.seed, "kd-init");
  std::normal_distribution<double> normal(0.0, config.init_scale);
  auto fill = [&](auto& mat) {
    for (Eigen::Index i = 0; i < mat.rows(); ++i)
      for (Eigen::Index j = 0; j < mat.cols(); ++j) mat(i, j) = normal(eng);
  };
  fill(model.params.w1);
  fill(model.params.b1);
  fill(model.params.w2);
  fill(model.params.b2);
  return model;
}

TrainResult train_kd(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                     const std::vector<std::string>& concepts, const TrainConfig& config) {
  config.validate(concepts.size());
  TrainResult result;
  result.model = init_kd_model(features.cols(), concepts, config);
  KDParams& p = result.model.params;
  if (config.epochs == 0) return result;

  const double lr = config.learning_rate;
  result.loss_history.reserve(static_cast<std::size_t>(config.epochs));
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double loss = kd_loss(result.model, features, targets, config.seen_mask);
    if (!std::isfinite(loss))
      throw TrainingError("kd training diverged: non-finite loss at epoch " + std::to_string(epoch),
                          epoch);
    result.loss_history.push_back(loss);
    KDParams g = kd_gradient(result.model, features, targets, config.seen_mask);
    p.w1 -= lr * g.w1;
    p.b1 -= lr * g.b1;
    p.w2 -= lr * g.w2;
    p.b2 -= lr * g.b2;
  }
  result.initial_loss = result.loss_history.front();
  result.final_loss = kd_loss(result.model, features, targets, config.seen_mask);
  if (!std::isfinite(result.final_loss))
    throw TrainingError("kd training diverged: non-finite final loss", config.epochs);
  if (!(result.final_loss < result.initial_loss))
    throw TrainingError("kd training did not improve the loss (" + format_real(result.initial_loss) +
                            " -> " + format_real(result.final_loss) +
                            "); try a smaller learning_rate",
                        config.epochs);
  return result;
}

TrainResult train_kd(const World& world, const ScoreProvider& hr, const Split& split,
                     const TrainConfig& config) {
  const auto concepts = world.spec.concept_ids();
  ScoreTable targets = score_hr(hr, split.train, concepts);
  Eigen::MatrixXd t(static_cast<Eigen::Index>(split.train.size()),
                    static_cast<Eigen::Index>(concepts.size()));
  for (std::size_t c = 0; c < concepts.size(); ++c)
    for (std::size_t i = 0; i < split.train.size(); ++i)
      t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = targets.at(c, i);
  return train_kd(world.feature_matrix(split.train), t, concepts, config);
}

ScoreTable kd_predict(const KDModel& model, const Eigen::MatrixXd& features,
                      const std::vector<std::string>& locations) {
  if (features.cols() != model.params.feature_dim())
    throw ValidationError("kd_predict: features have " + std::to_string(features.cols()) +
                          " columns, model expects " + std::to_string(model.params.feature_dim()));
  if (features.rows() != static_cast<Eigen::Index>(locations.size()))
    throw ValidationError("kd_predict: one feature row per location required");
  ScoreTable table(model.concepts, locations);
  // Row at a time so a location's scores do not depend on which other
  // locations are in the batch.
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    Eigen::MatrixXd out = model.forward(features.row(i));
    for (Eigen::Index c = 0; c < out.cols(); ++c)
      table.set(static_cast<std::size_t>(c), static_cast<std::size_t>(i), out(0, c));
  }
  return table;
}

namespace {

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::MatrixXd matrix_from(const Json& j, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw ValidationError(std::string("kd model: ") + name + " has the wrong number of rows");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ValidationError(std::string("kd model: ") + name + " has the wrong number of columns");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from(const Json& j, Eigen::Index size, const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size)
    throw ValidationError(std::string("kd model: ") + name + " has the wrong length");
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

}  // namespace

Json to_json(const KDModel& model) {
  const auto& p = model.params;
  return Json{{"hidden_dim", p.hidden_dim()}, {"feature_dim", p.feature_dim()},
              {"num_concepts", p.num_concepts()}, {"W1", matrix_json(p.w1)},
              {"b1", vector_json(p.b1)},          {"W2", matrix_json(p.w2)},
              {"b2", vector_json(p.b2)},          {"concepts", model.concepts}};
}

KDModel kd_model_from_json(const Json& doc) {
  JsonObjectReader r(doc, "$");
  auto h = r.get<Eigen::Index>("hidden_dim");
  auto d = r.get<Eigen::Index>("feature_dim");
  auto m = r.get<Eigen::Index>("num_concepts");
  if (h < 1 || d < 1 || m < 0) throw ValidationError("kd model: invalid dimensions");
  KDModel model;
  model.params.w1 = matrix_from(r.required("W1"), h, d, "W1");
  model.params.b1 = vector_from(r.required("b1"), h, "b1");
  model.params.w2 = matrix_from(r.required("W2"), m, h, "W2");
  model.params.b2 = vector_from(r.required("b2"), m, "b2");
  model.concepts = r.required("concepts").get<std::vector<std::string>>();
  r.finish();
  if (static_cast<Eigen::Index>(model.concepts.size()) != m)
    throw ValidationError("kd model: concepts length does not match num_concepts");
  return model;
}

}  // namespace scalesift
