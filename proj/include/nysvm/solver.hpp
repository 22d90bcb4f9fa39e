#pragma once

#include "nysvm/io.hpp"
#include "nysvm/nystrom.hpp"
#include "nysvm/random.hpp"
#include "nysvm/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace nysvm {

enum class LossFamily { hinge, logistic };

[[nodiscard]] inline std::string to_string(LossFamily family) {
  return family == LossFamily::hinge ? "hinge" : "logistic";
}

/// Convex Lipschitz margin loss. `clip_m` is the prediction clipping level M.
struct LossSpec {
  LossFamily family = LossFamily::hinge;
  double clip_m = 1.0;

  [[nodiscard]] static LossSpec hinge(double clip_m = 1.0) {
    return make(LossFamily::hinge, clip_m);
  }

  [[nodiscard]] static LossSpec logistic(double clip_m = 1.0) {
    return make(LossFamily::logistic, clip_m);
  }

  [[nodiscard]] static LossSpec make(LossFamily family, double clip_m) {
    if (!(clip_m > 0.0)) throw InvalidInputError("loss: clip level must be > 0");
    return LossSpec{family, clip_m};
  }

  [[nodiscard]] double lipschitz() const { return 1.0; }

  [[nodiscard]] double loss_at_zero() const {
    return family == LossFamily::hinge ? 1.0 : std::numbers::ln2;
  }
};

[[nodiscard]] inline double loss_value(const LossSpec& loss, double y,
                                       double score) {
  const double margin = y * score;
  if (loss.family == LossFamily::hinge) return std::max(0.0, 1.0 - margin);
  // log(1 + exp(-margin)) without overflow on either tail
  if (margin < 0.0) return -margin + std::log1p(std::exp(margin));
  return std::log1p(std::exp(-margin));
}

/// Returns g such that d loss / d score = y * g. Hinge takes g = -1 on the
/// boundary margin == 1.
[[nodiscard]] inline double loss_subgradient(const LossSpec& loss, double y,
                                             double score) {
  const double margin = y * score;
  if (loss.family == LossFamily::hinge) return margin <= 1.0 ? -1.0 : 0.0;
  return -1.0 / (1.0 + std::exp(margin));
}

[[nodiscard]] inline double clip_score(double score, double m) {
  return std::clamp(score, -m, m);
}

struct TrainOptions {
  std::uint64_t epochs = 5;
  std::uint64_t seed = 0;
  bool full_batch = false;        // one deterministic full-subgradient step per
                                  // iteration instead of single-sample steps
  bool average_iterates = false;  // return the running mean of the iterates
  double step_scale = 0.0;        // > 0 overrides the default step constant
};

struct TrainedModel {
  Vector weights;
  LossSpec loss;
  double lambda = 0.0;  // 0 for constrained training
  double radius = 0.0;  // 0 for penalized training
  std::uint64_t epochs = 0;
  double final_objective = 0.0;
  std::vector<double> epoch_objectives;
  std::shared_ptr<const NystromMap> map;  // attached by the pipeline
};

/// Mean loss plus lambda * ||a||^2 on raw (unclipped) scores.
[[nodiscard]] inline double objective_value(const Matrix& x, const Vector& y,
                                            const LossSpec& loss, double lambda,
                                            const Vector& a) {
  if (x.rows() != y.size() || x.rows() < 1)
    throw InvalidInputError("objective_value: shape mismatch or empty data");
  const Vector scores = x * a;
  double total = 0.0;
  for (Index i = 0; i < y.size(); ++i)
    total += loss_value(loss, y(i), scores(i));
  return total / static_cast<double>(x.rows()) + lambda * a.squaredNorm();
}

namespace detail {

inline void check_training_inputs(const Matrix& x, const Vector& y,
                                  const TrainOptions& opt) {
  if (x.rows() < 1) throw InvalidInputError("train: empty training set");
  if (x.rows() != y.size())
    throw InvalidInputError("train: feature/label count mismatch");
  for (Index i = 0; i < y.size(); ++i)
    if (y(i) != 1.0 && y(i) != -1.0)
      throw InvalidInputError("train: labels must be exactly +/-1");
  if (opt.epochs < 1) throw InvalidInputError("train: epochs must be >= 1");
}

inline void project_to_ball(Vector& a, double radius) {
  const double norm = a.norm();
  if (norm > radius) a *= radius / norm;
}

template <typename Step>
TrainedModel run_sgd(const Matrix& x, const Vector& y, const LossSpec& loss,
                     double lambda, double radius, Step step_size,
                     const TrainOptions& opt) {
  const Index n = x.rows();
  const Index dim = x.cols();
  Vector a = Vector::Zero(dim);
  Vector mean = Vector::Zero(dim);
  Rng rng(opt.seed);
  std::uint64_t t = 0;

  TrainedModel model;
  model.loss = loss;
  model.lambda = lambda;
  model.epochs = opt.epochs;
  model.epoch_objectives.reserve(opt.epochs);

  const auto record_epoch = [&] {
    if (!a.allFinite())
      throw DivergenceError(t, "non-finite iterate");
    const Vector& current = opt.average_iterates ? mean : a;
    model.epoch_objectives.push_back(
        objective_value(x, y, loss, lambda, current));
  };

  for (std::uint64_t epoch = 0; epoch < opt.epochs; ++epoch) {
    if (opt.full_batch) {
      ++t;
      const Vector scores = x * a;
      Vector weighted(n);
      for (Index i = 0; i < n; ++i)
        weighted(i) = y(i) * loss_subgradient(loss, y(i), scores(i));
      const double eta = step_size(t);
      Vector grad = x.transpose() * weighted / static_cast<double>(n);
      grad.noalias() += 2.0 * lambda * a;
      a.noalias() -= eta * grad;
      detail::project_to_ball(a, radius);
      mean += (a - mean) / static_cast<double>(t);
    } else {
      for (Index k = 0; k < n; ++k) {
        ++t;
        const Index i = rng.uniform_index(n);
        const double score = a.dot(x.row(i));
        if (!std::isfinite(score))
          throw DivergenceError(t, "non-finite decision score");
        const double g = loss_subgradient(loss, y(i), score);
        const double eta = step_size(t);
        a *= 1.0 - 2.0 * lambda * eta;
        if (g != 0.0) a.noalias() -= (eta * y(i) * g) * x.row(i).transpose();
        detail::project_to_ball(a, radius);
        if (opt.average_iterates)
          mean += (a - mean) / static_cast<double>(t);
      }
    }
    record_epoch();
  }

  model.weights = opt.average_iterates ? mean : a;
  model.final_objective = model.epoch_objectives.back();
  return model;
}

}  // namespace detail

/// Pegasos-style solver for min_a (1/n) sum_i loss(y_i, <a, x_i>) +
/// lambda*||a||^2. Steps eta_t = 1/(2*lambda*t) (times step_scale when set),
/// update a <- a - eta_t*(y_i * g * x_i + 2*lambda*a), projection onto the
/// ball of radius sqrt(loss(.,0)/lambda).
[[nodiscard]] inline TrainedModel train_penalized(const Matrix& x,
                                                  const Vector& y,
                                                  const LossSpec& loss,
                                                  double lambda,
                                                  const TrainOptions& opt = {}) {
  detail::check_training_inputs(x, y, opt);
  if (!(lambda > 0.0)) throw InvalidInputError("train: lambda must be > 0");
  const double scale = opt.step_scale > 0.0 ? opt.step_scale : 1.0;
  const double ball = std::sqrt(loss.loss_at_zero() / lambda);
  return detail::run_sgd(
      x, y, loss, lambda, ball,
      [lambda, scale](std::uint64_t t) {
        return scale / (2.0 * lambda * static_cast<double>(t));
      },
      opt);
}

/// Projected subgradient descent over the ball ||a|| <= radius with steps
/// eta_t = c/sqrt(t), c = radius / (G * max_i ||x_i||) unless overridden.
[[nodiscard]] inline TrainedModel train_constrained(
    const Matrix& x, const Vector& y, const LossSpec& loss, double radius,
    const TrainOptions& opt = {}) {
  detail::check_training_inputs(x, y, opt);
  if (!(radius >= 0.0)) throw InvalidInputError("train: radius must be >= 0");
  double c = opt.step_scale;
  if (c <= 0.0) {
    const double max_norm = x.rowwise().norm().maxCoeff();
    c = max_norm > 0.0 ? radius / (loss.lipschitz() * max_norm) : radius;
  }
  TrainedModel model = detail::run_sgd(
      x, y, loss, /*lambda=*/0.0, radius,
      [c](std::uint64_t t) { return c / std::sqrt(static_cast<double>(t)); },
      opt);
  model.radius = radius;
  return model;
}

/// Scores for rows already living in the embedded space.
[[nodiscard]] inline Vector decision_scores(const TrainedModel& model,
                                            const Matrix& embedded) {
  if (embedded.cols() != model.weights.size())
    throw InvalidInputError("decision_scores: embedded dimension mismatch");
  return embedded * model.weights;
}

/// Scores for raw points; requires the model to carry its embedding map.
[[nodiscard]] inline Vector predict_scores(const TrainedModel& model,
                                           const Matrix& points,
                                           bool clip = false) {
  if (!model.map)
    throw InvalidInputError("predict_scores: model has no embedding map");
  Vector scores = decision_scores(model, embed(*model.map, points));
  if (clip)
    for (Index i = 0; i < scores.size(); ++i)
      scores(i) = clip_score(scores(i), model.loss.clip_m);
  return scores;
}

[[nodiscard]] inline Vector predict_scores(const TrainedModel& model,
                                           const Dataset& ds, bool clip = false) {
  return predict_scores(model, ds.x, clip);
}

/// sign with sign(0) = +1.
[[nodiscard]] inline Vector predict_labels(const Vector& scores) {
  Vector labels(scores.size());
  for (Index i = 0; i < scores.size(); ++i)
    labels(i) = scores(i) >= 0.0 ? 1.0 : -1.0;
  return labels;
}

/// Fraction of sign mismatches between scores and +/-1 labels.
[[nodiscard]] inline double classification_error(const Vector& scores,
                                                 const Vector& labels) {
  if (scores.size() != labels.size())
    throw InvalidInputError("classification_error: size mismatch");
  if (scores.size() == 0)
    throw InvalidInputError("classification_error: empty input");
  Index wrong = 0;
  for (Index i = 0; i < scores.size(); ++i) {
    const double predicted = scores(i) >= 0.0 ? 1.0 : -1.0;
    if (predicted != labels(i)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(scores.size());
}

/// Mean loss of (optionally clipped) scores against labels.
[[nodiscard]] inline double empirical_risk(const LossSpec& loss,
                                           const Vector& scores,
                                           const Vector& labels,
                                           bool clip = true) {
  if (scores.size() != labels.size())
    throw InvalidInputError("empirical_risk: size mismatch");
  if (scores.size() == 0) throw InvalidInputError("empirical_risk: empty input");
  double total = 0.0;
  for (Index i = 0; i < scores.size(); ++i) {
    const double s = clip ? clip_score(scores(i), loss.clip_m) : scores(i);
    total += loss_value(loss, labels(i), s);
  }
  return total / static_cast<double>(scores.size());
}

inline constexpr std::uint64_t kModelMagic = 0x31444d4d56534e00ULL;
inline constexpr std::uint64_t kModelVersion = 1;

/// Versioned binary model format. For precomputed kernels the Gram matrix is
/// not stored; reattach it after loading before predicting.
inline void save_model(const std::filesystem::path& path,
                       const TrainedModel& model) {
  if (!model.map) throw InvalidInputError("save_model: model has no embedding map");
  auto out = open_output(path, std::ios::binary);
  detail::write_u64(out, kModelMagic);
  detail::write_u64(out, kModelVersion);
  detail::write_u64(out, static_cast<std::uint64_t>(model.loss.family));
  detail::write_f64(out, model.loss.clip_m);
  detail::write_f64(out, model.lambda);
  detail::write_f64(out, model.radius);
  detail::write_u64(out, model.epochs);
  detail::write_f64(out, model.final_objective);
  detail::write_vector(out, model.weights);

  const NystromMap& map = *model.map;
  detail::write_u64(out, static_cast<std::uint64_t>(map.spec.family));
  detail::write_f64(out, map.spec.sigma);
  detail::write_matrix(out, map.landmark_points);
  detail::write_u64(out, map.landmark_indices.size());
  for (const Index i : map.landmark_indices)
    detail::write_u64(out, static_cast<std::uint64_t>(i));
  detail::write_vector(out, map.eigenvalues);
  detail::write_matrix(out, map.factor);
  detail::write_f64(out, map.tol);
  if (!out) throw IoError("failed writing model: " + path.string());
}

[[nodiscard]] inline TrainedModel load_model(const std::filesystem::path& path) {
  auto in = open_input(path, std::ios::binary);
  if (detail::read_u64(in) != kModelMagic)
    throw IoError("not a model file: " + path.string());
  const std::uint64_t version = detail::read_u64(in);
  if (version != kModelVersion)
    throw IoError("unsupported model version " + std::to_string(version));

  TrainedModel model;
  const auto family = detail::read_u64(in);
  if (family > static_cast<std::uint64_t>(LossFamily::logistic))
    throw IoError("corrupt model: unknown loss family");
  model.loss.family = static_cast<LossFamily>(family);
  model.loss.clip_m = detail::read_f64(in);
  model.lambda = detail::read_f64(in);
  model.radius = detail::read_f64(in);
  model.epochs = detail::read_u64(in);
  model.final_objective = detail::read_f64(in);
  model.weights = detail::read_vector(in);

  auto map = std::make_shared<NystromMap>();
  const auto kernel_family = detail::read_u64(in);
  if (kernel_family > static_cast<std::uint64_t>(KernelFamily::precomputed))
    throw IoError("corrupt model: unknown kernel family");
  map->spec.family = static_cast<KernelFamily>(kernel_family);
  map->spec.sigma = detail::read_f64(in);
  map->landmark_points = detail::read_matrix(in);
  const auto m = detail::read_u64(in);
  map->landmark_indices.resize(m);
  for (std::uint64_t i = 0; i < m; ++i)
    map->landmark_indices[i] = static_cast<Index>(detail::read_u64(in));
  map->eigenvalues = detail::read_vector(in);
  map->factor = detail::read_matrix(in);
  map->tol = detail::read_f64(in);
  model.map = std::move(map);
  return model;
}

}  // namespace nysvm
