#pragma once

/*
 One train / predict interface over the classifier zoo.

 Every fitted model exposes a real-valued score and a cut; predict returns
 1 exactly when score > cut, so thresholding predict_scores at cut()
 always reproduces predict. Probability-style kinds (logistic_regression,
 gaussian_nb, qda, knn, decision_tree, random_forest, gradient_boosting)
 use cut 0.5; margin kinds (ridge, perceptron, passive_aggressive,
 sgd_hinge, both AdaBoost variants) use cut 0. dummy_majority has no score.

 Training data containing a single class yields a constant predictor of
 that class for every kind.
*/

#include <string>
#include <variant>
#include <vector>

#include "fraudbench/classifiers/bayes.hpp"
#include "fraudbench/classifiers/ensemble.hpp"
#include "fraudbench/classifiers/knn.hpp"
#include "fraudbench/classifiers/linear.hpp"
#include "fraudbench/classifiers/spec.hpp"
#include "fraudbench/dataset.hpp"
#include "fraudbench/random.hpp"

namespace fraudbench {

struct ConstantModel {
  double value = 0.0;

  double score(std::span<const double>) const noexcept { return value; }
};

using FittedState = std::variant<ConstantModel, linear::Model, bayes::GaussianNb, bayes::Qda, knn::Model,
                                 ensemble::DecisionTree, ensemble::RandomForest, ensemble::AdaBoost,
                                 ensemble::GradientBoosting>;

inline bool uses_probability_cut(ClassifierKind k) noexcept {
  switch (k) {
    case ClassifierKind::logistic_regression:
    case ClassifierKind::gaussian_nb:
    case ClassifierKind::qda:
    case ClassifierKind::knn:
    case ClassifierKind::decision_tree:
    case ClassifierKind::random_forest:
    case ClassifierKind::gradient_boosting:
    case ClassifierKind::dummy_majority:
      return true;
    default:
      return false;
  }
}

class TrainedModel {
 public:
  TrainedModel(ClassifierSpec spec, FittedState state, std::vector<Label> classes_seen, std::size_t dims)
      : spec_(std::move(spec)), state_(std::move(state)), classes_seen_(std::move(classes_seen)), dims_(dims) {}

  const ClassifierSpec& spec() const noexcept { return spec_; }
  const FittedState& state() const noexcept { return state_; }
  const std::vector<Label>& classes_seen() const noexcept { return classes_seen_; }
  std::size_t dims() const noexcept { return dims_; }

  double cut() const noexcept { return uses_probability_cut(spec_.kind) ? 0.5 : 0.0; }

  bool is_constant() const noexcept { return std::holds_alternative<ConstantModel>(state_); }

  // Score of a single row; no capability check.
  double raw_score(std::span<const double> x) const {
    return std::visit([&](const auto& m) -> double { return m.score(x); }, state_);
  }

 private:
  ClassifierSpec spec_;
  FittedState state_;
  std::vector<Label> classes_seen_;
  std::size_t dims_ = 0;
};

inline TrainedModel train(const ClassifierSpec& spec, const Dataset& data, const RandomSource& rng) {
  if (data.size() == 0) throw ContractError("train: empty dataset");
  if (data.labels.size() != data.features.rows()) throw ContractError("train: labels/features row mismatch");
  const std::size_t frauds = data.fraud_count();
  const std::size_t normals = data.size() - frauds;
  std::vector<Label> seen;
  if (normals > 0) seen.push_back(0);
  if (frauds > 0) seen.push_back(1);

  const bool prob = uses_probability_cut(spec.kind);
  auto constant = [&](Label c) {
    const double v = prob ? (c ? 1.0 : 0.0) : (c ? 1.0 : -1.0);
    return TrainedModel(spec, ConstantModel{v}, seen, data.dims());
  };

  if (spec.kind == ClassifierKind::dummy_majority) return constant(frauds > normals ? 1 : 0);
  if (seen.size() == 1) return constant(seen.front());

  RandomSource own = derive_child(rng, spec.seed_label);
  FittedState state;
  switch (spec.kind) {
    case ClassifierKind::dummy_majority:
      break;
    case ClassifierKind::logistic_regression:
      state = linear::fit_logistic(data, spec);
      break;
    case ClassifierKind::ridge:
      state = linear::fit_ridge(data, spec);
      break;
    case ClassifierKind::perceptron:
      state = linear::fit_online(data, spec, linear::OnlineRule::perceptron, own);
      break;
    case ClassifierKind::passive_aggressive:
      state = linear::fit_online(data, spec, linear::OnlineRule::passive_aggressive, own);
      break;
    case ClassifierKind::sgd_hinge:
      state = linear::fit_online(data, spec, linear::OnlineRule::sgd_hinge, own);
      break;
    case ClassifierKind::gaussian_nb:
      state = bayes::fit_gaussian_nb(data, spec);
      break;
    case ClassifierKind::qda:
      state = bayes::fit_qda(data, spec);
      break;
    case ClassifierKind::knn:
      state = knn::fit(data, spec.count_param("k"));
      break;
    case ClassifierKind::decision_tree:
      state = ensemble::fit_decision_tree(data, spec);
      break;
    case ClassifierKind::random_forest:
      state = ensemble::fit_random_forest(data, spec, own);
      break;
    case ClassifierKind::adaboost_discrete:
      state = ensemble::fit_adaboost(data, spec, false);
      break;
    case ClassifierKind::adaboost_real:
      state = ensemble::fit_adaboost(data, spec, true);
      break;
    case ClassifierKind::gradient_boosting:
      state = ensemble::fit_gradient_boosting(data, spec);
      break;
  }
  return TrainedModel(spec, std::move(state), std::move(seen), data.dims());
}

namespace detail {

inline void check_dims(const TrainedModel& model, const Matrix& features) {
  if (features.cols() != model.dims()) {
    throw ContractError("predict: model trained on " + std::to_string(model.dims()) + " features, got " +
                        std::to_string(features.cols()));
  }
}

}  // namespace detail

inline std::vector<double> predict_scores(const TrainedModel& model, const Matrix& features) {
  if (model.spec().kind == ClassifierKind::dummy_majority) {
    throw CapabilityError("predict_scores: dummy_majority has no score");
  }
  detail::check_dims(model, features);
  std::vector<double> out(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) out[i] = model.raw_score(features.row(i));
  return out;
}

inline Labels predict(const TrainedModel& model, const Matrix& features) {
  detail::check_dims(model, features);
  const double cut = model.cut();
  Labels out(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) out[i] = model.raw_score(features.row(i)) > cut ? 1 : 0;
  return out;
}

}  // namespace fraudbench
