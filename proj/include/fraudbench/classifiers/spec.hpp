#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "fraudbench/dataset.hpp"
#include "fraudbench/errors.hpp"

namespace fraudbench {

enum class ClassifierKind {
  dummy_majority,
  logistic_regression,
  ridge,
  perceptron,
  passive_aggressive,
  sgd_hinge,
  gaussian_nb,
  qda,
  knn,
  decision_tree,
  random_forest,
  adaboost_discrete,
  adaboost_real,
  gradient_boosting,
};

inline constexpr std::array<std::pair<ClassifierKind, std::string_view>, 14> kClassifierNames{{
    {ClassifierKind::dummy_majority, "dummy_majority"},
    {ClassifierKind::logistic_regression, "logistic_regression"},
    {ClassifierKind::ridge, "ridge"},
    {ClassifierKind::perceptron, "perceptron"},
    {ClassifierKind::passive_aggressive, "passive_aggressive"},
    {ClassifierKind::sgd_hinge, "sgd_hinge"},
    {ClassifierKind::gaussian_nb, "gaussian_nb"},
    {ClassifierKind::qda, "qda"},
    {ClassifierKind::knn, "knn"},
    {ClassifierKind::decision_tree, "decision_tree"},
    {ClassifierKind::random_forest, "random_forest"},
    {ClassifierKind::adaboost_discrete, "adaboost_discrete"},
    {ClassifierKind::adaboost_real, "adaboost_real"},
    {ClassifierKind::gradient_boosting, "gradient_boosting"},
}};

inline std::string_view to_string(ClassifierKind k) {
  for (const auto& [kind, name] : kClassifierNames)
    if (kind == k) return name;
  return "unknown";
}

inline ClassifierKind parse_classifier_kind(std::string_view name) {
  for (const auto& [kind, n] : kClassifierNames)
    if (n == name) return kind;
  throw ContractError("unknown classifier kind '" + std::string(name) + "'");
}

using Hyperparameters = std::map<std::string, double>;

// Defaults for every hyperparameter a kind accepts. A key absent here is
// rejected by make_classifier_spec.
//
//   logistic_regression  l2=1e-4 (penalty), max_iter=500, tol=1e-6 (gradient norm)
//   ridge                alpha=1
//   perceptron           epochs=50, eta=1
//   passive_aggressive   epochs=50, C=1 (PA-I aggressiveness cap)
//   sgd_hinge            epochs=50, eta0=0.01 (decays as eta0/sqrt(t)), alpha=1e-4 (L2)
//   gaussian_nb          var_smoothing=1e-9 (times the largest feature variance)
//   qda                  reg=1e-6 (times trace/d, added to each class covariance diagonal)
//   knn                  k=5
//   decision_tree        max_depth=10, min_leaf=1
//   random_forest        n_trees=100, max_depth=0 (unlimited), min_leaf=1, max_features=0 (floor(sqrt(d)))
//   adaboost_*           rounds=50
//   gradient_boosting    stages=100, learning_rate=0.1, max_depth=3
inline const Hyperparameters& default_hyperparameters(ClassifierKind k) {
  static const std::map<ClassifierKind, Hyperparameters> table{
      {ClassifierKind::dummy_majority, {}},
      {ClassifierKind::logistic_regression, {{"l2", 1e-4}, {"max_iter", 500}, {"tol", 1e-6}}},
      {ClassifierKind::ridge, {{"alpha", 1.0}}},
      {ClassifierKind::perceptron, {{"epochs", 50}, {"eta", 1.0}}},
      {ClassifierKind::passive_aggressive, {{"epochs", 50}, {"C", 1.0}}},
      {ClassifierKind::sgd_hinge, {{"epochs", 50}, {"eta0", 0.01}, {"alpha", 1e-4}}},
      {ClassifierKind::gaussian_nb, {{"var_smoothing", 1e-9}}},
      {ClassifierKind::qda, {{"reg", 1e-6}}},
      {ClassifierKind::knn, {{"k", 5}}},
      {ClassifierKind::decision_tree, {{"max_depth", 10}, {"min_leaf", 1}}},
      {ClassifierKind::random_forest, {{"n_trees", 100}, {"max_depth", 0}, {"min_leaf", 1}, {"max_features", 0}}},
      {ClassifierKind::adaboost_discrete, {{"rounds", 50}}},
      {ClassifierKind::adaboost_real, {{"rounds", 50}}},
      {ClassifierKind::gradient_boosting, {{"stages", 100}, {"learning_rate", 0.1}, {"max_depth", 3}}},
  };
  return table.at(k);
}

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::dummy_majority;
  Hyperparameters hyperparameters;  // fully populated: defaults merged with overrides
  std::string seed_label;

  double param(const std::string& key) const { return hyperparameters.at(key); }

  std::size_t count_param(const std::string& key) const {
    return static_cast<std::size_t>(std::llround(hyperparameters.at(key)));
  }

  // Report identifier, e.g. "knn[k=5]". sgd_hinge is tagged as the linear SVC stand-in.
  std::string label() const {
    std::string out(to_string(kind));
    if (kind == ClassifierKind::sgd_hinge) out += "(svc_linear)";
    if (hyperparameters.empty()) return out;
    out += '[';
    bool first = true;
    for (const auto& [key, value] : hyperparameters) {
      if (!first) out += ';';
      first = false;
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.10g", value);
      out += key + "=" + buf;
    }
    out += ']';
    return out;
  }
};

namespace detail {

inline void require_count(const Hyperparameters& h, const std::string& key, double min) {
  const double v = h.at(key);
  if (v != std::floor(v) || v < min) {
    throw ContractError("hyperparameter '" + key + "' must be an integer >= " + format_double(min));
  }
}

inline void require_positive(const Hyperparameters& h, const std::string& key, bool allow_zero = false) {
  const double v = h.at(key);
  if (!std::isfinite(v) || v < 0.0 || (!allow_zero && v == 0.0)) {
    throw ContractError("hyperparameter '" + key + "' must be " + (allow_zero ? "non-negative" : "positive"));
  }
}

}  // namespace detail

inline ClassifierSpec make_classifier_spec(ClassifierKind kind, const Hyperparameters& overrides = {},
                                           std::string seed_label = {}) {
  ClassifierSpec spec;
  spec.kind = kind;
  spec.hyperparameters = default_hyperparameters(kind);
  for (const auto& [key, value] : overrides) {
    auto it = spec.hyperparameters.find(key);
    if (it == spec.hyperparameters.end()) {
      throw ContractError("classifier '" + std::string(to_string(kind)) + "' has no hyperparameter '" + key + "'");
    }
    it->second = value;
  }
  spec.seed_label = seed_label.empty() ? std::string(to_string(kind)) : std::move(seed_label);

  const auto& h = spec.hyperparameters;
  using namespace detail;
  switch (kind) {
    case ClassifierKind::dummy_majority:
      break;
    case ClassifierKind::logistic_regression:
      require_positive(h, "l2", true);
      require_count(h, "max_iter", 1);
      require_positive(h, "tol", true);
      break;
    case ClassifierKind::ridge:
      require_positive(h, "alpha");
      break;
    case ClassifierKind::perceptron:
      require_count(h, "epochs", 1);
      require_positive(h, "eta");
      break;
    case ClassifierKind::passive_aggressive:
      require_count(h, "epochs", 1);
      require_positive(h, "C");
      break;
    case ClassifierKind::sgd_hinge:
      require_count(h, "epochs", 1);
      require_positive(h, "eta0");
      require_positive(h, "alpha", true);
      break;
    case ClassifierKind::gaussian_nb:
      require_positive(h, "var_smoothing", true);
      break;
    case ClassifierKind::qda:
      require_positive(h, "reg", true);
      break;
    case ClassifierKind::knn:
      require_count(h, "k", 1);
      break;
    case ClassifierKind::decision_tree:
      require_count(h, "max_depth", 1);
      require_count(h, "min_leaf", 1);
      break;
    case ClassifierKind::random_forest:
      require_count(h, "n_trees", 1);
      require_count(h, "max_depth", 0);
      require_count(h, "min_leaf", 1);
      require_count(h, "max_features", 0);
      break;
    case ClassifierKind::adaboost_discrete:
    case ClassifierKind::adaboost_real:
      require_count(h, "rounds", 1);
      break;
    case ClassifierKind::gradient_boosting:
      require_count(h, "stages", 1);
      require_positive(h, "learning_rate");
      require_count(h, "max_depth", 1);
      break;
  }
  return spec;
}

inline ClassifierSpec make_classifier_spec(std::string_view kind_name, const Hyperparameters& overrides = {}) {
  return make_classifier_spec(parse_classifier_kind(kind_name), overrides);
}

}  // namespace fraudbench
