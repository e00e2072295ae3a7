#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fraudbench/classifiers/spec.hpp"
#include "fraudbench/classifiers/tree.hpp"
#include "fraudbench/dataset.hpp"
#include "fraudbench/random.hpp"

namespace fraudbench::ensemble {

inline std::vector<double> label_targets(const Labels& y) { return {y.begin(), y.end()}; }

// Single CART classification tree; score is the leaf's fraud fraction.
struct DecisionTree {
  tree::Tree tree;

  double score(std::span<const double> x) const noexcept { return tree.predict(x); }
};

inline DecisionTree fit_decision_tree(const Dataset& data, const ClassifierSpec& spec) {
  const auto pre = tree::presort(data.features);
  const auto y = label_targets(data.labels);
  const std::vector<double> w(data.size(), 1.0);
  tree::Options opt;
  opt.max_depth = spec.count_param("max_depth");
  opt.min_leaf = spec.count_param("min_leaf");
  return DecisionTree{tree::build(data.features, pre, y, w, opt)};
}

// Bootstrap forest; each tree votes fraud when its leaf fraction exceeds
// 0.5 and the score is the share of fraud votes.
struct RandomForest {
  std::vector<tree::Tree> trees;

  double score(std::span<const double> x) const noexcept {
    std::size_t votes = 0;
    for (const auto& t : trees) votes += t.predict(x) > 0.5 ? 1 : 0;
    return static_cast<double>(votes) / static_cast<double>(trees.size());
  }
};

inline RandomForest fit_random_forest(const Dataset& data, const ClassifierSpec& spec, const RandomSource& rng) {
  const std::size_t n = data.size(), d = data.dims();
  const auto pre = tree::presort(data.features);
  const auto y = label_targets(data.labels);
  tree::Options opt;
  opt.max_depth = spec.count_param("max_depth");
  opt.min_leaf = spec.count_param("min_leaf");
  opt.max_features = spec.count_param("max_features");
  if (opt.max_features == 0) {
    opt.max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));
  }

  RandomForest f;
  const std::size_t n_trees = spec.count_param("n_trees");
  f.trees.reserve(n_trees);
  std::vector<double> w(n);
  for (std::size_t t = 0; t < n_trees; ++t) {
    RandomSource tree_rng = derive_child(rng, "tree:" + std::to_string(t));
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) w[tree_rng.below(n)] += 1.0;
    f.trees.push_back(tree::build(data.features, pre, y, w, opt, &tree_rng));
  }
  return f;
}

// ---------------------------------------------------------------------------
// AdaBoost over depth-1 stumps.
//
// Discrete (SAMME, two classes): stump h_t in {-1,+1}, weighted error e_t,
// alpha_t = log((1 - e_t) / e_t), misclassified weights scale by
// exp(alpha_t). Score = sum alpha_t h_t / sum alpha_t, cut 0.
//
// Real (SAMME.R, two classes): stump leaf fraud fraction p (clipped away
// from 0 and 1), h_t = 0.5 log(p / (1 - p)), weights scale by
// exp(-y h_t(x)) with y in {-1,+1}. Score = sum h_t, cut 0.
//
// Both stop early when a stump's weighted error is 0 (the stump is kept)
// or >= 0.5 (the stump is dropped unless it is the first).

struct AdaBoost {
  std::vector<tree::Tree> stumps;
  std::vector<double> alphas;  // discrete only
  bool real = false;

  double stage_value(std::size_t t, std::span<const double> x) const noexcept {
    const double p = stumps[t].predict(x);
    if (real) {
      constexpr double eps = std::numeric_limits<double>::epsilon();
      const double pc = std::clamp(p, eps, 1.0 - eps);
      return 0.5 * std::log(pc / (1.0 - pc));
    }
    return p > 0.5 ? 1.0 : -1.0;
  }

  // Score using only the first `rounds` stages.
  double score_prefix(std::span<const double> x, std::size_t rounds) const noexcept {
    rounds = std::min(rounds, stumps.size());
    double s = 0.0, norm = 0.0;
    for (std::size_t t = 0; t < rounds; ++t) {
      if (real) {
        s += stage_value(t, x);
      } else {
        s += alphas[t] * stage_value(t, x);
        norm += alphas[t];
      }
    }
    return real || norm <= 0.0 ? s : s / norm;
  }

  double score(std::span<const double> x) const noexcept { return score_prefix(x, stumps.size()); }
};

inline AdaBoost fit_adaboost(const Dataset& data, const ClassifierSpec& spec, bool real) {
  const std::size_t n = data.size();
  const auto pre = tree::presort(data.features);
  const auto y = label_targets(data.labels);
  tree::Options opt;
  opt.max_depth = 1;
  opt.min_leaf = 1;

  AdaBoost model;
  model.real = real;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  const std::size_t rounds = spec.count_param("rounds");
  for (std::size_t r = 0; r < rounds; ++r) {
    tree::Tree stump = tree::build(data.features, pre, y, w, opt);
    double err = 0.0, total = 0.0;
    std::vector<double> leaf(n);
    for (std::size_t i = 0; i < n; ++i) {
      leaf[i] = stump.predict(data.features.row(i));
      const Label pred = leaf[i] > 0.5 ? 1 : 0;
      if (pred != data.labels[i]) err += w[i];
      total += w[i];
    }
    err /= total;

    if (err >= 0.5 && !model.stumps.empty()) break;
    model.stumps.push_back(std::move(stump));
    if (err <= 0.0) {
      if (!real) model.alphas.push_back(1.0);
      break;
    }
    if (err >= 0.5) {
      // first stump no better than chance: keep it as the whole model
      if (!real) model.alphas.push_back(1.0);
      break;
    }

    if (real) {
      for (std::size_t i = 0; i < n; ++i) {
        const double h = model.stage_value(model.stumps.size() - 1, data.features.row(i));
        w[i] *= std::exp(-(data.labels[i] ? 1.0 : -1.0) * h);
      }
    } else {
      const double alpha = std::log((1.0 - err) / err);
      model.alphas.push_back(alpha);
      for (std::size_t i = 0; i < n; ++i) {
        const Label pred = leaf[i] > 0.5 ? 1 : 0;
        if (pred != data.labels[i]) w[i] *= std::exp(alpha);
      }
    }
    double sum = 0.0;
    for (double v : w) sum += v;
    if (!(sum > 0.0) || !std::isfinite(sum)) break;
    for (double& v : w) v /= sum;
  }
  return model;
}

// ---------------------------------------------------------------------------
// Gradient boosting with logistic loss: F_0 = log-odds of the training
// prior; each stage fits a regression tree to the residuals y - sigmoid(F)
// and replaces its leaf values by the Newton step
// sum(residual) / sum(p (1 - p)). Score = sigmoid(F), cut 0.5.

struct GradientBoosting {
  double initial = 0.0;
  double learning_rate = 0.1;
  std::vector<tree::Tree> trees;

  double raw(std::span<const double> x) const noexcept {
    double f = initial;
    for (const auto& t : trees) f += learning_rate * t.predict(x);
    return f;
  }

  double score(std::span<const double> x) const noexcept { return 1.0 / (1.0 + std::exp(-raw(x))); }
};

inline GradientBoosting fit_gradient_boosting(const Dataset& data, const ClassifierSpec& spec) {
  const std::size_t n = data.size();
  const auto pre = tree::presort(data.features);
  const double prior = static_cast<double>(data.fraud_count()) / static_cast<double>(n);

  GradientBoosting model;
  model.initial = std::log(prior / (1.0 - prior));
  model.learning_rate = spec.param("learning_rate");
  tree::Options opt;
  opt.max_depth = spec.count_param("max_depth");
  opt.min_leaf = 1;

  std::vector<double> f(n, model.initial), residual(n), hess(n);
  const std::vector<double> w(n, 1.0);
  std::vector<std::size_t> leaf_of(n);
  const std::size_t stages = spec.count_param("stages");
  for (std::size_t s = 0; s < stages; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = 1.0 / (1.0 + std::exp(-f[i]));
      residual[i] = static_cast<double>(data.labels[i]) - p;
      hess[i] = p * (1.0 - p);
    }
    tree::Tree t = tree::build(data.features, pre, residual, w, opt);
    std::vector<double> num(t.nodes.size(), 0.0), den(t.nodes.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      leaf_of[i] = t.leaf_index(data.features.row(i));
      num[leaf_of[i]] += residual[i];
      den[leaf_of[i]] += hess[i];
    }
    for (std::size_t k = 0; k < t.nodes.size(); ++k) {
      if (t.nodes[k].feature < 0) t.nodes[k].value = std::abs(den[k]) < 1e-150 ? 0.0 : num[k] / den[k];
    }
    for (std::size_t i = 0; i < n; ++i) f[i] += model.learning_rate * t.nodes[leaf_of[i]].value;
    model.trees.push_back(std::move(t));
  }
  return model;
}

}  // namespace fraudbench::ensemble
