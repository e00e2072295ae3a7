#pragma once

#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "fraudbench/classifiers/spec.hpp"
#include "fraudbench/dataset.hpp"
#include "fraudbench/matrix.hpp"
#include "fraudbench/random.hpp"

namespace fraudbench::linear {

// w . x + b, reported either as a probability (logistic link, cut 0.5) or
// as the raw margin (cut 0).
struct Model {
  std::vector<double> weights;
  double intercept = 0.0;
  bool logistic = false;

  double margin(std::span<const double> x) const noexcept { return dot(weights, x) + intercept; }

  double score(std::span<const double> x) const noexcept {
    const double z = margin(x);
    return logistic ? 1.0 / (1.0 + std::exp(-z)) : z;
  }

  double cut() const noexcept { return logistic ? 0.5 : 0.0; }
};

inline double signed_label(Label y) noexcept { return y ? 1.0 : -1.0; }

// log(1 + exp(-t)) without overflow
inline double log1p_exp_neg(double t) noexcept {
  return t > 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
}

// L2-penalized logistic regression, full-batch gradient descent with
// Armijo backtracking. Loss = mean log-loss + l2/2 * |w|^2 (intercept
// unpenalized). Stops after max_iter steps or when |grad| < tol.
inline Model fit_logistic(const Dataset& data, const ClassifierSpec& spec) {
  const double l2 = spec.param("l2");
  const std::size_t max_iter = spec.count_param("max_iter");
  const double tol = spec.param("tol");
  const std::size_t n = data.size(), d = data.dims();
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> w(d, 0.0), grad(d), trial(d);
  double b = 0.0;

  auto loss_at = [&](const std::vector<double>& wv, double bv) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      s += log1p_exp_neg(signed_label(data.labels[i]) * (dot(wv, data.features.row(i)) + bv));
    return s * inv_n + 0.5 * l2 * dot(wv, wv);
  };

  double loss = loss_at(w, b);
  double step = 1.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = signed_label(data.labels[i]);
      auto x = data.features.row(i);
      const double t = y * (dot(w, x) + b);
      // d/dz log(1+exp(-y z)) = -y * sigmoid(-y z)
      const double g = -y / (1.0 + std::exp(t));
      for (std::size_t j = 0; j < d; ++j) grad[j] += g * x[j];
      gb += g;
    }
    for (std::size_t j = 0; j < d; ++j) grad[j] = grad[j] * inv_n + l2 * w[j];
    gb *= inv_n;
    const double gnorm2 = dot(grad, grad) + gb * gb;
    if (std::sqrt(gnorm2) < tol) break;

    step *= 2.0;
    double next_loss = 0.0;
    while (true) {
      for (std::size_t j = 0; j < d; ++j) trial[j] = w[j] - step * grad[j];
      const double tb = b - step * gb;
      next_loss = loss_at(trial, tb);
      if (next_loss <= loss - 0.5 * step * gnorm2 || step < 1e-20) {
        w.swap(trial);
        b = tb;
        break;
      }
      step *= 0.5;
    }
    loss = next_loss;
  }
  return Model{std::move(w), b, true};
}

// Ridge classifier: least squares on +-1 targets with penalty alpha on the
// weights; the intercept comes from centering.
inline Model fit_ridge(const Dataset& data, const ClassifierSpec& spec) {
  const double alpha = spec.param("alpha");
  const std::size_t n = data.size(), d = data.dims();
  std::vector<double> xmean(d, 0.0);
  double ymean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto x = data.features.row(i);
    for (std::size_t j = 0; j < d; ++j) xmean[j] += x[j];
    ymean += signed_label(data.labels[i]);
  }
  for (auto& v : xmean) v /= static_cast<double>(n);
  ymean /= static_cast<double>(n);

  Matrix gram(d, d);
  std::vector<double> rhs(d, 0.0), xc(d);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = data.features.row(i);
    for (std::size_t j = 0; j < d; ++j) xc[j] = x[j] - xmean[j];
    const double yc = signed_label(data.labels[i]) - ymean;
    for (std::size_t j = 0; j < d; ++j) {
      rhs[j] += xc[j] * yc;
      for (std::size_t k = 0; k <= j; ++k) gram(j, k) += xc[j] * xc[k];
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    gram(j, j) += alpha;
    for (std::size_t k = 0; k < j; ++k) gram(k, j) = gram(j, k);
  }
  auto w = Cholesky(std::move(gram)).solve(std::move(rhs));
  const double b = ymean - dot(w, xmean);
  return Model{std::move(w), b, false};
}

enum class OnlineRule { perceptron, passive_aggressive, sgd_hinge };

// Online linear learners: one pass per epoch over a freshly shuffled order.
//   perceptron          update w += eta*y*x when y*z <= 0
//   passive_aggressive  PA-I: tau = min(C, hinge / (|x|^2 + 1)), w += tau*y*x
//   sgd_hinge           w *= (1 - eta_t*alpha); if y*z < 1: w += eta_t*y*x,
//                       eta_t = eta0 / sqrt(t)
inline Model fit_online(const Dataset& data, const ClassifierSpec& spec, OnlineRule rule, RandomSource& rng) {
  const std::size_t n = data.size(), d = data.dims();
  const std::size_t epochs = spec.count_param("epochs");
  std::vector<double> w(d, 0.0);
  double b = 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t t = 0;

  for (std::size_t e = 0; e < epochs; ++e) {
    rng.shuffle(order);
    for (auto i : order) {
      auto x = data.features.row(i);
      const double y = signed_label(data.labels[i]);
      const double yz = y * (dot(w, x) + b);
      switch (rule) {
        case OnlineRule::perceptron: {
          if (yz <= 0.0) {
            const double eta = spec.param("eta");
            for (std::size_t j = 0; j < d; ++j) w[j] += eta * y * x[j];
            b += eta * y;
          }
          break;
        }
        case OnlineRule::passive_aggressive: {
          const double loss = 1.0 - yz;
          if (loss > 0.0) {
            const double tau = std::min(spec.param("C"), loss / (dot(x, x) + 1.0));
            for (std::size_t j = 0; j < d; ++j) w[j] += tau * y * x[j];
            b += tau * y;
          }
          break;
        }
        case OnlineRule::sgd_hinge: {
          ++t;
          const double eta = spec.param("eta0") / std::sqrt(static_cast<double>(t));
          const double shrink = 1.0 - eta * spec.param("alpha");
          for (auto& wj : w) wj *= shrink;
          if (yz < 1.0) {
            for (std::size_t j = 0; j < d; ++j) w[j] += eta * y * x[j];
            b += eta * y;
          }
          break;
        }
      }
    }
  }
  return Model{std::move(w), b, false};
}

}  // namespace fraudbench::linear
