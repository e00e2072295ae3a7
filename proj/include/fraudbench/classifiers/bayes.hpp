#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "fraudbench/classifiers/spec.hpp"
#include "fraudbench/dataset.hpp"
#include "fraudbench/matrix.hpp"

namespace fraudbench::bayes {

// Posterior P(fraud | x) from two class log-joint densities.
inline double posterior_from_log_joint(double log_joint_normal, double log_joint_fraud) noexcept {
  return 1.0 / (1.0 + std::exp(log_joint_normal - log_joint_fraud));
}

struct GaussianNb {
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> mean;
  std::array<std::vector<double>, 2> var;

  double log_joint(std::size_t c, std::span<const double> x) const noexcept {
    double s = log_prior[c];
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double diff = x[j] - mean[c][j];
      s -= 0.5 * std::log(2.0 * std::numbers::pi * var[c][j]) + diff * diff / (2.0 * var[c][j]);
    }
    return s;
  }

  double score(std::span<const double> x) const noexcept {
    return posterior_from_log_joint(log_joint(0, x), log_joint(1, x));
  }
};

// Per-class mean and population variance, variances floored by adding
// var_smoothing * (largest per-feature variance over all training data).
inline GaussianNb fit_gaussian_nb(const Dataset& data, const ClassifierSpec& spec) {
  const std::size_t n = data.size(), d = data.dims();
  GaussianNb m;
  std::array<std::size_t, 2> count{};
  for (std::size_t c = 0; c < 2; ++c) {
    m.mean[c].assign(d, 0.0);
    m.var[c].assign(d, 0.0);
  }
  std::vector<double> all_mean(d, 0.0), all_var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = data.labels[i];
    ++count[c];
    auto x = data.features.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      m.mean[c][j] += x[j];
      all_mean[j] += x[j];
    }
  }
  for (std::size_t j = 0; j < d; ++j) all_mean[j] /= static_cast<double>(n);
  for (std::size_t c = 0; c < 2; ++c)
    for (auto& v : m.mean[c]) v /= static_cast<double>(count[c]);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = data.labels[i];
    auto x = data.features.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double dc = x[j] - m.mean[c][j];
      const double da = x[j] - all_mean[j];
      m.var[c][j] += dc * dc;
      all_var[j] += da * da;
    }
  }
  double max_var = 0.0;
  for (auto v : all_var) max_var = std::max(max_var, v / static_cast<double>(n));
  double epsilon = spec.param("var_smoothing") * max_var;
  if (!(epsilon > 0.0)) epsilon = 1e-300;  // all features constant
  for (std::size_t c = 0; c < 2; ++c) {
    for (auto& v : m.var[c]) v = v / static_cast<double>(count[c]) + epsilon;
    m.log_prior[c] = std::log(static_cast<double>(count[c]) / static_cast<double>(n));
  }
  return m;
}

struct Qda {
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> mean;
  std::array<std::optional<Cholesky>, 2> chol;
  std::array<double, 2> log_det{};

  double log_joint(std::size_t c, std::span<const double> x) const {
    std::vector<double> z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) z[j] = x[j] - mean[c][j];
    chol[c]->solve_lower(z);
    return log_prior[c] - 0.5 * log_det[c] - 0.5 * dot(z, z);
  }

  double score(std::span<const double> x) const { return posterior_from_log_joint(log_joint(0, x), log_joint(1, x)); }
};

// Per-class covariance with the (n_c - 1) denominator, regularized by
// reg * trace / d on the diagonal. A class covariance that is still not
// positive definite raises NumericalError.
inline Qda fit_qda(const Dataset& data, const ClassifierSpec& spec) {
  const std::size_t n = data.size(), d = data.dims();
  Qda m;
  for (std::size_t c = 0; c < 2; ++c) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i)
      if (data.labels[i] == c) rows.push_back(i);
    if (rows.size() < 2) {
      throw NumericalError("qda: class " + std::to_string(c) + " has " + std::to_string(rows.size()) +
                           " instance(s); its covariance is singular");
    }
    m.mean[c].assign(d, 0.0);
    for (auto i : rows) {
      auto x = data.features.row(i);
      for (std::size_t j = 0; j < d; ++j) m.mean[c][j] += x[j];
    }
    for (auto& v : m.mean[c]) v /= static_cast<double>(rows.size());

    Matrix cov(d, d);
    std::vector<double> xc(d);
    for (auto i : rows) {
      auto x = data.features.row(i);
      for (std::size_t j = 0; j < d; ++j) xc[j] = x[j] - m.mean[c][j];
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k <= j; ++k) cov(j, k) += xc[j] * xc[k];
    }
    const double denom = static_cast<double>(rows.size() - 1);
    double trace = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k <= j; ++k) {
        cov(j, k) /= denom;
        cov(k, j) = cov(j, k);
      }
      trace += cov(j, j);
    }
    const double ridge = spec.param("reg") * trace / static_cast<double>(d);
    for (std::size_t j = 0; j < d; ++j) cov(j, j) += ridge;
    try {
      m.chol[c].emplace(std::move(cov));
    } catch (const NumericalError&) {
      throw NumericalError("qda: covariance of class " + std::to_string(c) +
                           " is singular after regularization (" + std::to_string(d) + " features, " +
                           std::to_string(rows.size()) + " instances)");
    }
    m.log_det[c] = m.chol[c]->log_determinant();
    m.log_prior[c] = std::log(static_cast<double>(rows.size()) / static_cast<double>(n));
  }
  return m;
}

}  // namespace fraudbench::bayes
