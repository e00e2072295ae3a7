#pragma once

/*
 PCA obfuscation.

 fit_pca centers the features (no rescaling; standardize beforehand if
 wanted), takes the SVD of the centered matrix and keeps the top-k right
 singular vectors as component rows. Explained variance of component i is
 s_i^2 / (n - 1). Only the projections (X - center) * components^T are
 meant to leave the data owner; center and components stay private.
*/

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "fraudbench/dataset.hpp"
#include "fraudbench/matrix.hpp"

namespace fraudbench {

struct PcaModel {
  std::vector<double> center;
  Matrix components;  // k x d, orthonormal rows
  std::vector<double> explained_variance;
  double total_variance = 0.0;  // sum over all d components

  std::size_t k() const noexcept { return components.rows(); }
  std::size_t dims() const noexcept { return components.cols(); }

  // Cumulative share of the total variance held by the k kept components.
  double explained_variance_ratio() const noexcept {
    if (total_variance <= 0.0) return 1.0;
    return std::accumulate(explained_variance.begin(), explained_variance.end(), 0.0) / total_variance;
  }
};

inline PcaModel fit_pca(const Matrix& x, std::size_t k) {
  const std::size_t n = x.rows(), d = x.cols();
  if (n < 2) throw ContractError("fit_pca: need at least 2 rows, got " + std::to_string(n));
  if (k < 1 || k > d || k > n - 1) {
    throw ContractError("fit_pca: k=" + std::to_string(k) + " outside [1, min(n-1, d)] = [1, " +
                        std::to_string(std::min(n - 1, d)) + "]");
  }
  PcaModel m;
  m.center.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) m.center[j] += x(i, j);
  for (auto& c : m.center) c /= static_cast<double>(n);

  Matrix centered = x;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) centered(i, j) -= m.center[j];

  const SvdResult r = svd(centered);
  const double denom = static_cast<double>(n - 1);
  m.components = Matrix(k, d);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 0; j < d; ++j) m.components(c, j) = r.vt(c, j);
  for (std::size_t c = 0; c < r.s.size(); ++c) {
    const double ev = r.s[c] * r.s[c] / denom;
    m.total_variance += ev;
    if (c < k) m.explained_variance.push_back(ev);
  }
  return m;
}

inline PcaModel fit_pca(const Dataset& d, std::size_t k) { return fit_pca(d.features, k); }

inline Matrix project(const PcaModel& m, const Matrix& x) {
  if (x.cols() != m.dims()) {
    throw ContractError("pca transform: data has " + std::to_string(x.cols()) + " features, model expects " +
                        std::to_string(m.dims()));
  }
  const std::size_t k = m.k();
  Matrix out(x.rows(), k);
  std::vector<double> centered(x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) centered[j] = r[j] - m.center[j];
    for (std::size_t c = 0; c < k; ++c) out(i, c) = dot(centered, m.components.row(c));
  }
  return out;
}

// Projected dataset with features V1..Vk; labels carried through.
inline Dataset transform(const PcaModel& m, const Dataset& d) {
  Dataset out;
  out.features = project(m, d.features);
  out.labels = d.labels;
  out.feature_names = default_feature_names(m.k(), "V");
  out.label_name = d.label_name;
  out.provenance = d.provenance + "|pca:" + std::to_string(m.k());
  return out;
}

// Maps projections back to feature space: y * components + center.
// Exact only when k equals the original dimensionality.
inline Matrix inverse_transform(const PcaModel& m, const Matrix& y) {
  if (y.cols() != m.k()) throw ContractError("pca inverse_transform: dimension mismatch");
  Matrix out = multiply(y, m.components);
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += m.center[j];
  return out;
}

}  // namespace fraudbench
