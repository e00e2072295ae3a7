#pragma once

#include <algorithm>
#include <span>
#include <utility>
#include <vector>

#include "fraudbench/dataset.hpp"
#include "fraudbench/matrix.hpp"

namespace fraudbench::knn {

// Indices of the k nearest training rows to `query` under Euclidean
// distance; equal distances resolve to the lower row index. Sorted nearest
// first. `skip` excludes one row (leave-one-out neighbourhoods).
inline std::vector<std::size_t> nearest(const Matrix& train, std::span<const double> query, std::size_t k,
                                        std::size_t skip = static_cast<std::size_t>(-1)) {
  using Entry = std::pair<double, std::size_t>;
  std::vector<Entry> best;  // sorted ascending, size <= k
  best.reserve(k + 1);
  for (std::size_t i = 0; i < train.rows(); ++i) {
    if (i == skip) continue;
    const double d2 = squared_distance(query, train.row(i));
    if (best.size() == k && !(Entry{d2, i} < best.back())) continue;
    auto pos = std::upper_bound(best.begin(), best.end(), Entry{d2, i});
    best.insert(pos, Entry{d2, i});
    if (best.size() > k) best.pop_back();
  }
  std::vector<std::size_t> out;
  out.reserve(best.size());
  for (const auto& e : best) out.push_back(e.second);
  return out;
}

struct Model {
  Matrix train;
  Labels labels;
  std::size_t k = 5;

  // Fraction of fraud labels among the k neighbours. A vote tie maps to
  // exactly 0.5, which sits on the cut and predicts the lower label.
  double score(std::span<const double> x) const {
    const auto nn = nearest(train, x, k);
    std::size_t frauds = 0;
    for (auto i : nn) frauds += labels[i];
    return static_cast<double>(frauds) / static_cast<double>(nn.size());
  }
};

inline Model fit(const Dataset& data, std::size_t k) {
  return Model{data.features, data.labels, std::min(k, data.size())};
}

}  // namespace fraudbench::knn
