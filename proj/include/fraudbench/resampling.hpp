#pragma once

/*
 Training-fold rebalancing.

 target_ratio is the desired minority/majority count ratio after
 resampling; the target count is round(target_ratio * majority) minority
 rows for oversamplers and round(minority / target_ratio) majority rows for
 undersamplers. When the ratio is already met the input is returned as is.

 Undersamplers keep row order. Oversamplers keep every original row in
 place and append the new minority rows.
*/

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "fraudbench/classifier.hpp"
#include "fraudbench/classifiers/knn.hpp"
#include "fraudbench/dataset.hpp"
#include "fraudbench/random.hpp"

namespace fraudbench {

enum class SamplerMethod { none, random_under, random_over, smote, adasyn, instance_hardness };

inline std::string_view to_string(SamplerMethod m) {
  switch (m) {
    case SamplerMethod::none: return "none";
    case SamplerMethod::random_under: return "random_under";
    case SamplerMethod::random_over: return "random_over";
    case SamplerMethod::smote: return "smote";
    case SamplerMethod::adasyn: return "adasyn";
    case SamplerMethod::instance_hardness: return "instance_hardness";
  }
  return "unknown";
}

inline SamplerMethod parse_sampler_method(std::string_view s) {
  for (auto m : {SamplerMethod::none, SamplerMethod::random_under, SamplerMethod::random_over, SamplerMethod::smote,
                 SamplerMethod::adasyn, SamplerMethod::instance_hardness})
    if (to_string(m) == s) return m;
  throw ContractError("unknown sampler method '" + std::string(s) + "'");
}

struct SamplerSpec {
  SamplerMethod method = SamplerMethod::none;
  double target_ratio = 1.0;
  std::size_t k_neighbors = 5;
  std::size_t estimator_folds = 3;

  void validate() const {
    if (!(target_ratio > 0.0 && target_ratio <= 1.0)) throw ContractError("sampler: target_ratio must lie in (0, 1]");
    if (k_neighbors < 1) throw ContractError("sampler: k_neighbors must be >= 1");
    if (estimator_folds < 2) throw ContractError("sampler: estimator_folds must be >= 2");
  }

  // Report identifier; only the parameters the method uses are shown.
  std::string label() const {
    std::string out(to_string(method));
    char ratio[32];
    std::snprintf(ratio, sizeof ratio, "%.10g", target_ratio);
    switch (method) {
      case SamplerMethod::none:
        return out;
      case SamplerMethod::random_under:
      case SamplerMethod::random_over:
        return out + "[ratio=" + ratio + "]";
      case SamplerMethod::smote:
      case SamplerMethod::adasyn:
        return out + "[k=" + std::to_string(k_neighbors) + ";ratio=" + ratio + "]";
      case SamplerMethod::instance_hardness:
        return out + "[folds=" + std::to_string(estimator_folds) + ";ratio=" + ratio + "]";
    }
    return out;
  }
};

namespace resample_detail {

struct ClassSplit {
  Label minority = 1;
  std::vector<std::size_t> minority_rows;
  std::vector<std::size_t> majority_rows;
};

inline ClassSplit split_classes(const Dataset& d) {
  std::vector<std::size_t> rows[2];
  for (std::size_t i = 0; i < d.size(); ++i) rows[d.labels[i]].push_back(i);
  ClassSplit s;
  // equal counts: fraud is treated as the minority
  s.minority = rows[1].size() <= rows[0].size() ? 1 : 0;
  s.minority_rows = std::move(rows[s.minority]);
  s.majority_rows = std::move(rows[1 - s.minority]);
  return s;
}

inline std::size_t oversample_target(double ratio, std::size_t majority) {
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(majority)));
}

inline std::size_t undersample_target(double ratio, std::size_t minority, std::size_t majority) {
  const auto keep = static_cast<std::size_t>(std::llround(static_cast<double>(minority) / ratio));
  return std::clamp(keep, minority, majority);
}

inline Dataset keep_rows(const Dataset& d, std::vector<std::size_t> rows, std::string_view tag) {
  std::sort(rows.begin(), rows.end());
  Dataset out = d.subset(rows);
  out.provenance = d.provenance + "|" + std::string(tag);
  return out;
}

inline Dataset append_rows(const Dataset& d, const std::vector<double>& values, std::size_t count, Label label,
                           std::string_view tag) {
  std::vector<double> all = d.features.values();
  all.insert(all.end(), values.begin(), values.end());
  Dataset out;
  out.features = Matrix(d.size() + count, d.dims(), std::move(all));
  out.labels = d.labels;
  out.labels.insert(out.labels.end(), count, label);
  out.feature_names = d.feature_names;
  out.label_name = d.label_name;
  out.provenance = d.provenance + "|" + std::string(tag);
  return out;
}

// k nearest minority neighbours of every minority row (indices into `rows`).
inline std::vector<std::vector<std::size_t>> minority_neighbours(const Dataset& d, const std::vector<std::size_t>& rows,
                                                                 std::size_t k) {
  const Matrix pts = d.features.select_rows(rows);
  std::vector<std::vector<std::size_t>> nn(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) nn[i] = knn::nearest(pts, pts.row(i), k, i);
  return nn;
}

inline void interpolate(const Dataset& d, std::size_t base, std::size_t neighbour, double u, std::vector<double>& out) {
  auto a = d.features.row(base);
  auto b = d.features.row(neighbour);
  for (std::size_t j = 0; j < a.size(); ++j) out.push_back(a[j] + u * (b[j] - a[j]));
}

// Largest-remainder apportionment of `total` by `weights`; remainder ties go
// to the lower index.
inline std::vector<std::size_t> largest_remainder(std::size_t total, const std::vector<double>& weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> out(weights.size(), 0);
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    out[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += out[i];
    rem.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total && i < rem.size(); ++i) {
    if (weights[rem[i].second] <= 0.0) continue;
    ++out[rem[i].second];
    ++assigned;
  }
  return out;
}

}  // namespace resample_detail

// Per-instance synthetic counts ADASYN assigns to the minority rows: total
// `total`, proportional to the share of majority rows among each minority
// row's k nearest neighbours in the full training set.
inline std::vector<std::size_t> adasyn_allocation(const Dataset& d, const std::vector<std::size_t>& minority_rows,
                                                  std::size_t k, std::size_t total) {
  std::vector<double> hardness(minority_rows.size());
  const Label minority = d.labels[minority_rows.front()];
  for (std::size_t i = 0; i < minority_rows.size(); ++i) {
    const auto nn = knn::nearest(d.features, d.features.row(minority_rows[i]), k, minority_rows[i]);
    std::size_t majority = 0;
    for (auto j : nn) majority += d.labels[j] != minority ? 1 : 0;
    hardness[i] = static_cast<double>(majority) / static_cast<double>(k);
  }
  if (std::accumulate(hardness.begin(), hardness.end(), 0.0) <= 0.0) {
    throw ContractError("adasyn: no minority instance has a majority neighbour among its " + std::to_string(k) +
                        " nearest neighbours");
  }
  return resample_detail::largest_remainder(total, hardness);
}

// Out-of-fold probability that each row belongs to its own class, from a
// random forest trained on the other folds (stratified k-fold).
inline std::vector<double> instance_hardness_probabilities(const Dataset& d, std::size_t folds, const RandomSource& rng) {
  std::vector<std::size_t> fold_of(d.size());
  RandomSource assign_rng = derive_child(rng, "iht:folds");
  for (Label c : {Label{0}, Label{1}}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d.labels[i] == c) rows.push_back(i);
    assign_rng.shuffle(rows);
    for (std::size_t i = 0; i < rows.size(); ++i) fold_of[rows[i]] = i % folds;
  }
  const auto spec = make_classifier_spec(ClassifierKind::random_forest, {{"n_trees", 50}}, "iht-forest");
  std::vector<double> own_prob(d.size(), 0.0);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train_rows, held_out;
    for (std::size_t i = 0; i < d.size(); ++i) (fold_of[i] == f ? held_out : train_rows).push_back(i);
    if (held_out.empty() || train_rows.empty()) continue;
    const Dataset train_part = d.subset(train_rows);
    const TrainedModel model = train(spec, train_part, derive_child(rng, "iht:fold:" + std::to_string(f)));
    for (auto i : held_out) {
      const double p_fraud = model.raw_score(d.features.row(i));
      own_prob[i] = d.labels[i] ? p_fraud : 1.0 - p_fraud;
    }
  }
  return own_prob;
}

inline Dataset resample(const SamplerSpec& spec, const Dataset& train_set, const RandomSource& rng) {
  using namespace resample_detail;
  spec.validate();
  if (spec.method == SamplerMethod::none) return train_set;

  ClassSplit cs = split_classes(train_set);
  const std::size_t n_min = cs.minority_rows.size(), n_maj = cs.majority_rows.size();
  if (n_min == 0) throw ContractError("resample: training data has no minority instance");
  RandomSource own = derive_child(rng, std::string("resample:") + std::string(to_string(spec.method)));

  switch (spec.method) {
    case SamplerMethod::none:
      return train_set;

    case SamplerMethod::random_under: {
      const std::size_t keep = undersample_target(spec.target_ratio, n_min, n_maj);
      if (keep >= n_maj) return train_set;
      auto& maj = cs.majority_rows;
      for (std::size_t i = 0; i < keep; ++i) std::swap(maj[i], maj[i + own.below(maj.size() - i)]);
      maj.resize(keep);
      maj.insert(maj.end(), cs.minority_rows.begin(), cs.minority_rows.end());
      return keep_rows(train_set, std::move(maj), spec.label());
    }

    case SamplerMethod::random_over: {
      const std::size_t target = oversample_target(spec.target_ratio, n_maj);
      if (target <= n_min) return train_set;
      const std::size_t extra = target - n_min;
      std::vector<double> values;
      values.reserve(extra * train_set.dims());
      for (std::size_t s = 0; s < extra; ++s) {
        auto r = train_set.features.row(cs.minority_rows[own.below(n_min)]);
        values.insert(values.end(), r.begin(), r.end());
      }
      return append_rows(train_set, values, extra, cs.minority, spec.label());
    }

    case SamplerMethod::smote:
    case SamplerMethod::adasyn: {
      const std::size_t target = oversample_target(spec.target_ratio, n_maj);
      if (target <= n_min) return train_set;
      const std::size_t k = spec.k_neighbors;
      if (n_min < k + 1) {
        throw ContractError(std::string(to_string(spec.method)) + ": " + std::to_string(n_min) +
                            " minority instances, need at least k_neighbors + 1 = " + std::to_string(k + 1));
      }
      const std::size_t extra = target - n_min;
      const auto nn = minority_neighbours(train_set, cs.minority_rows, k);
      std::vector<double> values;
      values.reserve(extra * train_set.dims());
      auto synthesize = [&](std::size_t i) {
        const std::size_t j = nn[i][own.below(nn[i].size())];
        const double u = own.uniform();
        interpolate(train_set, cs.minority_rows[i], cs.minority_rows[j], u, values);
      };
      if (spec.method == SamplerMethod::smote) {
        for (std::size_t s = 0; s < extra; ++s) synthesize(own.below(n_min));
      } else {
        const auto alloc = adasyn_allocation(train_set, cs.minority_rows, k, extra);
        for (std::size_t i = 0; i < n_min; ++i)
          for (std::size_t s = 0; s < alloc[i]; ++s) synthesize(i);
      }
      return append_rows(train_set, values, extra, cs.minority, spec.label());
    }

    case SamplerMethod::instance_hardness: {
      const std::size_t keep = undersample_target(spec.target_ratio, n_min, n_maj);
      if (keep >= n_maj) return train_set;
      if (n_min < spec.estimator_folds) {
        throw ContractError("instance_hardness: " + std::to_string(n_min) + " minority instances, need at least " +
                            std::to_string(spec.estimator_folds) + " (one per estimator fold)");
      }
      const auto prob = instance_hardness_probabilities(train_set, spec.estimator_folds, own);
      auto maj = cs.majority_rows;
      // hardest first; equal probabilities drop the lower row index first
      std::stable_sort(maj.begin(), maj.end(), [&](std::size_t a, std::size_t b) { return prob[a] < prob[b]; });
      std::vector<std::size_t> rows(maj.begin() + static_cast<std::ptrdiff_t>(n_maj - keep), maj.end());
      rows.insert(rows.end(), cs.minority_rows.begin(), cs.minority_rows.end());
      return keep_rows(train_set, std::move(rows), spec.label());
    }
  }
  return train_set;
}

}  // namespace fraudbench
