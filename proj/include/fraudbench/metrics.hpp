#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fraudbench/dataset.hpp"
#include "fraudbench/random.hpp"

namespace fraudbench {

// Fraud (label 1) is the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Every metric may be undefined (an empty optional) rather than silently 0.
struct MetricReport {
  std::optional<double> accuracy, precision, recall, specificity, f1, g_mean;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

inline ConfusionMatrix confusion(const Labels& y_true, const Labels& y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw ContractError("confusion: " + std::to_string(y_true.size()) + " truths vs " +
                        std::to_string(y_pred.size()) + " predictions");
  }
  if (y_true.empty()) throw ContractError("confusion: empty label vectors");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i]) {
      y_pred[i] ? ++cm.tp : ++cm.fn;
    } else {
      y_pred[i] ? ++cm.fp : ++cm.tn;
    }
  }
  return cm;
}

inline MetricReport score(const ConfusionMatrix& cm) {
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  MetricReport r;
  r.accuracy = ratio(cm.tp + cm.tn, cm.total());
  r.precision = ratio(cm.tp, cm.tp + cm.fp);
  r.recall = ratio(cm.tp, cm.tp + cm.fn);
  r.specificity = ratio(cm.tn, cm.tn + cm.fp);
  if (r.precision && r.recall && *r.precision + *r.recall > 0.0) {
    r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
  }
  if (r.recall && r.specificity) r.g_mean = std::sqrt(*r.recall * *r.specificity);
  return r;
}

inline double zero_one_error(const ConfusionMatrix& cm) {
  return static_cast<double>(cm.fp + cm.fn) / static_cast<double>(cm.total());
}

// ---------------------------------------------------------------------------
// Stratified shuffle split

struct Fold {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

struct SplitPlan {
  std::vector<Fold> folds;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

// Per-class test counts: each class gets floor(fraction * count) and the
// round(fraction * n) - sum(floors) leftover slots go to the largest
// fractional remainders (ties toward the lower class index). Every class
// therefore lands within one instance of fraction * count.
inline std::vector<std::size_t> apportion(const std::vector<std::size_t>& counts, double fraction) {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  const auto total = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<std::size_t> out(counts.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const double exact = fraction * static_cast<double>(counts[c]);
    out[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += out[c];
    rem.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total && i < rem.size(); ++i, ++assigned) ++out[rem[i].second];
  return out;
}

inline SplitPlan stratified_shuffle_split(const Labels& labels, double test_fraction, std::size_t n_folds,
                                          const RandomSource& rng) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ContractError("stratified_shuffle_split: test_fraction must lie in (0, 1)");
  }
  if (n_folds < 1) throw ContractError("stratified_shuffle_split: need at least one fold");
  std::vector<std::vector<std::size_t>> by_class(2);
  for (std::size_t i = 0; i < labels.size(); ++i) by_class.at(labels[i]).push_back(i);
  const std::vector<std::size_t> counts{by_class[0].size(), by_class[1].size()};
  const auto test_counts = apportion(counts, test_fraction);
  for (std::size_t c = 0; c < 2; ++c) {
    if (counts[c] < 2 || test_counts[c] == 0 || test_counts[c] == counts[c]) {
      throw ContractError("stratified_shuffle_split: class " + std::to_string(c) + " has " +
                          std::to_string(counts[c]) + " instances and would get " + std::to_string(test_counts[c]) +
                          " test instances; it must appear in both train and test");
    }
  }

  SplitPlan plan;
  plan.test_fraction = test_fraction;
  plan.seed = rng.seed();
  for (std::size_t f = 0; f < n_folds; ++f) {
    RandomSource fold_rng = derive_child(rng, "fold:" + std::to_string(f));
    Fold fold;
    for (std::size_t c = 0; c < 2; ++c) {
      auto members = by_class[c];
      fold_rng.shuffle(members);
      fold.test.insert(fold.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(test_counts[c]));
      fold.train.insert(fold.train.end(), members.begin() + static_cast<std::ptrdiff_t>(test_counts[c]), members.end());
    }
    std::sort(fold.train.begin(), fold.train.end());
    std::sort(fold.test.begin(), fold.test.end());
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

}  // namespace fraudbench
