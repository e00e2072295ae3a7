#pragma once

/*
 CART builder shared by decision_tree, random_forest, both AdaBoost variants
 and gradient_boosting.

 Samples carry non-negative weights (bootstrap counts, boosting weights);
 weight-0 rows are ignored. Splits maximize
     sum over children of (sum w*y)^2 / (sum w),
 which is weighted variance reduction. For 0/1 targets this is the same
 ordering as weighted Gini decrease, so one criterion serves both the
 classification trees (leaf value = weighted fraud fraction) and the
 regression trees used by gradient boosting (leaf value = weighted mean).

 Columns are presorted once per training matrix. Each node owns a contiguous
 range of every per-feature order array and children are produced by stable
 partition, so a level costs O(n * d).

 Candidate thresholds are midpoints between consecutive distinct values;
 x <= threshold goes left. Features are scanned in ascending index and
 thresholds ascending, and only a strictly better score replaces the
 incumbent, so impurity ties resolve to the lowest (feature, threshold).
*/

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "fraudbench/matrix.hpp"
#include "fraudbench/random.hpp"

namespace fraudbench::tree {

struct Node {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct Tree {
  std::vector<Node> nodes;

  std::size_t leaf_index(std::span<const double> x) const noexcept {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
      const Node& nd = nodes[i];
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right);
    }
    return i;
  }

  double predict(std::span<const double> x) const noexcept { return nodes[leaf_index(x)].value; }

  std::size_t depth() const {
    std::size_t best = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
      auto [i, dep] = stack.back();
      stack.pop_back();
      best = std::max(best, dep);
      if (nodes[i].feature >= 0) {
        stack.emplace_back(static_cast<std::size_t>(nodes[i].left), dep + 1);
        stack.emplace_back(static_cast<std::size_t>(nodes[i].right), dep + 1);
      }
    }
    return best;
  }
};

struct Options {
  std::size_t max_depth = 10;  // 0 = unlimited
  std::size_t min_leaf = 1;
  std::size_t max_features = 0;  // 0 = all features
};

// Per-feature row orders, ascending by value (stable in row index).
struct Presorted {
  std::vector<std::vector<std::uint32_t>> order;
};

inline Presorted presort(const Matrix& x) {
  Presorted p;
  p.order.resize(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& o = p.order[f];
    o.resize(x.rows());
    std::iota(o.begin(), o.end(), std::uint32_t{0});
    std::stable_sort(o.begin(), o.end(), [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
  }
  return p;
}

namespace detail {

class Builder {
 public:
  Builder(const Matrix& x, const Presorted& pre, std::span<const double> target, std::span<const double> weight,
          const Options& opt, RandomSource* rng)
      : x_(x), target_(target), weight_(weight), opt_(opt), rng_(rng), goes_left_(x.rows(), 0) {
    const std::size_t d = x.cols();
    order_.resize(d);
    for (std::size_t f = 0; f < d; ++f) {
      order_[f].reserve(x.rows());
      for (auto i : pre.order[f])
        if (weight[i] > 0.0) order_[f].push_back(i);
    }
    scratch_.resize(order_.empty() ? 0 : order_[0].size());
    features_.resize(d);
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }

  Tree build() {
    Tree t;
    const std::size_t m = order_.empty() ? 0 : order_[0].size();
    grow(t, 0, m, 0);
    return t;
  }

 private:
  struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left_count = 0;
    double score = -std::numeric_limits<double>::infinity();
    bool found = false;
  };

  int grow(Tree& t, std::size_t begin, std::size_t end, std::size_t depth) {
    const int id = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();

    double w = 0.0, s = 0.0;
    const auto& rows = order_[0];
    bool pure = true;
    const double first = begin < end ? target_[rows[begin]] : 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const auto r = rows[i];
      w += weight_[r];
      s += weight_[r] * target_[r];
      if (target_[r] != first) pure = false;
    }
    t.nodes[static_cast<std::size_t>(id)].value = w > 0.0 ? s / w : 0.0;

    const std::size_t count = end - begin;
    const bool depth_ok = opt_.max_depth == 0 || depth < opt_.max_depth;
    if (pure || !depth_ok || count < 2 * opt_.min_leaf) return id;

    const Split best = find_split(begin, end, w, s);
    if (!best.found) return id;

    partition(begin, end, best);
    const std::size_t mid = begin + best.left_count;
    const int left = grow(t, begin, mid, depth + 1);
    const int right = grow(t, mid, end, depth + 1);
    Node& nd = t.nodes[static_cast<std::size_t>(id)];
    nd.feature = static_cast<int>(best.feature);
    nd.threshold = best.threshold;
    nd.left = left;
    nd.right = right;
    return id;
  }

  Split find_split(std::size_t begin, std::size_t end, double w_total, double s_total) {
    const std::size_t d = x_.cols();
    std::size_t n_try = d;
    if (opt_.max_features > 0 && opt_.max_features < d && rng_ != nullptr) {
      n_try = opt_.max_features;
      for (std::size_t i = 0; i < n_try; ++i) {
        const auto j = i + static_cast<std::size_t>(rng_->below(d - i));
        std::swap(features_[i], features_[j]);
      }
      std::sort(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(n_try));
    }

    Split best;
    const std::size_t count = end - begin;
    for (std::size_t fi = 0; fi < n_try; ++fi) {
      const std::size_t f = features_[fi];
      const auto& o = order_[f];
      double wl = 0.0, sl = 0.0;
      for (std::size_t i = begin; i + 1 < end; ++i) {
        const auto r = o[i];
        wl += weight_[r];
        sl += weight_[r] * target_[r];
        const std::size_t nl = i + 1 - begin;
        if (nl < opt_.min_leaf) continue;
        if (count - nl < opt_.min_leaf) break;
        const double a = x_(r, f);
        const double b = x_(o[i + 1], f);
        if (!(a < b)) continue;
        const double wr = w_total - wl;
        const double sr = s_total - sl;
        if (wl <= 0.0 || wr <= 0.0) continue;
        const double score = sl * sl / wl + sr * sr / wr;
        if (score > best.score) {
          double thr = a + (b - a) / 2.0;
          if (!(thr < b)) thr = a;
          best = Split{f, thr, nl, score, true};
        }
      }
    }
    if (n_try < d) {
      // every draw starts from the identity layout
      std::iota(features_.begin(), features_.end(), std::size_t{0});
    }
    return best;
  }

  void partition(std::size_t begin, std::size_t end, const Split& sp) {
    const auto& key = order_[sp.feature];
    for (std::size_t i = begin; i < end; ++i) goes_left_[key[i]] = x_(key[i], sp.feature) <= sp.threshold ? 1 : 0;
    for (auto& o : order_) {
      std::size_t l = begin, r = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const auto row = o[i];
        if (goes_left_[row]) {
          o[l++] = row;
        } else {
          scratch_[r++] = row;
        }
      }
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(r),
                o.begin() + static_cast<std::ptrdiff_t>(l));
    }
  }

  const Matrix& x_;
  std::span<const double> target_;
  std::span<const double> weight_;
  Options opt_;
  RandomSource* rng_;
  std::vector<std::vector<std::uint32_t>> order_;
  std::vector<std::uint32_t> scratch_;
  std::vector<std::uint8_t> goes_left_;
  std::vector<std::size_t> features_;
};

}  // namespace detail

// Builds one tree. rng is only consulted when opt.max_features subsamples
// the feature set at each node.
inline Tree build(const Matrix& x, const Presorted& pre, std::span<const double> target,
                  std::span<const double> weight, const Options& opt, RandomSource* rng = nullptr) {
  return detail::Builder(x, pre, target, weight, opt, rng).build();
}

}  // namespace fraudbench::tree
