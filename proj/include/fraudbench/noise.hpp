#pragma once

/*
 Annotation-noise model.

 Human annotation errors are modelled as independent label flips: each
 fraud label becomes normal with probability flip_fraud_to_normal and each
 normal label becomes fraud with probability flip_normal_to_fraud.

 Given clean truth y, (possibly noisy) annotations y_h and predictions y_m,
 the model error scores y_m against y_h and the real error scores y_m
 against y.
*/

#include <cstddef>
#include <string>
#include <utility>

#include "fraudbench/dataset.hpp"
#include "fraudbench/metrics.hpp"
#include "fraudbench/random.hpp"

namespace fraudbench {

struct NoiseSpec {
  double flip_fraud_to_normal = 0.0;
  double flip_normal_to_fraud = 0.0;

  void validate() const {
    auto ok = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!ok(flip_fraud_to_normal) || !ok(flip_normal_to_fraud)) {
      throw ContractError("noise: flip rates must lie in [0, 1]");
    }
  }

  bool is_zero() const noexcept { return flip_fraud_to_normal == 0.0 && flip_normal_to_fraud == 0.0; }
};

struct FlipCounts {
  std::size_t fraud_to_normal = 0;
  std::size_t normal_to_fraud = 0;

  friend bool operator==(const FlipCounts&, const FlipCounts&) = default;
};

struct NoisyLabels {
  Labels labels;
  FlipCounts flips;
};

inline NoisyLabels inject_noise(const Labels& labels, const NoiseSpec& spec, RandomSource& rng) {
  spec.validate();
  NoisyLabels out{labels, {}};
  for (auto& y : out.labels) {
    // one draw per label keeps the stream aligned with the label index
    const double u = rng.uniform();
    if (y == 1 && u < spec.flip_fraud_to_normal) {
      y = 0;
      ++out.flips.fraud_to_normal;
    } else if (y == 0 && u < spec.flip_normal_to_fraud) {
      y = 1;
      ++out.flips.normal_to_fraud;
    }
  }
  return out;
}

struct ErrorDecomposition {
  MetricReport model_error;  // predictions vs annotations
  MetricReport real_error;   // predictions vs ground truth
  ConfusionMatrix model_confusion;
  ConfusionMatrix real_confusion;
  FlipCounts noise_applied;
};

inline ErrorDecomposition decompose_error(const Labels& y_true, const Labels& y_noisy, const Labels& y_pred) {
  if (y_true.size() != y_noisy.size() || y_true.size() != y_pred.size()) {
    throw ContractError("decompose_error: label vectors differ in length (" + std::to_string(y_true.size()) + ", " +
                        std::to_string(y_noisy.size()) + ", " + std::to_string(y_pred.size()) + ")");
  }
  ErrorDecomposition e;
  e.model_confusion = confusion(y_noisy, y_pred);
  e.real_confusion = confusion(y_true, y_pred);
  e.model_error = score(e.model_confusion);
  e.real_error = score(e.real_confusion);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 1 && y_noisy[i] == 0) ++e.noise_applied.fraud_to_normal;
    if (y_true[i] == 0 && y_noisy[i] == 1) ++e.noise_applied.normal_to_fraud;
  }
  return e;
}

// Expected 0/1 error against labels flipped symmetrically at rate eps,
// independently of the predictions, given the real 0/1 error.
inline double expected_noisy_error(double real_error, double eps) noexcept {
  return (1.0 - eps) * real_error + eps * (1.0 - real_error);
}

}  // namespace fraudbench
