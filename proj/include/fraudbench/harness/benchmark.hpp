#pragma once

/*
 Grid runner.

 For each fraud-rate condition the dataset is split once into stratified
 folds; every grid cell of a fold sees the same train/test indices. Per
 fold and representation the standardization and PCA are fit on the
 training rows only and applied to both sides. Annotation noise is drawn
 once per fold (so all cells of a fold share it), on the training labels
 before resampling and/or on a copy of the test labels; the clean test
 truth is kept alongside. Samplers touch the training rows only.

 Random streams, all children of RandomSource(base_seed):
   condition:<rate>                           fraud-rate reduction
   split:<rate>                               fold assignment
   noise:<rate>/fold:<i>/{train,test}         label flips
   cell:<rep>/<sampler>/fold:<i>              resampling
   cell:<rep>/<sampler>/<classifier>/fold:<i> classifier training

 Records come out in (condition, fold, representation, sampler,
 classifier) order, which is the config's order on every axis.
*/

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fraudbench/classifier.hpp"
#include "fraudbench/dataset.hpp"
#include "fraudbench/harness/config.hpp"
#include "fraudbench/metrics.hpp"
#include "fraudbench/noise.hpp"
#include "fraudbench/pca.hpp"
#include "fraudbench/resampling.hpp"

namespace fraudbench::harness {

struct EvalRecord {
  std::string experiment_id;
  std::string dataset;
  double fraud_rate = 0.0;  // realized rate of the condition's dataset
  std::string representation;
  std::string sampler;
  std::string classifier;
  std::uint64_t seed = 0;
  std::size_t fold = 0;
  MetricReport metrics;        // predictions vs clean test truth (real error)
  MetricReport model_metrics;  // predictions vs annotated test labels (model error)
  ConfusionMatrix real_confusion;
  ConfusionMatrix model_confusion;
  FlipCounts flips;            // train + test flips
  double train_ms = 0.0;
  double predict_ms = 0.0;
  std::optional<double> explained_variance_ratio;
  std::size_t train_rows = 0;  // after resampling
  std::size_t test_rows = 0;

  // kept only with RunOptions::keep_predictions
  std::vector<std::size_t> test_indices;  // rows of the condition's dataset
  Labels predictions;
  Labels test_truth;
  Labels test_annotations;
};

struct RunOptions {
  bool keep_predictions = false;
  // Called after each completed fold.
  std::function<void(const std::string& condition, std::size_t fold)> progress;
};

inline Dataset load_source(const DatasetSource& src, std::uint64_t base_seed) {
  if (src.synthetic) {
    RandomSource rng = derive_child(RandomSource(base_seed), "synthetic");
    const auto& s = *src.synthetic;
    Dataset d = make_synthetic(s.normals, s.frauds, s.dims, s.separation, rng);
    d.provenance = src.display_tag();
    return d;
  }
  Dataset d = load_csv(src.path, src.label_column);
  d.provenance = src.display_tag();
  return d;
}

// The dataset for one fraud-rate condition.
inline Dataset condition_dataset(const Dataset& base, const FraudRateTarget& target, std::uint64_t base_seed) {
  if (target.native) return base;
  RandomSource rng = derive_child(RandomSource(base_seed), "condition:" + target.label());
  return adjust_fraud_rate(base, target.rate, rng);
}

namespace bench_detail {

template <typename Fn>
auto with_coordinates(const std::string& where, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DataError& e) {
    throw DataError(e.kind(), where + ": " + e.what());
  } catch (const CapabilityError& e) {
    throw CapabilityError(where + ": " + e.what());
  } catch (const ContractError& e) {
    throw ContractError(where + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(where + ": " + e.what());
  }
}

inline double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

struct PreparedFold {
  Dataset train;
  Dataset test;
  std::optional<double> explained_variance_ratio;
};

inline PreparedFold prepare(const Dataset& train_raw, const Dataset& test_raw, const Representation& rep,
                            bool standardize_first) {
  PreparedFold out{train_raw, test_raw, std::nullopt};
  if (standardize_first) {
    const auto params = fit_standardization(train_raw.features);
    out.train = apply_standardization(train_raw, params);
    out.test = apply_standardization(test_raw, params);
  }
  if (rep.pca) {
    const PcaModel m = fit_pca(out.train, rep.resolved_k(train_raw.dims()));
    out.explained_variance_ratio = m.explained_variance_ratio();
    out.train = transform(m, out.train);
    out.test = transform(m, out.test);
  }
  return out;
}

}  // namespace bench_detail

// Runs the grid on an already loaded base dataset.
inline std::vector<EvalRecord> run_benchmark(const ExperimentConfig& cfg, const Dataset& base,
                                             const RunOptions& options = {}) {
  using namespace bench_detail;
  cfg.validate(false);
  validate(base);
  for (const auto& rep : cfg.representations) {
    if (rep.pca && rep.resolved_k(base.dims()) > base.dims()) {
      throw ContractError("config: representation pca:" + std::to_string(rep.k) + " exceeds the " +
                          std::to_string(base.dims()) + " features of the dataset");
    }
  }
  const RandomSource root(cfg.base_seed);
  const std::string tag = base.provenance.empty() ? cfg.dataset.display_tag() : base.provenance;
  std::vector<EvalRecord> records;

  for (const auto& target : cfg.fraud_rates) {
    const std::string cond = target.label();
    const Dataset data = with_coordinates("fraud_rate " + cond, [&] { return condition_dataset(base, target, cfg.base_seed); });
    const SplitPlan plan = with_coordinates("fraud_rate " + cond, [&] {
      return stratified_shuffle_split(data.labels, cfg.test_fraction, cfg.folds, derive_child(root, "split:" + cond));
    });

    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
      const Fold& fold = plan.folds[f];
      const std::string fold_tag = "fold:" + std::to_string(f);
      Dataset train_raw = data.subset(fold.train);
      const Dataset test_raw = data.subset(fold.test);
      const Labels truth = test_raw.labels;

      FlipCounts flips;
      if (cfg.noise_on_train()) {
        RandomSource rng = derive_child(root, "noise:" + cond + "/" + fold_tag + "/train");
        auto noisy = inject_noise(train_raw.labels, cfg.noise, rng);
        train_raw.labels = std::move(noisy.labels);
        flips.fraud_to_normal += noisy.flips.fraud_to_normal;
        flips.normal_to_fraud += noisy.flips.normal_to_fraud;
      }
      Labels annotations = truth;
      if (cfg.noise_on_test()) {
        RandomSource rng = derive_child(root, "noise:" + cond + "/" + fold_tag + "/test");
        auto noisy = inject_noise(truth, cfg.noise, rng);
        annotations = std::move(noisy.labels);
        flips.fraud_to_normal += noisy.flips.fraud_to_normal;
        flips.normal_to_fraud += noisy.flips.normal_to_fraud;
      }

      for (const auto& rep : cfg.representations) {
        const std::string rep_label = rep.label(data.dims(), cfg.standardize);
        const std::string rep_where = "fraud_rate " + cond + ", " + fold_tag + ", representation " + rep_label;
        const PreparedFold prepared = with_coordinates(rep_where, [&] { return prepare(train_raw, test_raw, rep, cfg.standardize); });

        for (const auto& sampler : cfg.samplers) {
          const std::string sampler_label = sampler.label();
          const std::string cell_prefix = "cell:" + rep_label + "/" + sampler_label;
          const Dataset train_set = with_coordinates(rep_where + ", sampler " + sampler_label, [&] {
            return resample(sampler, prepared.train, derive_child(root, cell_prefix + "/" + fold_tag));
          });

          for (const auto& spec : cfg.classifiers) {
            const std::string clf_label = spec.label();
            const std::string where = rep_where + ", sampler " + sampler_label + ", classifier " + clf_label;
            const RandomSource cell_rng = derive_child(root, cell_prefix + "/" + clf_label + "/" + fold_tag);

            EvalRecord rec;
            rec.experiment_id = cfg.id;
            rec.dataset = tag;
            rec.fraud_rate = data.fraud_rate();
            rec.representation = rep_label;
            rec.sampler = sampler_label;
            rec.classifier = clf_label;
            rec.seed = cfg.base_seed;
            rec.fold = f;
            rec.flips = flips;
            rec.explained_variance_ratio = prepared.explained_variance_ratio;
            rec.train_rows = train_set.size();
            rec.test_rows = prepared.test.size();

            auto t0 = std::chrono::steady_clock::now();
            const TrainedModel model = with_coordinates(where, [&] { return train(spec, train_set, cell_rng); });
            rec.train_ms = ms_since(t0);
            t0 = std::chrono::steady_clock::now();
            const Labels pred = with_coordinates(where, [&] { return predict(model, prepared.test.features); });
            rec.predict_ms = ms_since(t0);

            const ErrorDecomposition e = decompose_error(truth, annotations, pred);
            rec.metrics = e.real_error;
            rec.model_metrics = e.model_error;
            rec.real_confusion = e.real_confusion;
            rec.model_confusion = e.model_confusion;
            if (options.keep_predictions) {
              rec.test_indices = fold.test;
              rec.predictions = pred;
              rec.test_truth = truth;
              rec.test_annotations = annotations;
            }
            records.push_back(std::move(rec));
          }
        }
      }
      if (options.progress) options.progress(cond, f);
    }
  }
  return records;
}

inline std::vector<EvalRecord> run_benchmark(const ExperimentConfig& cfg, const RunOptions& options = {}) {
  cfg.validate(true);
  return run_benchmark(cfg, load_source(cfg.dataset, cfg.base_seed), options);
}

// One benchmark per k in [k_min, k_max] with the pca:k representation;
// records carry k in their representation field.
inline std::vector<EvalRecord> sweep_dimensions(const ExperimentConfig& cfg, const Dataset& base, std::size_t k_min,
                                                std::size_t k_max, const RunOptions& options = {}) {
  if (k_min < 1 || k_max < k_min || k_max > base.dims()) {
    throw ContractError("sweep_dimensions: need 1 <= k_min <= k_max <= " + std::to_string(base.dims()) + ", got " +
                        std::to_string(k_min) + ".." + std::to_string(k_max));
  }
  ExperimentConfig c = cfg;
  c.representations.clear();
  for (std::size_t k = k_min; k <= k_max; ++k) c.representations.push_back({true, k});
  return run_benchmark(c, base, options);
}

inline std::vector<EvalRecord> sweep_dimensions(const ExperimentConfig& cfg, std::size_t k_min, std::size_t k_max,
                                                const RunOptions& options = {}) {
  cfg.validate(true);
  return sweep_dimensions(cfg, load_source(cfg.dataset, cfg.base_seed), k_min, k_max, options);
}

// Noise study: one benchmark per symmetric flip rate. The rate is appended
// to the experiment id as "<id>@eps=<rate>".
inline std::vector<EvalRecord> noise_study(const ExperimentConfig& cfg, const Dataset& base,
                                           const std::vector<double>& flip_rates, const RunOptions& options = {}) {
  if (flip_rates.empty()) throw ContractError("noise_study: no flip rates given");
  std::vector<EvalRecord> all;
  for (double eps : flip_rates) {
    ExperimentConfig c = cfg;
    c.noise = NoiseSpec{eps, eps};
    c.noise.validate();
    if (c.noise_site == NoiseSite::none) c.noise_site = NoiseSite::test;
    c.id = cfg.id + "@eps=" + detail::format_shortest(eps);
    auto recs = run_benchmark(c, base, options);
    all.insert(all.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
  }
  return all;
}

inline std::vector<EvalRecord> noise_study(const ExperimentConfig& cfg, const std::vector<double>& flip_rates,
                                           const RunOptions& options = {}) {
  cfg.validate(true);
  return noise_study(cfg, load_source(cfg.dataset, cfg.base_seed), flip_rates, options);
}

}  // namespace fraudbench::harness
