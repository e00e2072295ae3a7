#pragma once

/*
 Report writers. All files are plain CSV with a header row; undefined
 metrics are written as empty fields and numbers use the shortest text
 that reads back exactly, so reports of identical runs differ only in the
 two wall-time columns.
*/

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fraudbench/dataset.hpp"
#include "fraudbench/errors.hpp"
#include "fraudbench/harness/benchmark.hpp"
#include "fraudbench/pca.hpp"

namespace fraudbench::harness {

inline constexpr const char* kReportHeader =
    "experiment_id,dataset,fraud_rate,representation,sampler,classifier,seed,fold,accuracy,precision,recall,"
    "specificity,f1,g_mean,noise_flips_pos,noise_flips_neg,train_ms,predict_ms";

enum class ErrorView { real, model };

namespace report_detail {

inline std::string opt(const std::optional<double>& v) { return v ? detail::format_shortest(*v) : std::string(); }

inline std::string millis(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(DataError::Kind::io, "cannot write '" + path + "'");
  return out;
}

inline void close_checked(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw DataError(DataError::Kind::io, "error while writing '" + path + "'");
}

// Path with ".csv" replaced by `suffix` (or `suffix` appended).
inline std::string side_path(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  if (p.extension() == ".csv") p.replace_extension();
  return p.string() + suffix;
}

}  // namespace report_detail

inline std::string format_record(const EvalRecord& r, ErrorView view = ErrorView::real) {
  using report_detail::opt;
  const MetricReport& m = view == ErrorView::real ? r.metrics : r.model_metrics;
  std::string line;
  line += r.experiment_id + ',' + r.dataset + ',' + detail::format_shortest(r.fraud_rate) + ',' + r.representation +
          ',' + r.sampler + ',' + r.classifier + ',' + std::to_string(r.seed) + ',' + std::to_string(r.fold) + ',';
  line += opt(m.accuracy) + ',' + opt(m.precision) + ',' + opt(m.recall) + ',' + opt(m.specificity) + ',' +
          opt(m.f1) + ',' + opt(m.g_mean) + ',';
  line += std::to_string(r.flips.fraud_to_normal) + ',' + std::to_string(r.flips.normal_to_fraud) + ',';
  line += report_detail::millis(r.train_ms) + ',' + report_detail::millis(r.predict_ms);
  return line;
}

inline void write_report(const std::vector<EvalRecord>& records, const std::string& path,
                         ErrorView view = ErrorView::real) {
  auto out = report_detail::open_out(path);
  out << kReportHeader << '\n';
  for (const auto& r : records) out << format_record(r, view) << '\n';
  report_detail::close_checked(out, path);
}

// ---------------------------------------------------------------------------
// Dimension sweep side files

struct VariancePoint {
  double fraud_rate = 0.0;
  std::size_t k = 0;
  double explained_variance_ratio = 0.0;  // mean over folds
};

// k from a "pca:<k>[/std]" representation label.
inline std::size_t representation_k(const std::string& rep) {
  if (rep.rfind("pca:", 0) != 0) return 0;
  return static_cast<std::size_t>(std::stoul(rep.substr(4)));
}

inline std::vector<VariancePoint> variance_curve(const std::vector<EvalRecord>& records) {
  // one value per (condition, k, fold); classifiers share it
  std::map<std::pair<double, std::size_t>, std::map<std::size_t, double>> per;
  for (const auto& r : records)
    if (r.explained_variance_ratio) per[{r.fraud_rate, representation_k(r.representation)}][r.fold] = *r.explained_variance_ratio;
  std::vector<VariancePoint> out;
  for (const auto& [key, folds] : per) {
    double s = 0;
    for (const auto& [f, v] : folds) s += v;
    out.push_back({key.first, key.second, s / static_cast<double>(folds.size())});
  }
  return out;
}

struct F1Point {
  double fraud_rate = 0.0;
  std::string classifier;
  std::size_t k = 0;
  std::optional<double> mean_f1;  // over folds with defined F1
  std::size_t defined_folds = 0;
  std::size_t folds = 0;
};

// F1-vs-k for the `top` classifiers with the highest mean F1 per condition.
// Undefined F1 values are left out of every mean.
inline std::vector<F1Point> f1_curves(const std::vector<EvalRecord>& records, std::size_t top = 3) {
  struct Acc {
    double sum = 0;
    std::size_t defined = 0, total = 0;
  };
  std::map<double, std::map<std::string, Acc>> overall;
  std::map<double, std::map<std::string, std::map<std::size_t, Acc>>> by_k;
  std::map<double, std::vector<std::string>> order;  // first-seen classifier order
  for (const auto& r : records) {
    const std::string name = r.sampler + "/" + r.classifier;
    auto& seen = order[r.fraud_rate];
    if (std::find(seen.begin(), seen.end(), name) == seen.end()) seen.push_back(name);
    for (Acc* a : {&overall[r.fraud_rate][name], &by_k[r.fraud_rate][name][representation_k(r.representation)]}) {
      ++a->total;
      if (r.metrics.f1) {
        a->sum += *r.metrics.f1;
        ++a->defined;
      }
    }
  }
  std::vector<F1Point> out;
  for (const auto& [rate, names] : order) {
    std::vector<std::string> ranked = names;
    auto mean = [&](const std::string& n) {
      const Acc& a = overall[rate][n];
      return a.defined ? a.sum / static_cast<double>(a.defined) : -1.0;
    };
    std::stable_sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) { return mean(a) > mean(b); });
    ranked.resize(std::min(top, ranked.size()));
    for (const auto& n : ranked) {
      for (const auto& [k, a] : by_k[rate][n]) {
        F1Point p{rate, n, k, std::nullopt, a.defined, a.total};
        if (a.defined) p.mean_f1 = a.sum / static_cast<double>(a.defined);
        out.push_back(p);
      }
    }
  }
  return out;
}

inline void write_variance_curve(const std::vector<VariancePoint>& pts, const std::string& path) {
  auto out = report_detail::open_out(path);
  out << "fraud_rate,k,explained_variance_ratio\n";
  for (const auto& p : pts)
    out << detail::format_shortest(p.fraud_rate) << ',' << p.k << ',' << detail::format_shortest(p.explained_variance_ratio)
        << '\n';
  report_detail::close_checked(out, path);
}

inline void write_f1_curves(const std::vector<F1Point>& pts, const std::string& path) {
  auto out = report_detail::open_out(path);
  out << "fraud_rate,classifier,k,mean_f1,defined_folds,folds\n";
  for (const auto& p : pts)
    out << detail::format_shortest(p.fraud_rate) << ',' << p.classifier << ',' << p.k << ',' << report_detail::opt(p.mean_f1)
        << ',' << p.defined_folds << ',' << p.folds << '\n';
  report_detail::close_checked(out, path);
}

// ---------------------------------------------------------------------------
// Noise study selection: per (experiment, condition) the cell that minimizes
// the fold-mean error measured against true labels and the one that
// minimizes it against annotated labels. Two criteria are reported: 0/1
// error and 1 - g_mean (undefined g_mean counts as error 1).

struct Selection {
  std::string experiment_id;
  double fraud_rate = 0.0;
  std::string criterion;
  std::string best_by_real;
  double real_error_of_best_by_real = 0.0;
  std::string best_by_model;
  double real_error_of_best_by_model = 0.0;
  double model_error_of_best_by_model = 0.0;
};

inline std::vector<Selection> select_models(const std::vector<EvalRecord>& records) {
  struct Acc {
    double real01 = 0, model01 = 0, realg = 0, modelg = 0;
    std::size_t n = 0;
  };
  using Key = std::pair<std::string, double>;
  std::map<Key, std::vector<std::string>> order;
  std::map<Key, std::map<std::string, Acc>> acc;
  for (const auto& r : records) {
    const Key key{r.experiment_id, r.fraud_rate};
    const std::string cell = r.representation + "/" + r.sampler + "/" + r.classifier;
    auto& o = order[key];
    if (std::find(o.begin(), o.end(), cell) == o.end()) o.push_back(cell);
    Acc& a = acc[key][cell];
    a.real01 += zero_one_error(r.real_confusion);
    a.model01 += zero_one_error(r.model_confusion);
    a.realg += 1.0 - r.metrics.g_mean.value_or(0.0);
    a.modelg += 1.0 - r.model_metrics.g_mean.value_or(0.0);
    ++a.n;
  }
  std::vector<Selection> out;
  // keep experiment order as first seen in the records
  std::vector<Key> keys;
  for (const auto& r : records) {
    const Key key{r.experiment_id, r.fraud_rate};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const auto& key : keys) {
    for (const std::string criterion : {"zero_one", "one_minus_g_mean"}) {
      const bool g = criterion != "zero_one";
      Selection s{key.first, key.second, criterion, "", 2.0, "", 2.0, 2.0};
      for (const auto& cell : order[key]) {
        const Acc& a = acc[key][cell];
        const double n = static_cast<double>(a.n);
        const double real = (g ? a.realg : a.real01) / n, model = (g ? a.modelg : a.model01) / n;
        if (real < s.real_error_of_best_by_real) {
          s.best_by_real = cell;
          s.real_error_of_best_by_real = real;
        }
        if (model < s.model_error_of_best_by_model) {
          s.best_by_model = cell;
          s.model_error_of_best_by_model = model;
          s.real_error_of_best_by_model = real;
        }
      }
      out.push_back(s);
    }
  }
  return out;
}

inline void write_selection(const std::vector<Selection>& sel, const std::string& path) {
  auto out = report_detail::open_out(path);
  out << "experiment_id,fraud_rate,criterion,best_by_real_error,real_error,best_by_model_error,model_error,"
         "real_error_of_model_choice,diverged\n";
  for (const auto& s : sel) {
    out << s.experiment_id << ',' << detail::format_shortest(s.fraud_rate) << ',' << s.criterion << ',' << s.best_by_real
        << ',' << detail::format_shortest(s.real_error_of_best_by_real) << ',' << s.best_by_model << ','
        << detail::format_shortest(s.model_error_of_best_by_model) << ','
        << detail::format_shortest(s.real_error_of_best_by_model) << ','
        << (s.best_by_real != s.best_by_model ? "yes" : "no") << '\n';
  }
  report_detail::close_checked(out, path);
}

// ---------------------------------------------------------------------------

// Projects d onto its first n_components principal axes (fit on d as given,
// centered but not scaled) and writes V1..Vn plus the label column.
inline Dataset emit_projection(const Dataset& d, std::size_t n_components, const std::string& path) {
  if (n_components < 1 || n_components > d.dims()) {
    throw ContractError("emit_projection: n_components must lie in [1, " + std::to_string(d.dims()) + "]");
  }
  const Dataset projected = transform(fit_pca(d, n_components), d);
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  write_csv(projected, path);
  return projected;
}

}  // namespace fraudbench::harness
