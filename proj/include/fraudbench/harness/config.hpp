#pragma once

/*
 Experiment configuration: a line-oriented key = value file with section
 headers. '#' or ';' starts a comment line. Keys are case sensitive.

   [experiment]      id, base_seed, standardize, output
   [dataset]         path, label_column, tag, fraud_rates,
                     synthetic_normals, synthetic_frauds, synthetic_dims,
                     synthetic_separation
   [representations] list            (raw, pca:<k>, pca:all)
   [split]           test_fraction, folds
   [noise]           flip_fraud_to_normal, flip_normal_to_fraud, apply_to
   [sampler]         method, target_ratio, k_neighbors, estimator_folds
   [classifier]      kind, then any hyperparameter of that kind

 [sampler] and [classifier] may repeat, one grid entry per section. Every
 other section appears at most once. Unknown sections or keys, repeated
 keys and malformed values are errors naming the line.
*/

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fraudbench/classifiers/spec.hpp"
#include "fraudbench/dataset.hpp"
#include "fraudbench/errors.hpp"
#include "fraudbench/noise.hpp"
#include "fraudbench/resampling.hpp"

namespace fraudbench::harness {

struct SyntheticSpec {
  std::size_t normals = 0;
  std::size_t frauds = 0;
  std::size_t dims = 0;
  double separation = 1.0;
};

struct DatasetSource {
  std::string path;
  std::string label_column = "Class";
  std::optional<SyntheticSpec> synthetic;
  std::string tag;

  std::string display_tag() const {
    if (!tag.empty()) return tag;
    if (synthetic) return "synthetic";
    return std::filesystem::path(path).stem().string();
  }
};

// A fraud-rate condition: the dataset as loaded, or reduced to `rate`.
struct FraudRateTarget {
  bool native = true;
  double rate = 0.0;

  std::string label() const { return native ? "native" : detail::format_shortest(rate); }
  friend bool operator==(const FraudRateTarget&, const FraudRateTarget&) = default;
};

// raw, or PCA with k components (k = 0 means all d components).
struct Representation {
  bool pca = false;
  std::size_t k = 0;

  std::size_t resolved_k(std::size_t dims) const noexcept { return k == 0 ? dims : k; }

  std::string label(std::size_t dims, bool standardized) const {
    std::string out = pca ? "pca:" + std::to_string(resolved_k(dims)) : "raw";
    return standardized ? out + "/std" : out;
  }
  friend bool operator==(const Representation&, const Representation&) = default;
};

enum class NoiseSite { none, train, test, both };

inline std::string_view to_string(NoiseSite s) {
  switch (s) {
    case NoiseSite::none: return "none";
    case NoiseSite::train: return "train";
    case NoiseSite::test: return "test";
    case NoiseSite::both: return "both";
  }
  return "none";
}

struct ExperimentConfig {
  std::string id = "experiment";
  std::uint64_t base_seed = 0;
  bool standardize = true;
  std::string output;
  DatasetSource dataset;
  std::vector<FraudRateTarget> fraud_rates{FraudRateTarget{}};
  std::vector<Representation> representations{Representation{}};
  double test_fraction = 0.2;
  std::size_t folds = 5;
  NoiseSpec noise;
  NoiseSite noise_site = NoiseSite::none;
  std::vector<SamplerSpec> samplers{SamplerSpec{}};
  std::vector<ClassifierSpec> classifiers;

  bool noise_on_train() const noexcept { return noise_site == NoiseSite::train || noise_site == NoiseSite::both; }
  bool noise_on_test() const noexcept { return noise_site == NoiseSite::test || noise_site == NoiseSite::both; }

  // Structural checks; `check_files` also requires the dataset file to exist.
  void validate(bool check_files = true) const {
    if (id.empty()) throw ContractError("config: experiment id is empty");
    if (!dataset.synthetic && dataset.path.empty()) {
      throw ContractError("config: [dataset] needs either path or the synthetic_* keys");
    }
    if (dataset.synthetic && !dataset.path.empty()) {
      throw ContractError("config: [dataset] has both path and synthetic_* keys");
    }
    if (dataset.synthetic) {
      const auto& s = *dataset.synthetic;
      if (s.normals < 1 || s.dims < 1 || !(s.separation >= 0.0)) {
        throw ContractError("config: synthetic dataset needs normals >= 1, dims >= 1, separation >= 0");
      }
    }
    if (check_files && !dataset.path.empty() && !std::filesystem::exists(dataset.path)) {
      throw DataError(DataError::Kind::missing_file, "config: dataset file '" + dataset.path + "' does not exist");
    }
    if (fraud_rates.empty() || representations.empty() || samplers.empty() || classifiers.empty()) {
      throw ContractError("config: every grid axis needs at least one entry (fraud_rates, representations, "
                          "samplers, classifiers)");
    }
    for (const auto& r : fraud_rates) {
      if (!r.native && !(r.rate > 0.0 && r.rate < 1.0)) throw ContractError("config: fraud rate must lie in (0, 1)");
    }
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ContractError("config: test_fraction must lie in (0, 1)");
    if (folds < 1) throw ContractError("config: folds must be >= 1");
    noise.validate();
    for (const auto& s : samplers) s.validate();

    auto no_duplicates = [](const std::vector<std::string>& labels, std::string_view axis) {
      std::set<std::string> seen;
      for (const auto& l : labels)
        if (!seen.insert(l).second) throw ContractError("config: duplicate " + std::string(axis) + " '" + l + "'");
    };
    std::vector<std::string> labels;
    for (const auto& r : fraud_rates) labels.push_back(r.label());
    no_duplicates(labels, "fraud rate");
    labels.clear();
    for (const auto& r : representations) labels.push_back(r.pca ? "pca:" + std::to_string(r.k) : "raw");
    no_duplicates(labels, "representation");
    labels.clear();
    for (const auto& s : samplers) labels.push_back(s.label());
    no_duplicates(labels, "sampler");
    labels.clear();
    for (const auto& c : classifiers) labels.push_back(c.label());
    no_duplicates(labels, "classifier");
  }
};

namespace config_detail {

struct Section {
  std::string name;
  std::size_t line = 0;
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<std::size_t> entry_lines;
};

inline std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

class Reader {
 public:
  Reader(const Section& s, std::string source) : s_(s), source_(std::move(source)) {}

  std::optional<std::string> take(const std::string& key) {
    for (std::size_t i = 0; i < s_.entries.size(); ++i) {
      if (s_.entries[i].first == key) {
        used_.insert(i);
        return s_.entries[i].second;
      }
    }
    return std::nullopt;
  }

  std::size_t line_of(const std::string& key) const {
    for (std::size_t i = 0; i < s_.entries.size(); ++i)
      if (s_.entries[i].first == key) return s_.entry_lines[i];
    return s_.line;
  }

  double number(const std::string& key, const std::string& text) const {
    double v = 0.0;
    if (!detail::parse_double(text, v)) {
      throw ContractError(where(source_, line_of(key)) + "'" + key + "' expects a number, got '" + text + "'");
    }
    return v;
  }

  std::size_t count(const std::string& key, const std::string& text) const {
    const double v = number(key, text);
    if (v < 0 || v != std::floor(v) || v > 1e15) {
      throw ContractError(where(source_, line_of(key)) + "'" + key + "' expects a non-negative integer, got '" + text +
                          "'");
    }
    return static_cast<std::size_t>(v);
  }

  bool boolean(const std::string& key, const std::string& text) const {
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    throw ContractError(where(source_, line_of(key)) + "'" + key + "' expects true or false, got '" + text + "'");
  }

  // Remaining unconsumed entries.
  std::vector<std::pair<std::string, std::string>> rest() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < s_.entries.size(); ++i)
      if (!used_.count(i)) out.push_back(s_.entries[i]);
    return out;
  }

  void finish() const {
    for (std::size_t i = 0; i < s_.entries.size(); ++i) {
      if (!used_.count(i)) {
        throw ContractError(where(source_, s_.entry_lines[i]) + "unknown key '" + s_.entries[i].first + "' in [" +
                            s_.name + "]");
      }
    }
  }

  const std::string& source() const noexcept { return source_; }

 private:
  const Section& s_;
  std::string source_;
  std::set<std::size_t> used_;
};

inline std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  for (auto part : detail::split_commas(text)) {
    auto t = detail::trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

inline Representation parse_representation(const std::string& text, const std::string& prefix) {
  if (text == "raw") return {};
  if (text.rfind("pca:", 0) == 0) {
    const std::string k = text.substr(4);
    if (k == "all") return {true, 0};
    double v = 0;
    if (detail::parse_double(k, v) && v >= 1 && v == std::floor(v)) return {true, static_cast<std::size_t>(v)};
  }
  throw ContractError(prefix + "representation must be raw, pca:<k> or pca:all, got '" + text + "'");
}

}  // namespace config_detail

inline ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>") {
  using namespace config_detail;
  std::vector<Section> sections;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = detail::trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ContractError(where(source, line_no) + "unterminated section header");
      sections.push_back({std::string(detail::trim(line.substr(1, line.size() - 2))), line_no, {}, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ContractError(where(source, line_no) + "expected key = value");
    if (sections.empty()) throw ContractError(where(source, line_no) + "key outside of any section");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) throw ContractError(where(source, line_no) + "empty key");
    auto& sec = sections.back();
    for (const auto& [k, v] : sec.entries) {
      if (k == key) throw ContractError(where(source, line_no) + "duplicate key '" + key + "' in [" + sec.name + "]");
    }
    sec.entries.emplace_back(key, value);
    sec.entry_lines.push_back(line_no);
  }

  ExperimentConfig cfg;
  cfg.samplers.clear();
  std::set<std::string> seen_single;
  bool have_representations = false;
  for (const auto& sec : sections) {
    const std::string at = where(source, sec.line);
    static const std::set<std::string> singles{"experiment", "dataset", "representations", "split", "noise"};
    if (singles.count(sec.name) && !seen_single.insert(sec.name).second) {
      throw ContractError(at + "section [" + sec.name + "] appears more than once");
    }
    Reader r(sec, source);
    if (sec.name == "experiment") {
      if (auto v = r.take("id")) cfg.id = *v;
      if (auto v = r.take("base_seed")) cfg.base_seed = r.count("base_seed", *v);
      if (auto v = r.take("standardize")) cfg.standardize = r.boolean("standardize", *v);
      if (auto v = r.take("output")) cfg.output = *v;
    } else if (sec.name == "dataset") {
      if (auto v = r.take("path")) cfg.dataset.path = *v;
      if (auto v = r.take("label_column")) cfg.dataset.label_column = *v;
      if (auto v = r.take("tag")) cfg.dataset.tag = *v;
      if (auto v = r.take("fraud_rates")) {
        cfg.fraud_rates.clear();
        for (const auto& item : split_list(*v)) {
          if (item == "native") {
            cfg.fraud_rates.push_back({});
          } else {
            cfg.fraud_rates.push_back({false, r.number("fraud_rates", item)});
          }
        }
      }
      SyntheticSpec syn;
      bool any = false;
      if (auto v = r.take("synthetic_normals")) {
        syn.normals = r.count("synthetic_normals", *v);
        any = true;
      }
      if (auto v = r.take("synthetic_frauds")) {
        syn.frauds = r.count("synthetic_frauds", *v);
        any = true;
      }
      if (auto v = r.take("synthetic_dims")) {
        syn.dims = r.count("synthetic_dims", *v);
        any = true;
      }
      if (auto v = r.take("synthetic_separation")) {
        syn.separation = r.number("synthetic_separation", *v);
        any = true;
      }
      if (any) cfg.dataset.synthetic = syn;
    } else if (sec.name == "representations") {
      have_representations = true;
      if (auto v = r.take("list")) {
        cfg.representations.clear();
        for (const auto& item : split_list(*v))
          cfg.representations.push_back(parse_representation(item, where(source, r.line_of("list"))));
      }
    } else if (sec.name == "split") {
      if (auto v = r.take("test_fraction")) cfg.test_fraction = r.number("test_fraction", *v);
      if (auto v = r.take("folds")) cfg.folds = r.count("folds", *v);
    } else if (sec.name == "noise") {
      if (auto v = r.take("flip_fraud_to_normal")) cfg.noise.flip_fraud_to_normal = r.number("flip_fraud_to_normal", *v);
      if (auto v = r.take("flip_normal_to_fraud")) cfg.noise.flip_normal_to_fraud = r.number("flip_normal_to_fraud", *v);
      if (auto v = r.take("apply_to")) {
        if (*v == "none") cfg.noise_site = NoiseSite::none;
        else if (*v == "train") cfg.noise_site = NoiseSite::train;
        else if (*v == "test") cfg.noise_site = NoiseSite::test;
        else if (*v == "both") cfg.noise_site = NoiseSite::both;
        else throw ContractError(where(source, r.line_of("apply_to")) + "apply_to must be none, train, test or both");
      }
    } else if (sec.name == "sampler") {
      SamplerSpec s;
      const auto method = r.take("method");
      if (!method) throw ContractError(at + "[sampler] needs a method");
      try {
        s.method = parse_sampler_method(*method);
      } catch (const ContractError& e) {
        throw ContractError(where(source, r.line_of("method")) + e.what());
      }
      if (auto v = r.take("target_ratio")) s.target_ratio = r.number("target_ratio", *v);
      if (auto v = r.take("k_neighbors")) s.k_neighbors = r.count("k_neighbors", *v);
      if (auto v = r.take("estimator_folds")) s.estimator_folds = r.count("estimator_folds", *v);
      cfg.samplers.push_back(s);
    } else if (sec.name == "classifier") {
      const auto kind = r.take("kind");
      if (!kind) throw ContractError(at + "[classifier] needs a kind");
      Hyperparameters hp;
      for (const auto& [k, v] : r.rest()) {
        hp[k] = r.number(k, v);
        r.take(k);
      }
      try {
        cfg.classifiers.push_back(make_classifier_spec(*kind, hp));
      } catch (const ContractError& e) {
        throw ContractError(at + e.what());
      }
    } else {
      throw ContractError(at + "unknown section [" + sec.name + "]");
    }
    r.finish();
  }
  if (cfg.samplers.empty()) cfg.samplers.push_back(SamplerSpec{});
  if (have_representations && cfg.representations.empty()) {
    throw ContractError(source + ": [representations] list is empty");
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path, bool check_files = true) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataError::Kind::missing_file, "cannot open config '" + path + "'");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  ExperimentConfig cfg = parse_config(text, path);
  // relative dataset paths resolve against the config file's directory
  if (!cfg.dataset.path.empty() && std::filesystem::path(cfg.dataset.path).is_relative()) {
    cfg.dataset.path = (std::filesystem::path(path).parent_path() / cfg.dataset.path).string();
  }
  cfg.validate(check_files);
  return cfg;
}

}  // namespace fraudbench::harness
