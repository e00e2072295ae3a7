#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "fraudbench/errors.hpp"
#include "fraudbench/matrix.hpp"
#include "fraudbench/random.hpp"

namespace fraudbench {

using Label = std::uint8_t;  // 0 = normal, 1 = fraud
using Labels = std::vector<Label>;

struct Dataset {
  Matrix features;
  Labels labels;
  std::vector<std::string> feature_names;
  std::string label_name = "Class";
  std::string provenance;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dims() const noexcept { return features.cols(); }

  std::size_t fraud_count() const noexcept {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label{1}));
  }
  std::size_t normal_count() const noexcept { return size() - fraud_count(); }

  double fraud_rate() const noexcept {
    return size() == 0 ? 0.0 : static_cast<double>(fraud_count()) / static_cast<double>(size());
  }

  Dataset subset(std::span<const std::size_t> idx) const {
    Dataset out;
    out.features = features.select_rows(idx);
    out.labels.reserve(idx.size());
    for (auto i : idx) out.labels.push_back(labels[i]);
    out.feature_names = feature_names;
    out.label_name = label_name;
    out.provenance = provenance;
    return out;
  }
};

inline void validate(const Dataset& d) {
  if (d.labels.size() != d.features.rows()) {
    throw ContractError("dataset: " + std::to_string(d.labels.size()) + " labels for " +
                        std::to_string(d.features.rows()) + " feature rows");
  }
  if (d.feature_names.size() != d.features.cols()) {
    throw ContractError("dataset: " + std::to_string(d.feature_names.size()) + " feature names for " +
                        std::to_string(d.features.cols()) + " columns");
  }
  for (std::size_t i = 0; i < d.labels.size(); ++i) {
    if (d.labels[i] > 1) throw ContractError("dataset: label at row " + std::to_string(i) + " is not 0/1");
  }
}

inline std::vector<std::string> default_feature_names(std::size_t d, std::string_view prefix = "V") {
  std::vector<std::string> names;
  names.reserve(d);
  for (std::size_t j = 1; j <= d; ++j) names.push_back(std::string(prefix) + std::to_string(j));
  return names;
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Shortest text that reads back to the same double.
inline std::string format_shortest(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

// Reads a headered, comma-separated file. Every column other than
// label_column becomes a feature; row order is preserved.
inline Dataset load_csv(const std::string& path, const std::string& label_column = "Class") {
  std::ifstream in(path);
  if (!in) throw DataError(DataError::Kind::missing_file, "load_csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line) || detail::trim(line).empty()) {
    throw DataError(DataError::Kind::missing_header, "load_csv: '" + path + "' has no header row");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  std::vector<std::string> header;
  {
    std::unordered_set<std::string> seen;
    for (auto cell : detail::split_commas(line)) {
      std::string name(detail::trim(cell));
      if (name.empty()) {
        throw DataError(DataError::Kind::missing_header,
                        "load_csv: '" + path + "' header column " + std::to_string(header.size() + 1) +
                            " is empty");
      }
      if (!seen.insert(name).second) {
        throw DataError(DataError::Kind::duplicate_header,
                        "load_csv: '" + path + "' duplicate header column '" + name + "'");
      }
      header.push_back(std::move(name));
    }
  }
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw DataError(DataError::Kind::missing_label_column,
                    "load_csv: '" + path + "' has no label column '" + label_column + "'");
  }
  const auto label_pos = static_cast<std::size_t>(label_it - header.begin());

  Dataset d;
  d.label_name = label_column;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (j != label_pos) d.feature_names.push_back(header[j]);
  const std::size_t ncol = header.size();
  const std::size_t dims = ncol - 1;

  std::vector<double> values;
  std::size_t file_row = 1;
  while (std::getline(in, line)) {
    ++file_row;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_commas(line);
    if (cells.size() != ncol) {
      throw DataError(DataError::Kind::ragged_row, "load_csv: '" + path + "' row " + std::to_string(file_row) +
                                                       " has " + std::to_string(cells.size()) +
                                                       " cells, header has " + std::to_string(ncol));
    }
    for (std::size_t j = 0; j < ncol; ++j) {
      double v = 0.0;
      if (!detail::parse_double(cells[j], v)) {
        throw DataError(DataError::Kind::non_numeric,
                        "load_csv: '" + path + "' row " + std::to_string(file_row) + ", column '" + header[j] +
                            "': non-numeric cell '" + std::string(detail::trim(cells[j])) + "'");
      }
      if (j == label_pos) {
        if (v != 0.0 && v != 1.0) {
          throw DataError(DataError::Kind::bad_label,
                          "load_csv: '" + path + "' row " + std::to_string(file_row) + ", column '" + header[j] +
                              "': label " + std::string(detail::trim(cells[j])) + " is not 0 or 1");
        }
        d.labels.push_back(static_cast<Label>(v));
      } else {
        values.push_back(v);
      }
    }
  }
  d.features = Matrix(d.labels.size(), dims, std::move(values));
  d.provenance = "csv:" + path;
  return d;
}

// Features first (named as in the dataset), label last. 17 significant
// digits so a reload reproduces every value exactly.
inline void write_csv(const Dataset& d, const std::string& path) {
  validate(d);
  std::ofstream out(path);
  if (!out) throw DataError(DataError::Kind::io, "write_csv: cannot open '" + path + "' for writing");
  for (const auto& name : d.feature_names) out << name << ',';
  out << d.label_name << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (double v : d.features.row(i)) out << detail::format_double(v) << ',';
    out << static_cast<int>(d.labels[i]) << '\n';
  }
  if (!out) throw DataError(DataError::Kind::io, "write_csv: write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// Rebalancing

// Number of frauds to keep so that frauds / (frauds + normals) does not
// exceed target_rate: floor(target_rate * normals / (1 - target_rate)).
inline std::size_t frauds_for_rate(std::size_t normals, double target_rate) {
  if (target_rate >= 1.0) throw ContractError("frauds_for_rate: target rate must be below 1");
  const double exact = target_rate * static_cast<double>(normals) / (1.0 - target_rate);
  auto keep = static_cast<std::size_t>(std::floor(exact));
  // Guard the floor against representation error in either direction.
  auto rate = [&](std::size_t f) {
    return static_cast<double>(f) / static_cast<double>(f + normals);
  };
  while (keep > 0 && rate(keep) > target_rate) --keep;
  while (rate(keep + 1) <= target_rate) ++keep;
  return keep;
}

// Lowers the fraud rate by dropping frauds chosen uniformly without
// replacement. Normals are never touched and row order is preserved.
inline Dataset adjust_fraud_rate(const Dataset& d, double target_rate, RandomSource& rng) {
  const double current = d.fraud_rate();
  if (!(target_rate > 0.0) || target_rate > current) {
    throw ContractError("adjust_fraud_rate: target rate " + detail::format_double(target_rate) +
                        " must lie in (0, current rate " + detail::format_double(current) +
                        "]; only fraud removal is supported");
  }
  const std::size_t frauds = d.fraud_count();
  const std::size_t keep = std::min(frauds, frauds_for_rate(d.normal_count(), target_rate));
  if (keep == frauds) return d;

  std::vector<std::size_t> fraud_rows;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.labels[i] == 1) fraud_rows.push_back(i);
  // partial Fisher-Yates: first `keep` slots are the sample
  for (std::size_t i = 0; i < keep; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(fraud_rows.size() - i));
    std::swap(fraud_rows[i], fraud_rows[j]);
  }
  std::vector<bool> retain(d.size(), true);
  for (std::size_t i = keep; i < fraud_rows.size(); ++i) retain[fraud_rows[i]] = false;

  std::vector<std::size_t> idx;
  idx.reserve(d.normal_count() + keep);
  for (std::size_t i = 0; i < d.size(); ++i)
    if (retain[i]) idx.push_back(i);
  Dataset out = d.subset(idx);
  out.provenance = d.provenance + "|fraud_rate<=" + detail::format_double(target_rate);
  return out;
}

// ---------------------------------------------------------------------------
// Standardization (population standard deviation; constant columns get a
// recorded stddev of 1 and map to 0)

struct StandardizationParams {
  std::vector<double> means;
  std::vector<double> stddevs;
};

inline StandardizationParams fit_standardization(const Matrix& x) {
  if (x.rows() < 2) throw ContractError("standardize: need at least 2 rows, got " + std::to_string(x.rows()));
  const std::size_t n = x.rows(), d = x.cols();
  StandardizationParams p{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) p.means[j] += x(i, j);
  for (auto& m : p.means) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = x(i, j) - p.means[j];
      p.stddevs[j] += c * c;
    }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(p.stddevs[j] / static_cast<double>(n));
    const double scale = std::max(1.0, std::abs(p.means[j]));
    if (sd > 1e-12 * scale) {
      p.stddevs[j] = sd;
    } else {
      // exact value of the constant, so the column maps to exactly 0
      p.means[j] = x(0, j);
      p.stddevs[j] = 1.0;
    }
  }
  return p;
}

inline Dataset apply_standardization(const Dataset& d, const StandardizationParams& p) {
  if (d.dims() != p.means.size()) {
    throw ContractError("standardize: dataset has " + std::to_string(d.dims()) + " features, params have " +
                        std::to_string(p.means.size()));
  }
  Dataset out = d;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto r = out.features.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      r[j] = (r[j] - p.means[j]) / p.stddevs[j];
    }
  }
  return out;
}

inline Dataset invert_standardization(const Dataset& d, const StandardizationParams& p) {
  if (d.dims() != p.means.size()) throw ContractError("unstandardize: dimension mismatch");
  Dataset out = d;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto r = out.features.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = r[j] * p.stddevs[j] + p.means[j];
  }
  return out;
}

inline std::pair<Dataset, StandardizationParams> standardize(const Dataset& d) {
  auto p = fit_standardization(d.features);
  return {apply_standardization(d, p), std::move(p)};
}

// ---------------------------------------------------------------------------
// Synthetic data: normals ~ N(0, I), frauds ~ N(mu, I) with
// mu = (separation, ..., separation) / sqrt(dims), so the class means are
// `separation` apart in Euclidean distance. Normals come first.

inline Dataset make_synthetic(std::size_t n_normal, std::size_t n_fraud, std::size_t dims, double separation,
                              RandomSource& rng) {
  if (n_normal < 1 || dims < 1 || !(separation >= 0.0)) {
    throw ContractError("make_synthetic: need n_normal >= 1, dims >= 1, separation >= 0");
  }
  const std::size_t n = n_normal + n_fraud;
  const double shift = separation / std::sqrt(static_cast<double>(dims));
  std::vector<double> values(n * dims);
  Labels labels(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const bool fraud = i >= n_normal;
    labels[i] = fraud ? 1 : 0;
    for (std::size_t j = 0; j < dims; ++j) values[i * dims + j] = rng.normal() + (fraud ? shift : 0.0);
  }
  Dataset d;
  d.features = Matrix(n, dims, std::move(values));
  d.labels = std::move(labels);
  d.feature_names = default_feature_names(dims, "X");
  d.provenance = "synthetic(normals=" + std::to_string(n_normal) + ",frauds=" + std::to_string(n_fraud) +
                 ",dims=" + std::to_string(dims) + ",separation=" + detail::format_double(separation) +
                 ",seed=" + std::to_string(rng.seed()) + ")";
  return d;
}

}  // namespace fraudbench
