#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "fraudbench/dataset.hpp"

namespace testutil {

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fraudbench_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path.string();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// n_normal rows then n_fraud rows of a single constant feature.
inline fraudbench::Dataset counts_only(std::size_t n_normal, std::size_t n_fraud) {
  fraudbench::Dataset d;
  const std::size_t n = n_normal + n_fraud;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
  d.features = fraudbench::Matrix(n, 1, std::move(v));
  d.labels.assign(n, 0);
  for (std::size_t i = n_normal; i < n; ++i) d.labels[i] = 1;
  d.feature_names = {"row"};
  return d;
}

}  // namespace testutil
