// fraudbench command line: dataset utilities and the experiment runners.
//
// Exit status: 0 success, 1 contract / config / data error, 2 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "fraudbench/dataset.hpp"
#include "fraudbench/harness/benchmark.hpp"
#include "fraudbench/harness/config.hpp"
#include "fraudbench/harness/report.hpp"
#include "fraudbench/pca.hpp"

using namespace fraudbench;
using namespace fraudbench::harness;

namespace {

void progress(const std::string& condition, std::size_t fold) {
  std::fprintf(stderr, "  fraud_rate %s fold %zu done\n", condition.c_str(), fold);
}

RunOptions cli_options(bool quiet) {
  RunOptions o;
  if (!quiet) o.progress = progress;
  return o;
}

std::string resolve_out(const std::string& flag, const ExperimentConfig& cfg) {
  if (!flag.empty()) return flag;
  if (!cfg.output.empty()) return cfg.output;
  throw ContractError("no output path: pass --out or set output in [experiment]");
}

void write_main_reports(const std::vector<EvalRecord>& recs, const ExperimentConfig& cfg, const std::string& out) {
  write_report(recs, out);
  std::printf("wrote %zu records to %s\n", recs.size(), out.c_str());
  if (cfg.noise_on_test()) {
    const std::string side = report_detail::side_path(out, ".model_error.csv");
    write_report(recs, side, ErrorView::model);
    std::printf("wrote model-error view to %s\n", side.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imbalanced fraud-detection benchmark: PCA encoding, resampling, classifier zoo, label noise"};
  app.require_subcommand(1);
  std::string label_column = "Class";
  bool quiet = false;
  app.add_option("--label-column", label_column, "Name of the 0/1 label column in input CSV files");
  app.add_flag("-q,--quiet", quiet, "No progress output");

  std::string input, output;

  auto* encode = app.add_subcommand("encode-pca", "Project a dataset onto its first k principal components");
  std::size_t components = 0;
  bool raw_scale = false;
  encode->add_option("--input", input, "Input CSV")->required();
  encode->add_option("--components", components, "Number of components k")->required();
  encode->add_option("--output", output, "Output CSV with columns V1..Vk and the label")->required();
  encode->add_flag("--no-standardize", raw_scale, "Center only; do not scale columns to unit variance first");

  auto* rebalance = app.add_subcommand("rebalance", "Remove frauds until the fraud rate is at most the target");
  double fraud_rate = 0.0;
  std::uint64_t seed = 0;
  rebalance->add_option("--input", input, "Input CSV")->required();
  rebalance->add_option("--fraud-rate", fraud_rate, "Target fraud rate in (0, current rate]")->required();
  rebalance->add_option("--seed", seed, "Random seed")->required();
  rebalance->add_option("--output", output, "Output CSV")->required();

  auto* synth = app.add_subcommand("synth", "Generate a two-Gaussian synthetic dataset");
  std::size_t normals = 0, frauds = 0, dims = 0;
  double separation = 1.0;
  synth->add_option("--normals", normals, "Number of normal rows")->required();
  synth->add_option("--frauds", frauds, "Number of fraud rows")->required();
  synth->add_option("--dims", dims, "Number of features")->required();
  synth->add_option("--separation", separation, "Distance between the class means")->required();
  synth->add_option("--seed", seed, "Random seed")->required();
  synth->add_option("--output", output, "Output CSV")->required();

  std::string config_path, out;
  auto* bench = app.add_subcommand("benchmark", "Run the configured grid and write the report");
  bench->add_option("--config", config_path, "Experiment config file")->required();
  bench->add_option("--out", out, "Report CSV (defaults to [experiment] output)");

  auto* sweep = app.add_subcommand("sweep-dims", "Benchmark pca:k for every k in [min-k, max-k]");
  std::size_t min_k = 0, max_k = 0;
  sweep->add_option("--config", config_path, "Experiment config file")->required();
  sweep->add_option("--min-k", min_k, "Smallest k")->required();
  sweep->add_option("--max-k", max_k, "Largest k")->required();
  sweep->add_option("--out", out, "Report CSV; .variance.csv and .f1_curve.csv are written next to it");

  auto* noise = app.add_subcommand("noise-study", "Benchmark under symmetric label flips at each rate");
  std::vector<double> flip_rates;
  noise->add_option("--config", config_path, "Experiment config file")->required();
  noise->add_option("--flip-rates", flip_rates, "Comma-separated flip rates")->required()->delimiter(',');
  noise->add_option("--out", out, "Real-error report; .model_error.csv and .selection.csv are written next to it");

  auto* project = app.add_subcommand("project3d", "Write the first three principal-component coordinates");
  std::size_t n_components = 3;
  project->add_option("--input", input, "Input CSV")->required();
  project->add_option("--output", output, "Output CSV with V1, V2, V3 and the label")->required();
  project->add_option("--components", n_components, "Number of coordinates")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*encode) {
      Dataset d = load_csv(input, label_column);
      if (!raw_scale) d = standardize(d).first;
      const PcaModel m = fit_pca(d, components);
      write_csv(transform(m, d), output);
      std::printf("explained variance ratio %.6f with %zu of %zu components\n", m.explained_variance_ratio(),
                  m.k(), m.dims());
    } else if (*rebalance) {
      const Dataset d = load_csv(input, label_column);
      RandomSource rng(seed);
      const Dataset r = adjust_fraud_rate(d, fraud_rate, rng);
      write_csv(r, output);
      std::printf("kept %zu frauds and %zu normals (rate %.6f)\n", r.fraud_count(), r.normal_count(), r.fraud_rate());
    } else if (*synth) {
      RandomSource rng(seed);
      write_csv(make_synthetic(normals, frauds, dims, separation, rng), output);
    } else if (*bench) {
      const ExperimentConfig cfg = load_config(config_path);
      const std::string path = resolve_out(out, cfg);
      write_main_reports(run_benchmark(cfg, cli_options(quiet)), cfg, path);
    } else if (*sweep) {
      const ExperimentConfig cfg = load_config(config_path);
      const std::string path = resolve_out(out, cfg);
      const auto recs = sweep_dimensions(cfg, min_k, max_k, cli_options(quiet));
      write_main_reports(recs, cfg, path);
      write_variance_curve(variance_curve(recs), report_detail::side_path(path, ".variance.csv"));
      write_f1_curves(f1_curves(recs, 3), report_detail::side_path(path, ".f1_curve.csv"));
    } else if (*noise) {
      const ExperimentConfig cfg = load_config(config_path);
      const std::string path = resolve_out(out, cfg);
      const auto recs = noise_study(cfg, flip_rates, cli_options(quiet));
      write_report(recs, path);
      write_report(recs, report_detail::side_path(path, ".model_error.csv"), ErrorView::model);
      write_selection(select_models(recs), report_detail::side_path(path, ".selection.csv"));
      std::printf("wrote %zu records to %s\n", recs.size(), path.c_str());
    } else if (*project) {
      emit_projection(load_csv(input, label_column), n_components, output);
    }
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const ContractError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
