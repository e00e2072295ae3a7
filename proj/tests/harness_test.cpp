#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "fraudbench/harness/benchmark.hpp"
#include "fraudbench/harness/config.hpp"
#include "fraudbench/harness/report.hpp"
#include "test_util.hpp"

using namespace fraudbench;
using namespace fraudbench::harness;

namespace {

ExperimentConfig small_config(std::initializer_list<ClassifierKind> kinds) {
  ExperimentConfig cfg;
  cfg.id = "t";
  cfg.base_seed = 17;
  cfg.dataset.synthetic = SyntheticSpec{400, 100, 5, 1.5};
  cfg.classifiers.clear();
  for (auto k : kinds) cfg.classifiers.push_back(make_classifier_spec(k));
  return cfg;
}

Dataset synthetic(std::size_t normals, std::size_t frauds, std::size_t dims, double sep, std::uint64_t seed) {
  RandomSource rng(seed);
  Dataset d = make_synthetic(normals, frauds, dims, sep, rng);
  d.provenance = "synthetic";
  return d;
}

// Report text without the two trailing wall-time columns.
std::string without_times(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    for (int i = 0; i < 2; ++i) line = line.substr(0, line.rfind(','));
    out += line + '\n';
  }
  return out;
}

const char* kFullConfig = R"(# sample
[experiment]
id = demo
base_seed = 7
standardize = false

[dataset]
synthetic_normals = 300
synthetic_frauds = 60
synthetic_dims = 4
synthetic_separation = 2
fraud_rates = native, 0.05

[representations]
list = raw, pca:2, pca:all

[split]
test_fraction = 0.25
folds = 3

[noise]
flip_fraud_to_normal = 0.1
flip_normal_to_fraud = 0.01
apply_to = both

[sampler]
method = none

[sampler]
method = smote
k_neighbors = 3
target_ratio = 0.5

[classifier]
kind = knn
k = 3

[classifier]
kind = gaussian_nb
)";

}  // namespace

TEST(Config, ParsesEverySection) {
  const ExperimentConfig cfg = parse_config(kFullConfig);
  EXPECT_EQ(cfg.id, "demo");
  EXPECT_EQ(cfg.base_seed, 7u);
  EXPECT_FALSE(cfg.standardize);
  ASSERT_TRUE(cfg.dataset.synthetic.has_value());
  EXPECT_EQ(cfg.dataset.synthetic->normals, 300u);
  EXPECT_EQ(cfg.dataset.synthetic->dims, 4u);
  ASSERT_EQ(cfg.fraud_rates.size(), 2u);
  EXPECT_TRUE(cfg.fraud_rates[0].native);
  EXPECT_EQ(cfg.fraud_rates[1].rate, 0.05);
  ASSERT_EQ(cfg.representations.size(), 3u);
  EXPECT_EQ(cfg.representations[1], (Representation{true, 2}));
  EXPECT_EQ(cfg.representations[2].label(4, false), "pca:4");
  EXPECT_EQ(cfg.representations[2].label(4, true), "pca:4/std");
  EXPECT_EQ(cfg.test_fraction, 0.25);
  EXPECT_EQ(cfg.folds, 3u);
  EXPECT_EQ(cfg.noise.flip_fraud_to_normal, 0.1);
  EXPECT_EQ(cfg.noise_site, NoiseSite::both);
  ASSERT_EQ(cfg.samplers.size(), 2u);
  EXPECT_EQ(cfg.samplers[1].method, SamplerMethod::smote);
  EXPECT_EQ(cfg.samplers[1].k_neighbors, 3u);
  ASSERT_EQ(cfg.classifiers.size(), 2u);
  EXPECT_EQ(cfg.classifiers[0].count_param("k"), 3u);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, RejectsMalformedInput) {
  auto fails = [](const std::string& text, const std::string& fragment) {
    try {
      parse_config(text, "c.cfg").validate();
    } catch (const ContractError& e) {
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
      return;
    }
    ADD_FAILURE() << "no error for: " << text;
  };
  const std::string base = "[dataset]\nsynthetic_normals = 10\nsynthetic_dims = 2\n[classifier]\nkind = knn\n";
  fails(base + "[experiment]\nseed = 3\n", "unknown key 'seed'");
  fails(base + "[experiment]\nid = a\nid = b\n", "c.cfg:8: duplicate key 'id'");
  fails(base + "[model]\nkind = knn\n", "unknown section [model]");
  fails(base + "[split]\nfolds = 2\n[split]\nfolds = 3\n", "appears more than once");
  fails(base + "[split]\nfolds = two\n", "expects a number");
  fails(base + "[classifier]\nkind = knn\nneighbours = 3\n", "no hyperparameter 'neighbours'");
  fails(base + "[classifier]\nkind = knn\n", "duplicate classifier");
  fails(base + "[sampler]\nmethod = tomek\n", "unknown sampler method");
  fails(base + "[representations]\nlist = raw, pca:x\n", "pca:<k>");
  fails(base + "[noise]\napply_to = everywhere\n", "apply_to");
  fails("[classifier]\nkind = knn\n", "needs either path");
  fails(base + "orphan\n", "expected key = value");
  fails("[dataset]\nsynthetic_normals = 10\nsynthetic_dims = 2\n", "at least one entry");
  EXPECT_THROW(load_config("/nonexistent/dir/x.cfg"), DataError);
  EXPECT_THROW(parse_config("[dataset]\npath = /nonexistent/data.csv\n[classifier]\nkind = knn\n").validate(), DataError);
}

TEST(Benchmark, GridCardinalityAndUniqueCells) {
  ExperimentConfig cfg = small_config({ClassifierKind::knn, ClassifierKind::gaussian_nb});
  cfg.representations = {Representation{}, Representation{true, 3}};
  const auto recs = run_benchmark(cfg);
  ASSERT_EQ(recs.size(), 20u);
  std::set<std::tuple<std::size_t, std::string, std::string, std::string>> cells;
  for (const auto& r : recs) EXPECT_TRUE(cells.insert({r.fold, r.representation, r.sampler, r.classifier}).second);
  EXPECT_EQ(recs[0].representation, "raw/std");
  EXPECT_EQ(recs[2].representation, "pca:3/std");
  EXPECT_EQ(recs[0].classifier, "knn[k=5]");
  EXPECT_EQ(recs[0].dataset, "synthetic");
}

TEST(Benchmark, DummyPathologyAtTwoPerThousand) {
  ExperimentConfig cfg = small_config({ClassifierKind::dummy_majority});
  cfg.dataset.synthetic = SyntheticSpec{9980, 20, 4, 1.0};
  const auto recs = run_benchmark(cfg);
  ASSERT_EQ(recs.size(), 5u);
  for (const auto& r : recs) {
    EXPECT_GE(*r.metrics.accuracy, 0.998);
    EXPECT_EQ(*r.metrics.g_mean, 0.0);
    EXPECT_EQ(*r.metrics.recall, 0.0);
    EXPECT_FALSE(r.metrics.f1.has_value());
  }
}

TEST(Benchmark, KnnIdenticalUnderFullPca) {
  ExperimentConfig cfg = small_config({ClassifierKind::knn});
  cfg.representations = {Representation{}, Representation{true, 0}};
  RunOptions opt;
  opt.keep_predictions = true;
  const auto recs = run_benchmark(cfg, opt);
  ASSERT_EQ(recs.size(), 10u);
  for (std::size_t f = 0; f < 5; ++f) {
    EXPECT_EQ(recs[2 * f].representation, "raw/std");
    EXPECT_EQ(recs[2 * f + 1].representation, "pca:5/std");
    EXPECT_EQ(recs[2 * f].predictions, recs[2 * f + 1].predictions) << "fold " << f;
  }
}

TEST(Benchmark, TestRowsDoNotInfluenceFitting) {
  // Perturb half of fold 0's test rows; predictions for the other half must
  // not move, so nothing fitted (scaling, PCA, sampler, model) saw them.
  ExperimentConfig cfg = small_config({ClassifierKind::knn, ClassifierKind::logistic_regression});
  cfg.folds = 1;
  cfg.representations = {Representation{true, 3}};
  SamplerSpec smote;
  smote.method = SamplerMethod::smote;
  cfg.samplers = {smote};
  RunOptions opt;
  opt.keep_predictions = true;
  const Dataset base = synthetic(400, 100, 5, 1.5, 3);
  const auto a = run_benchmark(cfg, base, opt);
  Dataset changed = base;
  const auto& test_rows = a[0].test_indices;
  for (std::size_t i = 0; i < test_rows.size(); i += 2)
    for (std::size_t j = 0; j < changed.dims(); ++j) changed.features(test_rows[i], j) = 1000.0 * (j + 1);
  const auto b = run_benchmark(cfg, changed, opt);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t c = 0; c < a.size(); ++c) {
    EXPECT_EQ(a[c].test_indices, b[c].test_indices);
    EXPECT_EQ(a[c].train_rows, b[c].train_rows);
    for (std::size_t i = 1; i < test_rows.size(); i += 2) EXPECT_EQ(a[c].predictions[i], b[c].predictions[i]);
  }
}

TEST(Benchmark, SamplersAndNoiseLeaveTestTruthAlone) {
  ExperimentConfig cfg = small_config({ClassifierKind::gaussian_nb});
  SamplerSpec over, under;
  over.method = SamplerMethod::random_over;
  under.method = SamplerMethod::random_under;
  cfg.samplers = {over, under};
  cfg.noise = NoiseSpec{0.3, 0.3};
  cfg.noise_site = NoiseSite::both;
  RunOptions opt;
  opt.keep_predictions = true;
  const Dataset base = synthetic(400, 100, 5, 1.5, 3);
  const auto recs = run_benchmark(cfg, base, opt);
  for (const auto& r : recs) {
    ASSERT_EQ(r.test_rows, 100u);
    Labels expected;
    for (auto i : r.test_indices) expected.push_back(base.labels[i]);
    EXPECT_EQ(r.test_truth, expected);
    EXPECT_NE(r.test_annotations, r.test_truth);
    EXPECT_GT(r.flips.fraud_to_normal + r.flips.normal_to_fraud, 0u);
    EXPECT_NE(r.metrics, r.model_metrics);
  }
  // oversampling grows the training side, undersampling shrinks it; test untouched
  EXPECT_GT(recs[0].train_rows, 400u);
  EXPECT_LT(recs[1].train_rows, 400u);
}

TEST(Benchmark, ReportsAreDeterministic) {
  ExperimentConfig cfg = small_config({ClassifierKind::random_forest, ClassifierKind::sgd_hinge});
  cfg.fraud_rates = {FraudRateTarget{}, FraudRateTarget{false, 0.1}};
  SamplerSpec smote;
  smote.method = SamplerMethod::smote;
  cfg.samplers = {SamplerSpec{}, smote};
  cfg.noise = NoiseSpec{0.05, 0.05};
  cfg.noise_site = NoiseSite::train;
  const auto dir = testutil::scratch_dir("harness_det");
  write_report(run_benchmark(cfg), (dir / "a.csv").string());
  write_report(run_benchmark(cfg), (dir / "b.csv").string());
  const std::string a = testutil::read_file((dir / "a.csv").string());
  const std::string b = testutil::read_file((dir / "b.csv").string());
  EXPECT_EQ(without_times(a), without_times(b));
  EXPECT_EQ(a.substr(0, a.find('\n')), kReportHeader);
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1 + 2 * 5 * 2 * 2);

  cfg.base_seed = 18;
  write_report(run_benchmark(cfg), (dir / "c.csv").string());
  EXPECT_NE(without_times(a), without_times(testutil::read_file((dir / "c.csv").string())));
}

TEST(Benchmark, ErrorsCarryCellCoordinates) {
  ExperimentConfig cfg = small_config({ClassifierKind::qda});
  cfg.classifiers = {make_classifier_spec(ClassifierKind::qda, {{"reg", 0}})};
  Dataset base = synthetic(50, 20, 2, 1.0, 1);
  for (std::size_t i = 50; i < 70; ++i) base.features(i, 0) = base.features(i, 1) = 1.0;  // frauds collapse to a point
  cfg.standardize = false;
  try {
    run_benchmark(cfg, base);
    FAIL();
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("fold:0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("classifier qda"), std::string::npos) << msg;
    EXPECT_NE(msg.find("representation raw"), std::string::npos) << msg;
  }
}

TEST(Sweep, CardinalityAndMonotoneVariance) {
  ExperimentConfig cfg = small_config({ClassifierKind::gaussian_nb, ClassifierKind::knn, ClassifierKind::decision_tree,
                                       ClassifierKind::logistic_regression});
  cfg.folds = 2;
  const Dataset base = synthetic(300, 80, 6, 1.5, 5);
  const auto recs = sweep_dimensions(cfg, base, 2, 6);
  EXPECT_EQ(recs.size(), 5u * 4u * 2u);
  std::set<std::string> groups;
  for (const auto& r : recs) groups.insert(r.representation);
  EXPECT_EQ(groups.size(), 5u);
  const auto curve = variance_curve(recs);
  ASSERT_EQ(curve.size(), 5u);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_EQ(curve[i].k, curve[i - 1].k + 1);
    EXPECT_GE(curve[i].explained_variance_ratio, curve[i - 1].explained_variance_ratio);
  }
  EXPECT_NEAR(curve.back().explained_variance_ratio, 1.0, 1e-8);

  const auto f1 = f1_curves(recs, 3);
  std::set<std::string> top;
  for (const auto& p : f1) top.insert(p.classifier);
  EXPECT_EQ(top.size(), 3u);
  EXPECT_EQ(f1.size(), 15u);
  EXPECT_THROW(sweep_dimensions(cfg, base, 0, 3), ContractError);
  EXPECT_THROW(sweep_dimensions(cfg, base, 2, 7), ContractError);
}

TEST(NoiseStudy, RecordsPerRateAndSelection) {
  ExperimentConfig cfg = small_config({ClassifierKind::gaussian_nb, ClassifierKind::dummy_majority});
  cfg.folds = 2;
  const Dataset base = synthetic(300, 80, 3, 2.0, 6);
  const auto recs = noise_study(cfg, base, {0.0, 0.2});
  ASSERT_EQ(recs.size(), 8u);
  EXPECT_EQ(recs[0].experiment_id, "t@eps=0");
  EXPECT_EQ(recs[4].experiment_id, "t@eps=0.2");
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(recs[i].metrics, recs[i].model_metrics);
  const auto sel = select_models(recs);
  ASSERT_EQ(sel.size(), 4u);
  EXPECT_EQ(sel[0].criterion, "zero_one");
  EXPECT_EQ(sel[1].criterion, "one_minus_g_mean");
  EXPECT_EQ(sel[1].best_by_real, "raw/std/none/gaussian_nb[var_smoothing=1e-09]");
}

TEST(Projection, ShapeAndInvariantDataset) {
  // columns of an 8x8 Hadamard matrix are centered and mutually orthogonal;
  // scaled by 5, 4, 3, 2 they are already principal axes in order
  const int h[8][4] = {{1, 1, 1, 1},    {-1, 1, -1, 1}, {1, -1, -1, 1}, {-1, -1, 1, 1},
                       {1, 1, 1, -1},   {-1, 1, -1, -1}, {1, -1, -1, -1}, {-1, -1, 1, -1}};
  Dataset d;
  std::vector<double> v;
  for (auto& row : h)
    for (int j = 0; j < 4; ++j) v.push_back(row[j] * (5.0 - j));
  d.features = Matrix(8, 4, v);
  d.labels = {0, 1, 0, 0, 1, 0, 0, 1};
  d.feature_names = default_feature_names(4, "X");
  const auto dir = testutil::scratch_dir("projection");
  const std::string path = (dir / "p.csv").string();
  const Dataset p = emit_projection(d, 3, path);
  const Dataset back = load_csv(path);
  EXPECT_EQ(back.size(), 8u);
  EXPECT_EQ(back.dims(), 3u);
  EXPECT_EQ(back.feature_names, (std::vector<std::string>{"V1", "V2", "V3"}));
  EXPECT_EQ(back.labels, d.labels);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(back.features(i, j), d.features(i, j), 1e-12);
  EXPECT_THROW(emit_projection(d, 5, path), ContractError);
}

TEST(Projection, AnyDatasetKeepsRows) {
  const Dataset d = synthetic(90, 10, 6, 1.0, 2);
  const auto dir = testutil::scratch_dir("projection2");
  const Dataset p = emit_projection(d, 3, (dir / "p.csv").string());
  EXPECT_EQ(p.size(), 100u);
  const std::string text = testutil::read_file((dir / "p.csv").string());
  EXPECT_EQ(text.substr(0, text.find('\n')), "V1,V2,V3,Class");
}
