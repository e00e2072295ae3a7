#include <gtest/gtest.h>

#include <cmath>

#include "fraudbench/classifier.hpp"
#include "fraudbench/pca.hpp"
#include "oracles.hpp"

using namespace fraudbench;

namespace {

Dataset from_rows(std::size_t d, std::vector<double> values, Labels labels) {
  Dataset out;
  out.features = Matrix(labels.size(), d, std::move(values));
  out.labels = std::move(labels);
  out.feature_names = default_feature_names(d, "X");
  return out;
}

Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
  RandomSource rng(seed);
  Dataset out = make_synthetic(n - n / 5, n / 5, d, 2.0, rng);
  // correlate the columns so the rotation is non-trivial
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 1; j < d; ++j) out.features(i, j) += 0.7 * out.features(i, j - 1) * static_cast<double>(j);
  return out;
}

double column_variance(const Matrix& m, std::size_t c) {
  double mean = 0, var = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) mean += m(i, c);
  mean /= static_cast<double>(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) var += std::pow(m(i, c) - mean, 2);
  return var / static_cast<double>(m.rows() - 1);
}

}  // namespace

TEST(Pca, CollinearPoints) {
  const Dataset d = from_rows(2, {0, 0, 1, 1, 2, 2, 5, 5}, {0, 0, 1, 1});
  const PcaModel m = fit_pca(d, 1);
  EXPECT_NEAR(m.components(0, 0), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(m.components(0, 1), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(m.explained_variance_ratio(), 1.0, 1e-12);
}

TEST(Pca, SquareHasEqualVariances) {
  // covariance of {(+-1, +-1)} is diag(4/3, 4/3): two equal eigenvalues
  const Dataset d = from_rows(2, {1, 1, 1, -1, -1, 1, -1, -1}, {0, 0, 1, 1});
  const PcaModel m = fit_pca(d, 2);
  EXPECT_NEAR(m.explained_variance[0], 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(m.explained_variance[1], 4.0 / 3.0, 1e-12);
}

TEST(Pca, FullRankVarianceIsComplete) {
  const Dataset d = random_dataset(120, 6, 1);
  const PcaModel m = fit_pca(d, 6);
  double total = 0;
  for (std::size_t j = 0; j < 6; ++j) total += column_variance(d.features, j);
  double ev = 0;
  for (double v : m.explained_variance) ev += v;
  EXPECT_NEAR(ev, total, 1e-8 * total);
  EXPECT_NEAR(m.explained_variance_ratio(), 1.0, 1e-12);
}

TEST(Pca, ComponentsOrthonormalAndVarianceOrdered) {
  const PcaModel m = fit_pca(random_dataset(200, 7, 2), 5);
  for (std::size_t a = 0; a < m.k(); ++a) {
    for (std::size_t b = 0; b < m.k(); ++b)
      EXPECT_NEAR(dot(m.components.row(a), m.components.row(b)), a == b ? 1.0 : 0.0, 1e-8);
    if (a > 0) {
      EXPECT_LE(m.explained_variance[a], m.explained_variance[a - 1]);
    }
    EXPECT_GE(m.explained_variance[a], 0.0);
  }
}

TEST(Pca, ExplainedVarianceEqualsProjectedColumnVariance) {
  const Dataset d = random_dataset(150, 5, 3);
  const PcaModel m = fit_pca(d, 5);
  const Dataset t = transform(m, d);
  for (std::size_t c = 0; c < 5; ++c) EXPECT_NEAR(column_variance(t.features, c), m.explained_variance[c], 1e-8);
}

TEST(Pca, FullRotationPreservesDistances) {
  const Dataset d = random_dataset(60, 4, 4);
  const Dataset t = transform(fit_pca(d, 4), d);
  for (std::size_t a = 0; a < d.size(); ++a)
    for (std::size_t b = a + 1; b < d.size(); ++b)
      EXPECT_NEAR(std::sqrt(squared_distance(d.features.row(a), d.features.row(b))),
                  std::sqrt(squared_distance(t.features.row(a), t.features.row(b))), 1e-8);
}

TEST(Pca, InverseReconstructs) {
  const Dataset d = random_dataset(80, 5, 5);
  const PcaModel m = fit_pca(d, 5);
  const Matrix back = inverse_transform(m, project(m, d.features));
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.dims(); ++j) EXPECT_NEAR(back(i, j), d.features(i, j), 1e-8);
}

TEST(Pca, ShapeNamesAndLabels) {
  const Dataset d = random_dataset(50, 4, 6);
  const Dataset t = transform(fit_pca(d, 1), d);
  EXPECT_EQ(t.dims(), 1u);
  EXPECT_EQ(t.feature_names, (std::vector<std::string>{"V1"}));
  EXPECT_EQ(t.labels, d.labels);
  const Dataset t3 = transform(fit_pca(d, 3), d);
  EXPECT_EQ(t3.feature_names, (std::vector<std::string>{"V1", "V2", "V3"}));
}

TEST(Pca, ContractErrors) {
  const Dataset d = random_dataset(10, 3, 7);
  EXPECT_THROW(fit_pca(d, 0), ContractError);
  EXPECT_THROW(fit_pca(d, 4), ContractError);
  const Dataset tiny = from_rows(3, {1, 2, 3, 4, 5, 6}, {0, 1});
  EXPECT_THROW(fit_pca(tiny, 2), ContractError);  // k > n - 1
  const PcaModel m = fit_pca(d, 2);
  EXPECT_THROW(transform(m, random_dataset(10, 4, 8)), ContractError);
}

TEST(Pca, KnnPredictionsInvariantUnderFullRotation) {
  RandomSource rng(21);
  Dataset all = make_synthetic(400, 100, 6, 1.5, rng);
  const auto [std_all, params] = standardize(all);
  std::vector<std::size_t> tr, te;
  for (std::size_t i = 0; i < std_all.size(); ++i) (i % 5 == 0 ? te : tr).push_back(i);
  const Dataset train_raw = std_all.subset(tr), test_raw = std_all.subset(te);
  const PcaModel m = fit_pca(train_raw, 6);
  const auto spec = make_classifier_spec(ClassifierKind::knn);
  const auto raw_pred = predict(train(spec, train_raw, rng), test_raw.features);
  const auto pca_pred = predict(train(spec, transform(m, train_raw), rng), transform(m, test_raw).features);
  EXPECT_EQ(raw_pred, pca_pred);
}
