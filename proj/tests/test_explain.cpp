#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "credsel/explain.hpp"
#include "support.hpp"

namespace credsel {
namespace {

using testing::make_dataset;

Schema mixed_schema() {
  Schema s = testing::continuous_schema(3);
  s[1].kind = FeatureKind::ordinal_categorical;
  s[1].valid_range = {0, 4};
  return s;
}

Dataset random_mixed(Rng& rng, std::size_t n) {
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) {
    rows.push_back({uniform(rng, -2, 2), double(uniform_index(rng, 5)), uniform(rng, -2, 2)});
    y.push_back(bernoulli(rng, 0.5));
  }
  return make_dataset(rows, y, mixed_schema());
}

TEST(GlobalImportance, SingleFeatureDependence) {
  Rng rng(1);
  const Dataset d = random_mixed(rng, 100);
  const Model m = LogisticModel{{1.3, 0.0, 0.0}, 0.2};
  const GlobalImportance g = global_importance(m, d);
  EXPECT_DOUBLE_EQ(g.lambdas[0], 100.0);
  EXPECT_EQ(g.lambdas[1], 0.0);
  EXPECT_EQ(g.lambdas[2], 0.0);
}

TEST(GlobalImportance, ConstantSlopeGivesCoefficientRatio) {
  // Rows on the line 3 x1 + 4 x2 = 0 all share the same sigmoid slope.
  const Dataset d = make_dataset({{0, 0}, {4, -3}, {-4, 3}, {8, -6}}, {0, 1, 0, 1});
  const Model m = LogisticModel{{3.0, 4.0}, 0.0};
  const GlobalImportance g = global_importance(m, d);
  EXPECT_NEAR(g.lambdas[0], 300.0 / 7.0, 1e-12);
  EXPECT_NEAR(g.lambdas[1], 400.0 / 7.0, 1e-12);
}

TEST(GlobalImportance, SumsToHundredAndIgnoredInputsGetZero) {
  Rng rng(2);
  const Dataset d = random_mixed(rng, 200);
  for (int t = 0; t < 50; ++t) {
    MlpModel m = testing::random_mlp(rng, 3, t % 2 ? 2 : 5);
    for (std::size_t k = 0; k < m.hidden_units(); ++k) m.hidden_weights(k, 2) = 0.0;
    const GlobalImportance g = global_importance(m, d);
    EXPECT_NEAR(std::accumulate(g.lambdas.begin(), g.lambdas.end(), 0.0), 100.0, 1e-9);
    EXPECT_EQ(g.lambdas[2], 0.0);
    for (double l : g.lambdas) EXPECT_GE(l, 0.0);
  }
}

TEST(GlobalImportance, ConstantModelIsUndefined) {
  Rng rng(3);
  const Dataset d = random_mixed(rng, 10);
  EXPECT_THROW(global_importance(LogisticModel{{0, 0, 0}, 1.0}, d), std::domain_error);
}

TEST(GlobalImportance, PermutingInputsPermutesLambdas) {
  Rng rng(4);
  const MlpModel m = testing::random_mlp(rng, 3, 2);
  std::vector<std::vector<double>> rows, swapped;
  std::vector<int> y;
  for (int i = 0; i < 100; ++i) {
    const auto x = testing::random_point(rng, 3);
    rows.push_back(x);
    swapped.push_back({x[2], x[0], x[1]});
    y.push_back(i % 2);
  }
  MlpModel pm = m;
  for (std::size_t k = 0; k < 2; ++k) {
    pm.hidden_weights(k, 0) = m.hidden_weights(k, 2);
    pm.hidden_weights(k, 1) = m.hidden_weights(k, 0);
    pm.hidden_weights(k, 2) = m.hidden_weights(k, 1);
  }
  const auto a = global_importance(m, make_dataset(rows, y)).lambdas;
  const auto b = global_importance(pm, make_dataset(swapped, y)).lambdas;
  EXPECT_NEAR(a[2], b[0], 1e-9);
  EXPECT_NEAR(a[0], b[1], 1e-9);
  EXPECT_NEAR(a[1], b[2], 1e-9);
}

TEST(GlobalImportance, RankingSurvivesEquivalentReparameterisation) {
  // Swapping hidden units leaves f unchanged pointwise.
  Rng rng(5);
  const Dataset d = random_mixed(rng, 150);
  const MlpModel m = testing::random_mlp(rng, 3, 2);
  MlpModel swapped = m;
  for (std::size_t j = 0; j < 3; ++j) {
    swapped.hidden_weights(0, j) = m.hidden_weights(1, j);
    swapped.hidden_weights(1, j) = m.hidden_weights(0, j);
  }
  std::swap(swapped.hidden_biases[0], swapped.hidden_biases[1]);
  std::swap(swapped.output_weights[0], swapped.output_weights[1]);
  EXPECT_EQ(global_importance(m, d).ranking(), global_importance(swapped, d).ranking());
}

TEST(LocalImportance, LogisticClosedFormAndConstantModel) {
  const Model m = LogisticModel{{0.5, -2.0}, 0.1};
  const std::vector<double> x{1.0, 0.3};
  const double f = forward(m, x);
  const auto g = local_gradient_importance(m, x);
  EXPECT_NEAR(g[0], 0.5 * f * (1 - f), 1e-15);
  EXPECT_NEAR(g[1], -2.0 * f * (1 - f), 1e-15);
  for (double v : local_gradient_importance(LogisticModel{{0, 0}, 3.0}, x)) EXPECT_EQ(v, 0.0);
}

TEST(CategoricalPerturbation, ConstantModelAndBoundaries) {
  const Schema s = mixed_schema();
  const Model constant = LogisticModel{{0, 0, 0}, 0.7};
  EXPECT_EQ(*categorical_perturbation(constant, std::vector<double>{0, 2, 0}, s, 1, +1), 0.0);
  EXPECT_EQ(*categorical_perturbation(constant, std::vector<double>{0, 2, 0}, s, 1, -1), 0.0);
  EXPECT_FALSE(categorical_perturbation(constant, std::vector<double>{0, 4, 0}, s, 1, +1));
  EXPECT_FALSE(categorical_perturbation(constant, std::vector<double>{0, 0, 0}, s, 1, -1));
  EXPECT_THROW(categorical_perturbation(constant, std::vector<double>{0, 2, 0}, s, 0, 1),
               std::invalid_argument);
  EXPECT_THROW(categorical_perturbation(constant, std::vector<double>{0, 2, 0}, s, 1, 2),
               std::invalid_argument);
}

TEST(CategoricalPerturbation, SignedDifference) {
  const Model m = LogisticModel{{0, 1.0, 0}, 0.0};
  const std::vector<double> x{0, 1, 0};
  EXPECT_NEAR(*categorical_perturbation(m, x, mixed_schema(), 1, +1), sigmoid(2) - sigmoid(1),
              1e-15);
  EXPECT_NEAR(*categorical_perturbation(m, x, mixed_schema(), 1, -1), sigmoid(0) - sigmoid(1),
              1e-15);
}

TEST(CategoricalDelta, DominantPicksLargerMagnitude) {
  EXPECT_EQ(*(CategoricalDelta{0, -0.3, 0.1}.dominant()), -0.3);
  EXPECT_EQ(*(CategoricalDelta{0, std::nullopt, 0.1}.dominant()), 0.1);
  EXPECT_FALSE((CategoricalDelta{0, std::nullopt, std::nullopt}.dominant()));
}

TEST(LocalExplanation, OnlyCategoricalDeltas) {
  Rng rng(6);
  const Dataset d = random_mixed(rng, 5);
  const LocalExplanation e = local_explanation(testing::random_mlp(rng, 3, 2), d, 3);
  EXPECT_EQ(e.sample_index, 3u);
  EXPECT_EQ(e.gradient_importances.size(), 3u);
  ASSERT_EQ(e.categorical_deltas.size(), 1u);
  EXPECT_EQ(e.categorical_deltas[0].feature, 1u);
  EXPECT_THROW(local_explanation(LogisticModel{{0, 0, 0}, 0}, d, 5), std::out_of_range);
}

TEST(PatternReport, SharesSumToOneAndDominanceFlag) {
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 10; ++i) {
    rows.push_back({0.0, i < 8 ? 2.0 : 1.0, 0.0});
    y.push_back(0);
  }
  const Dataset d = make_dataset(rows, y, mixed_schema());
  const Model lr = LogisticModel{{0, 0.5, 0}, 0.0};
  const Model nn = LogisticModel{{0, 1.0, 0}, 0.0};
  std::vector<std::size_t> rejected(10);
  std::iota(rejected.begin(), rejected.end(), std::size_t{0});
  const PatternReport r = pattern_report_for(rejected, nn, lr, d, 0.5);
  ASSERT_EQ(r.patterns.size(), 1u);
  double total = 0.0;
  for (const auto& v : r.patterns[0].values) total += v.share;
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_EQ(r.patterns[0].values[1].value, 2.0);
  EXPECT_DOUBLE_EQ(r.patterns[0].values[1].share, 0.8);
  EXPECT_TRUE(r.patterns[0].values[1].dominant);
  EXPECT_FALSE(r.patterns[0].values[0].dominant);
  ASSERT_EQ(r.scatter.size(), 1u);
  EXPECT_EQ(r.scatter[0].second.size(), 10u);
  EXPECT_NEAR(r.scatter[0].second[0].lr_output, sigmoid(1.0), 1e-15);
}

TEST(PatternReport, UniformLevelsNoneDominant) {
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    rows.push_back({0.0, double(i % 4), 0.0});
    y.push_back(1);
  }
  const Dataset d = make_dataset(rows, y, mixed_schema());
  std::vector<std::size_t> rejected(40);
  std::iota(rejected.begin(), rejected.end(), std::size_t{0});
  const Model m = LogisticModel{{0, 0, 0}, 0};
  const PatternReport r = pattern_report_for(rejected, m, m, d, 0.5);
  for (const auto& v : r.patterns[0].values) {
    EXPECT_DOUBLE_EQ(v.share, 0.25);
    EXPECT_FALSE(v.dominant);
  }
  EXPECT_TRUE(r.scatter.empty());
}

TEST(PatternReport, SingletonAndEmpty) {
  Rng rng(7);
  const Dataset d = random_mixed(rng, 5);
  const Model m = LogisticModel{{0, 0, 0}, 0};
  const PatternReport one = pattern_report_for(std::vector<std::size_t>{2}, m, m, d, 0.5);
  ASSERT_EQ(one.patterns[0].values.size(), 1u);
  EXPECT_EQ(one.patterns[0].values[0].share, 1.0);
  const PatternReport none = pattern_report_for(std::vector<std::size_t>{}, m, m, d, 0.5);
  EXPECT_TRUE(none.empty);
  EXPECT_TRUE(none.patterns.empty());
  // Accept-everything Difference Net: G(x) = 1 everywhere.
  EXPECT_TRUE(pattern_report(LogisticModel{{0, 0, 0}, 5.0}, m, m, d).empty);
}

TEST(AveragePerturbation, MeansOverMatchingRows) {
  std::vector<std::vector<double>> rows{{0, 2, 0}, {0, 2, 0}, {0, 1, 0}, {0, 0, 0}};
  const Dataset d = make_dataset(rows, {0, 0, 0, 0}, mixed_schema());
  const Model m = LogisticModel{{0, 1.0, 0}, 0.0};
  const std::vector<std::size_t> idx{0, 1, 2, 3};
  const auto s = average_perturbation(m, d, idx, 1, 2.0, -1);
  EXPECT_EQ(s.samples, 2u);
  EXPECT_NEAR(s.mean_delta, sigmoid(1) - sigmoid(2), 1e-15);
  EXPECT_NEAR(s.mean_abs_delta, sigmoid(2) - sigmoid(1), 1e-15);
  EXPECT_EQ(average_perturbation(m, d, idx, 1, 0.0, -1).samples, 0u);
}

TEST(LogitShape, LogisticIsAffineAndConstantIsFlat) {
  Rng rng(8);
  const Dataset d = random_mixed(rng, 50);
  const std::vector<double> grid{0, 1, 2, 3, 4};
  const auto curve = logit_shape(LogisticModel{{0.4, -0.7, 1.1}, 0.3}, d, 1, grid);
  for (std::size_t k = 1; k + 1 < curve.size(); ++k) {
    EXPECT_NEAR(curve[k + 1].mean_logit - curve[k].mean_logit,
                curve[k].mean_logit - curve[k - 1].mean_logit, 1e-9);
  }
  EXPECT_NEAR(curve[1].mean_logit - curve[0].mean_logit, -0.7, 1e-9);
  for (const auto& pt : logit_shape(LogisticModel{{0, 0, 0}, 0.9}, d, 1, grid)) {
    EXPECT_NEAR(pt.mean_logit, 0.9, 1e-12);
  }
}

TEST(LogitShape, RejectsBadArguments) {
  Rng rng(9);
  const Dataset d = random_mixed(rng, 5);
  const Model m = LogisticModel{{0, 0, 0}, 0};
  EXPECT_THROW(logit_shape(m, d, 1, std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(logit_shape(m, d, 0, std::vector<double>{0}), std::invalid_argument);
  EXPECT_THROW(logit_shape(m, d, 1, std::vector<double>{5}), std::invalid_argument);
}

}  // namespace
}  // namespace credsel
