#include <gtest/gtest.h>

#include <cmath>

#include "credsel/metrics.hpp"
#include "credsel/selective.hpp"
#include "support.hpp"

namespace credsel {
namespace {

using testing::make_dataset;

TEST(SelectiveLabels, PracticalRejectsOnlyWhenNetworkIsRight) {
  const std::vector<int> nn{1, 1, 0, 0, 1};
  const std::vector<int> lr{0, 0, 1, 1, 1};
  const std::vector<int> y{1, 0, 0, 1, 0};
  const auto practical = selective_labels_from_predictions(nn, lr, y, SelectiveVariant::practical);
  const auto ideal = selective_labels_from_predictions(nn, lr, y, SelectiveVariant::ideal);
  EXPECT_EQ(practical.z, (std::vector<int>{0, 1, 0, 1, 1}));
  EXPECT_EQ(ideal.z, (std::vector<int>{0, 0, 0, 0, 1}));
  EXPECT_EQ(practical.rejected_count(), 2u);
}

TEST(SelectiveLabels, IdenticalModelsAcceptEverything) {
  Rng rng(1);
  const Model m = testing::random_mlp(rng, 2, 2);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 100; ++i) {
    rows.push_back(testing::random_point(rng, 2));
    y.push_back(i % 2);
  }
  const Dataset d = make_dataset(rows, y);
  for (auto v : {SelectiveVariant::ideal, SelectiveVariant::practical}) {
    EXPECT_EQ(make_selective_labels(m, m, d, {}, v).rejected_count(), 0u);
  }
}

TEST(SelectiveLabels, IdealRejectsContainPracticalRejects) {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    std::vector<int> nn(60), lr(60), y(60);
    for (std::size_t i = 0; i < 60; ++i) {
      nn[i] = bernoulli(rng, 0.5);
      lr[i] = bernoulli(rng, 0.5);
      y[i] = bernoulli(rng, 0.5);
    }
    const auto p = selective_labels_from_predictions(nn, lr, y, SelectiveVariant::practical);
    const auto i = selective_labels_from_predictions(nn, lr, y, SelectiveVariant::ideal);
    for (std::size_t k = 0; k < 60; ++k) {
      if (p.z[k] == 0) EXPECT_EQ(i.z[k], 0);
    }
  }
}

TEST(SelectiveLabels, RecomputedFromStoredPredictions) {
  Rng rng(3);
  const Model nn = testing::random_mlp(rng, 3, 2, 2.0);
  const Model lr = testing::random_logistic(rng, 3);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 200; ++i) {
    rows.push_back(testing::random_point(rng, 3));
    y.push_back(bernoulli(rng, 0.4));
  }
  const Dataset d = make_dataset(rows, y);
  const auto z = make_selective_labels(nn, lr, d, {}, SelectiveVariant::practical);
  const auto again = selective_labels_from_predictions(model_predictions(nn, d),
                                                       model_predictions(lr, d), d.labels(),
                                                       SelectiveVariant::practical);
  EXPECT_EQ(z, again);
}

TEST(SelectiveLabels, DimensionMismatchIsAValidationError) {
  const Dataset d = make_dataset({{1, 2}}, {1});
  const Model lr = LogisticModel{{1.0}, 0.0};
  const Model nn = LogisticModel{{1.0, 1.0}, 0.0};
  EXPECT_THROW(make_selective_labels(nn, lr, d, {}, SelectiveVariant::ideal), ValidationError);
}

TEST(AcceptanceOracle, Examples) {
  EXPECT_DOUBLE_EQ(acceptance_oracle(0.9, 0.9), 1.0);
  EXPECT_DOUBLE_EQ(acceptance_oracle(1.0, 0.0), 0.0);
  EXPECT_NEAR(acceptance_oracle(0.8, 0.3), 0.5, 1e-15);
  EXPECT_THROW(acceptance_oracle(1.2, 0.3), std::invalid_argument);
  EXPECT_THROW(acceptance_oracle(0.2, -0.1), std::invalid_argument);
}

TEST(PracticalAcceptanceOracle, Examples) {
  EXPECT_EQ(practical_acceptance_oracle(0.42, 1, 1), 1.0);
  EXPECT_EQ(practical_acceptance_oracle(0.42, 0, 0), 1.0);
  EXPECT_NEAR(practical_acceptance_oracle(0.7, 1, 0), 0.3, 1e-15);
  EXPECT_EQ(practical_acceptance_oracle(0.0, 0, 1), 0.0);
  EXPECT_THROW(practical_acceptance_oracle(1.5, 0, 1), std::invalid_argument);
}

TEST(PracticalAcceptanceOracle, MatchesBernoulliSimulation) {
  Rng rng(4);
  const int draws = 100000;
  int accepted = 0;
  for (int k = 0; k < draws; ++k) {
    const int y = bernoulli(rng, 0.7);
    accepted += selective_labels_from_predictions(std::vector<int>{1}, std::vector<int>{0},
                                                  std::vector<int>{y}, SelectiveVariant::practical)
                    .z[0];
  }
  const double se = std::sqrt(0.3 * 0.7 / draws);
  EXPECT_NEAR(double(accepted) / draws, 0.3, 3 * se);
}

TEST(CoupledAgreementLabels, MeanMatchesAcceptanceOracle) {
  Rng rng(5);
  const int draws = 200000;
  for (auto [f, g] : {std::pair{0.8, 0.3}, std::pair{0.1, 0.15}, std::pair{0.5, 0.5}}) {
    std::vector<double> a(draws, f), b(draws, g);
    const auto z = coupled_agreement_labels(a, b, rng);
    double mean = 0.0;
    for (int v : z) mean += v;
    mean /= draws;
    const double target = acceptance_oracle(f, g);
    const double se = std::sqrt(std::max(target * (1 - target), 1e-12) / draws);
    EXPECT_NEAR(mean, target, 3 * se + 1e-12) << f << " vs " << g;
  }
}

TEST(DifferenceNet, AllAcceptLabelsGiveConstantAcceptModel) {
  const Dataset d = make_dataset({{1}, {2}, {3}}, {0, 1, 0});
  const SelectiveLabels z{{1, 1, 1}, SelectiveVariant::practical};
  const TrainResult g = train_difference_net(d, z, {});
  EXPECT_TRUE(g.trace.degenerate);
  EXPECT_EQ(std::get<MlpModel>(g.model).hidden_units(), 5u);
  const RejectionSummary s = rejection_summary(g.model, d, Threshold{}, g.model, g.model);
  EXPECT_EQ(s.rejection_rate, 0.0);
  EXPECT_TRUE(s.rejected_indices.empty());
}

TEST(DifferenceNet, LengthMismatchThrows) {
  const Dataset d = make_dataset({{1}, {2}}, {0, 1});
  EXPECT_THROW(train_difference_net(d, {{1}, SelectiveVariant::ideal}, {}), std::invalid_argument);
}

TEST(RejectionSummary, RateAndDirectionBreakdown) {
  // G(x) = 0 exactly for x < 0.
  const Model g = LogisticModel{{50.0}, 0.0};
  const Dataset d = make_dataset({{-1}, {-2}, {-3}, {1}, {2}}, {0, 0, 0, 0, 0});
  const std::vector<int> nn{1, 0, 1, 1, 0};
  const std::vector<int> lr{0, 1, 1, 0, 1};
  const RejectionSummary s = rejection_summary(g, d, Threshold{}, nn, lr);
  EXPECT_EQ(s.rejected_indices, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(s.rejection_rate, 3.0 / 5.0);
  EXPECT_EQ(s.nn_default_lr_non_default, 1u);
  EXPECT_EQ(s.nn_non_default_lr_default, 1u);
  EXPECT_EQ(s.models_agree, 1u);
  EXPECT_DOUBLE_EQ(s.nn_default_share(), 1.0 / 3.0);
  EXPECT_EQ(s.indices_csv(), "index\n0\n1\n2\n");
}

}  // namespace
}  // namespace credsel
