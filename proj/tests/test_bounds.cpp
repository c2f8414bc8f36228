#include <gtest/gtest.h>

#include <cmath>

#include "credsel/bounds.hpp"

namespace credsel {
namespace {

TEST(TrainBound, ClosedFormValues) {
  EXPECT_NEAR(train_bound(22500, 0.01), 2 * std::exp(-4.5), 1e-15);
  EXPECT_NEAR(train_bound(22500, 0.01), 0.02222, 5e-6);
  EXPECT_LT(train_bound(100, 1.0), 1e-80);
  EXPECT_NEAR(train_bound(1, 1e-9), 2.0, 1e-12);
  EXPECT_TRUE(vacuous(train_bound(1, 1e-9)));
  EXPECT_FALSE(vacuous(train_bound(22500, 0.01)));
}

TEST(TrainBound, StrictlyDecreasing) {
  for (std::int64_t n = 10; n < 10000; n *= 3) {
    EXPECT_GT(train_bound(n, 0.05), train_bound(n + 1, 0.05));
    EXPECT_GT(train_bound(n, 0.05), train_bound(n, 0.051));
  }
}

TEST(TrainBound, RejectsNonPositiveInputs) {
  EXPECT_THROW(train_bound(0, 0.1), std::invalid_argument);
  EXPECT_THROW(train_bound(10, 0.0), std::invalid_argument);
  EXPECT_THROW(train_bound(10, -0.1), std::invalid_argument);
}

TEST(TrainTestBound, Values) {
  EXPECT_NEAR(train_test_bound(1000, 1000, 0.03, 0.03), 2 * train_bound(1000, 0.03), 1e-15);
  EXPECT_NEAR(train_test_bound(22500, 7500, 0.01, 0.01), 2 * std::exp(-4.5) + 2 * std::exp(-1.5),
              1e-15);
  EXPECT_NEAR(train_test_bound(22500, 7500, 0.01, 0.01), 0.4685, 5e-5);
  EXPECT_NEAR(train_test_bound(22500, 7500, HUGE_VAL, 0.01), 2 * std::exp(-1.5), 1e-15);
  EXPECT_THROW(train_test_bound(10, 0, 0.1, 0.1), std::invalid_argument);
  EXPECT_THROW(train_test_bound(10, 10, 0.1, 0.0), std::invalid_argument);
}

TEST(EpsilonForConfidence, InversionIdentity) {
  EXPECT_NEAR(epsilon_for_confidence(22500, 0.05), std::sqrt(std::log(40.0) / 45000.0), 1e-15);
  EXPECT_NEAR(epsilon_for_confidence(22500, 0.05), 0.00905, 5e-6);
  for (std::int64_t n : {1, 17, 22500, 1000000}) {
    for (double delta : {0.001, 0.05, 0.5, 0.99}) {
      EXPECT_NEAR(train_bound(n, epsilon_for_confidence(n, delta)), delta, 1e-12);
    }
  }
  EXPECT_NEAR(epsilon_for_confidence(4000, 0.1), epsilon_for_confidence(1000, 0.1) / 2, 1e-15);
  EXPECT_THROW(epsilon_for_confidence(10, 1.0), std::invalid_argument);
  EXPECT_THROW(epsilon_for_confidence(10, 2.0), std::invalid_argument);
  EXPECT_THROW(epsilon_for_confidence(10, 0.0), std::invalid_argument);
  EXPECT_THROW(epsilon_for_confidence(0, 0.5), std::invalid_argument);
}

}  // namespace
}  // namespace credsel
