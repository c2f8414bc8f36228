#pragma once

#include <cstdint>
#include <string>

namespace credsel {

// Hoeffding tail bounds on empirical rejection rates. Values are returned
// unclamped and may exceed 1 (vacuous).

// P(|gamma_train - gamma| >= epsilon) <= 2 exp(-2 n epsilon^2).
double train_bound(std::int64_t n, double epsilon);

// P(|gamma_train - gamma_test| >= eps1 + eps2)
//   <= 2 exp(-2 n_train eps1^2) + 2 exp(-2 n_test eps2^2).
double train_test_bound(std::int64_t n_train, std::int64_t n_test, double eps1, double eps2);

// Smallest epsilon with train_bound(n, epsilon) <= delta.
double epsilon_for_confidence(std::int64_t n, double delta);

inline bool vacuous(double bound) { return bound >= 1.0; }

}  // namespace credsel
