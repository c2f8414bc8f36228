#include "credsel/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace credsel {
namespace {

void require_positive(std::int64_t n, const char* name) {
  if (n < 1) throw std::invalid_argument(std::string(name) + " must be >= 1");
}

void require_positive(double eps, const char* name) {
  if (!(eps > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
}

double hoeffding(std::int64_t n, double eps) {
  if (std::isinf(eps)) return 0.0;
  return 2.0 * std::exp(-2.0 * static_cast<double>(n) * eps * eps);
}

}  // namespace

double train_bound(std::int64_t n, double epsilon) {
  require_positive(n, "n");
  require_positive(epsilon, "epsilon");
  return hoeffding(n, epsilon);
}

double train_test_bound(std::int64_t n_train, std::int64_t n_test, double eps1, double eps2) {
  require_positive(n_train, "n_train");
  require_positive(n_test, "n_test");
  require_positive(eps1, "epsilon_1");
  require_positive(eps2, "epsilon_2");
  return hoeffding(n_train, eps1) + hoeffding(n_test, eps2);
}

double epsilon_for_confidence(std::int64_t n, double delta) {
  require_positive(n, "n");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

}  // namespace credsel
