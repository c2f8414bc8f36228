#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "credsel/data.hpp"
#include "credsel/models.hpp"
#include "credsel/random.hpp"

namespace credsel::testing {

// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("credsel_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline Schema continuous_schema(std::size_t p) {
  Schema s;
  for (std::size_t j = 0; j < p; ++j) {
    s.push_back({"x" + std::to_string(j + 1), FeatureKind::continuous, {-HUGE_VAL, HUGE_VAL}, j});
  }
  return s;
}

inline Dataset make_dataset(const std::vector<std::vector<double>>& rows, std::vector<int> labels,
                            std::optional<Schema> schema = std::nullopt) {
  const std::size_t p = rows.front().size();
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return Dataset(Matrix(rows.size(), p, std::move(flat)), std::move(labels),
                 schema ? *schema : continuous_schema(p), Provenance::generic);
}

inline MlpModel random_mlp(Rng& rng, std::size_t p, std::size_t h, double scale = 1.0) {
  MlpModel m(p, h);
  for (double& w : m.hidden_weights.data()) w = uniform(rng, -scale, scale);
  for (double& b : m.hidden_biases) b = uniform(rng, -scale, scale);
  for (double& v : m.output_weights) v = uniform(rng, -2 * scale, 2 * scale);
  m.output_bias = uniform(rng, -scale, scale);
  return m;
}

inline LogisticModel random_logistic(Rng& rng, std::size_t p, double scale = 1.0) {
  LogisticModel m{std::vector<double>(p), uniform(rng, -scale, scale)};
  for (double& a : m.coefficients) a = uniform(rng, -scale, scale);
  return m;
}

inline std::vector<double> random_point(Rng& rng, std::size_t p, double scale = 2.0) {
  std::vector<double> x(p);
  for (double& v : x) v = uniform(rng, -scale, scale);
  return x;
}

// Central difference of a scalar function along coordinate j.
template <class F>
double central_difference(F&& f, std::vector<double> x, std::size_t j, double h = 1e-5) {
  const double x0 = x[j];
  x[j] = x0 + h;
  const double up = f(x);
  x[j] = x0 - h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

// |a - b| / max(|a|, |b|, floor); the floor keeps near-zero derivatives from
// turning rounding noise into large relative errors.
inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// A CSV in the UCI credit-card layout (ID column plus 23 features and the
// default flag) whose labels come from a fixed nonlinear rule. It stands in
// for the real file where only the format matters.
inline void write_taiwan_like_csv(const std::filesystem::path& path, std::size_t n,
                                  std::uint64_t seed) {
  Rng rng(seed);
  std::ostringstream os;
  os.precision(12);
  os << "ID,LIMIT_BAL,SEX,EDUCATION,MARRIAGE,AGE,PAY_0,PAY_2,PAY_3,PAY_4,PAY_5,PAY_6,"
        "BILL_AMT1,BILL_AMT2,BILL_AMT3,BILL_AMT4,BILL_AMT5,BILL_AMT6,"
        "PAY_AMT1,PAY_AMT2,PAY_AMT3,PAY_AMT4,PAY_AMT5,PAY_AMT6,"
        "default payment next month\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double limit = 10000.0 * static_cast<double>(1 + uniform_index(rng, 50));
    const int sex = 1 + static_cast<int>(uniform_index(rng, 2));
    const int edu = static_cast<int>(uniform_index(rng, 7));
    const int mar = static_cast<int>(uniform_index(rng, 4));
    const int age = 21 + static_cast<int>(uniform_index(rng, 50));
    int pay[6];
    for (int& v : pay) {
      const double u = uniform01(rng);
      v = u < 0.15 ? -2 : u < 0.35 ? -1 : u < 0.75 ? 0 : u < 0.85 ? 1 : u < 0.95 ? 2 : 3;
    }
    os << (i + 1) << ',' << limit << ',' << sex << ',' << edu << ',' << mar << ',' << age;
    for (int v : pay) os << ',' << v;
    double bill_sum = 0.0;
    for (int k = 0; k < 6; ++k) {
      const double bill = std::round(uniform(rng, -2000.0, 0.8 * limit));
      bill_sum += bill;
      os << ',' << bill;
    }
    for (int k = 0; k < 6; ++k) os << ',' << std::round(uniform(rng, 0.0, 0.1 * limit));
    const double late = std::min(pay[0], 2);
    const double logit = -1.6 + 1.4 * late - 0.35 * std::max(0, pay[0] - 2) +
                         0.5 * (pay[1] > 0) - 0.2 * limit / 100000.0 +
                         0.3 * bill_sum / (6.0 * limit + 1.0);
    os << ',' << (bernoulli(rng, sigmoid(logit)) ? 1 : 0) << '\n';
  }
  write_file(path, os.str());
}

}  // namespace credsel::testing
