#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "credsel/matrix.hpp"

namespace credsel {

// Decision threshold on a predicted default probability.
class Threshold {
 public:
  constexpr Threshold() = default;
  explicit Threshold(double tau) : tau_(tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
  }
  constexpr double value() const { return tau_; }

 private:
  double tau_ = 0.5;
};

// 1 iff probability >= tau; ties go to default.
int predict(double probability, Threshold tau = {});

// f(x) = sigmoid(bias + <coefficients, x>).
struct LogisticModel {
  std::vector<double> coefficients;
  double bias = 0.0;

  std::size_t input_dim() const { return coefficients.size(); }
  std::size_t parameter_count() const { return coefficients.size() + 1; }
  friend bool operator==(const LogisticModel&, const LogisticModel&) = default;
};

// One hidden layer of logistic units feeding a sigmoid output:
//   f(x) = sigmoid(c + sum_k v_k * sigmoid(b_k + <W_k, x>)).
struct MlpModel {
  Matrix hidden_weights;  // h x p
  std::vector<double> hidden_biases;
  std::vector<double> output_weights;
  double output_bias = 0.0;

  MlpModel() = default;
  MlpModel(std::size_t inputs, std::size_t hidden)
      : hidden_weights(hidden, inputs), hidden_biases(hidden), output_weights(hidden) {}

  std::size_t input_dim() const { return hidden_weights.cols(); }
  std::size_t hidden_units() const { return hidden_weights.rows(); }
  std::size_t parameter_count() const {
    return hidden_weights.rows() * (hidden_weights.cols() + 2) + 1;
  }
  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

using Model = std::variant<LogisticModel, MlpModel>;

std::size_t input_dim(const Model& model);
std::size_t parameter_count(const Model& model);

// Throws std::invalid_argument on dimension mismatch or non-finite input.
double forward(const Model& model, std::span<const double> x);
// Analytic df/dx_j.
std::vector<double> input_gradient(const Model& model, std::span<const double> x);

// Parameters flattened as: logistic = [coefficients..., bias];
// mlp = [W row-major..., hidden biases..., output weights..., output bias].
std::vector<double> flatten_parameters(const Model& model);
void assign_parameters(Model& model, std::span<const double> params);

std::string model_kind_name(const Model& model);

}  // namespace credsel
