#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "credsel/data.hpp"
#include "credsel/models.hpp"

namespace credsel {

enum class ModelKind { logistic, mlp2, mlp5 };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);
std::size_t hidden_units(ModelKind k);

struct TrainConfig {
  int max_epochs = 500;
  double gradient_tolerance = 1e-8;
  std::uint64_t seed = 0;
  double init_scale = 0.1;
  // Only Polak-Ribiere+ CG with Armijo backtracking is implemented.
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;

  void validate() const;
};

struct TrainTrace {
  double initial_loss = 0.0;
  double initial_gradient_norm = 0.0;
  std::vector<double> losses;          // after each epoch
  std::vector<double> gradient_norms;  // after each epoch
  double final_gradient_norm = 0.0;
  int epochs_run = 0;
  std::vector<int> line_search_failures;  // epochs where a restart was needed
  bool converged = false;                 // gradient norm fell below tolerance
  bool degenerate = false;                // single-class labels, constant model

  double final_loss() const { return losses.empty() ? initial_loss : losses.back(); }
  // CSV with header "epoch,loss,gradient_norm"; epoch 0 is the initial state.
  std::string to_csv() const;
};

struct TrainResult {
  Model model;
  TrainTrace trace;
};

// Mean binary cross-entropy with probabilities clamped to [1e-12, 1 - 1e-12].
double cross_entropy_loss(const Model& model, const Matrix& x, std::span<const int> y);
double cross_entropy_loss(const Model& model, const Dataset& data);

// Analytic gradient of cross_entropy_loss with respect to the flattened
// parameters (layout of flatten_parameters).
std::vector<double> parameter_gradient(const Model& model, const Matrix& x,
                                       std::span<const int> y);
std::vector<double> parameter_gradient(const Model& model, const Dataset& data);

// Untrained model with the documented initialisation: weights uniform in
// [-init_scale, init_scale] from `seed`, biases zero.
Model initial_model(ModelKind kind, std::size_t inputs, const TrainConfig& config);

// Full-batch nonlinear conjugate gradient. One epoch is one line search.
TrainResult train(ModelKind kind, const Matrix& x, std::span<const int> y,
                  const TrainConfig& config);
TrainResult train(ModelKind kind, const Dataset& data, const TrainConfig& config);

}  // namespace credsel
