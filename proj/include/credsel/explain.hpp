#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "credsel/data.hpp"
#include "credsel/models.hpp"

namespace credsel {

struct GlobalImportance {
  std::vector<double> lambdas;  // non-negative, sum to 100
  std::string model_tag;

  // Feature indices by decreasing importance; ties keep index order.
  std::vector<std::size_t> ranking() const;
};

// lambda_j proportional to the root-mean-square of df/dx_j over `data`,
// scaled to sum to 100. Throws std::domain_error when every gradient is zero.
GlobalImportance global_importance(const Model& model, const Dataset& data,
                                   std::string model_tag = "");

std::vector<double> local_gradient_importance(const Model& model, std::span<const double> x);

// f(x with x_j stepped by `direction`) - f(x). Absent when the step leaves the
// feature's valid range. Throws for a continuous feature or |direction| != 1.
std::optional<double> categorical_perturbation(const Model& model, std::span<const double> x,
                                               const Schema& schema, std::size_t feature,
                                               int direction);

struct CategoricalDelta {
  std::size_t feature;
  std::optional<double> minus;
  std::optional<double> plus;

  // Larger-magnitude direction, for summary tables.
  std::optional<double> dominant() const;
};

struct LocalExplanation {
  std::size_t sample_index = 0;
  double output = 0.0;
  std::vector<double> gradient_importances;
  std::vector<CategoricalDelta> categorical_deltas;
};

LocalExplanation local_explanation(const Model& model, const Dataset& data, std::size_t index);

struct PerturbationSummary {
  std::size_t feature = 0;
  double value = 0.0;
  int direction = 0;
  std::size_t samples = 0;  // samples with x_j == value and an in-range step
  double mean_delta = 0.0;
  double mean_abs_delta = 0.0;
};

// Average categorical_perturbation over the rows in `indices` holding
// x_j == value.
PerturbationSummary average_perturbation(const Model& model, const Dataset& data,
                                         std::span<const std::size_t> indices,
                                         std::size_t feature, double value, int direction);

struct ValueShare {
  double value;
  std::size_t count;
  double share;
  bool dominant;
};

struct FeaturePattern {
  std::size_t feature;
  std::vector<ValueShare> values;  // ascending by value
};

struct ScatterPoint {
  std::size_t index;
  double lr_output;
  double nn_output;
  double feature_value;
};

struct PatternReport {
  bool empty = true;
  std::size_t rejected_count = 0;
  double dominance_threshold = 0.5;
  std::vector<std::size_t> rejected_indices;
  std::vector<FeaturePattern> patterns;  // one per categorical feature
  // Scatter rows keyed by dominant feature.
  std::vector<std::pair<std::size_t, std::vector<ScatterPoint>>> scatter;

  std::string scatter_csv(std::size_t feature) const;
};

// Patterns over an explicit rejected set.
PatternReport pattern_report_for(std::span<const std::size_t> rejected, const Model& nn,
                                 const Model& lr, const Dataset& data,
                                 double dominance_threshold = 0.5);

// Patterns over the predicted rejected set G(x) = 0.
PatternReport pattern_report(const Model& diffnet, const Model& nn, const Model& lr,
                             const Dataset& data, Threshold tau = {},
                             double dominance_threshold = 0.5);

struct LogitPoint {
  double value;
  double mean_logit;
};

// Partial-dependence sweep: for each grid value v, the mean over rows of
// ln(f/(1-f)) with x_j set to v.
std::vector<LogitPoint> logit_shape(const Model& model, const Dataset& data, std::size_t feature,
                                    std::span<const double> grid);

}  // namespace credsel
