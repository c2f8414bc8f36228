#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "credsel/data.hpp"
#include "credsel/models.hpp"

namespace credsel {

// Positive class is default = 1.
struct ConfusionMatrix {
  std::size_t true_positive = 0;
  std::size_t false_negative = 0;
  std::size_t false_positive = 0;
  std::size_t true_negative = 0;

  std::size_t total() const {
    return true_positive + false_negative + false_positive + true_negative;
  }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct RocPoint {
  double false_positive_rate;
  double true_positive_rate;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) first, (1,1) last
  double auc = 0.0;

  std::string to_csv() const;
};

double classification_error(std::span<const int> predictions, std::span<const int> labels);
ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels);
// TP / (TP + FN); absent when there are no actual positives.
std::optional<double> recall(const ConfusionMatrix& m);

// One ROC point per distinct score, AUC by the trapezoidal rule.
RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels);
// Mann-Whitney pair statistic, ties counted one half. Independent of roc_auc.
double pair_counting_auc(std::span<const double> scores, std::span<const int> labels);

std::vector<double> model_scores(const Model& model, const Dataset& data);
std::vector<int> model_predictions(const Model& model, const Dataset& data, Threshold tau = {});

struct SubsetErrors {
  double lr_error;
  double nn_error;
};

// Classification error of each model restricted to `indices`; absent when the
// subset is empty.
std::optional<SubsetErrors> rejected_set_errors(std::span<const std::size_t> indices,
                                                const Model& nn, const Model& lr,
                                                const Dataset& data, Threshold tau = {});

struct ModelEvaluation {
  double error;
  ConfusionMatrix confusion;
  std::optional<double> recall;
  std::optional<RocCurve> roc;  // absent for single-class data
};

ModelEvaluation evaluate_model(const Model& model, const Dataset& data, Threshold tau = {});

}  // namespace credsel
