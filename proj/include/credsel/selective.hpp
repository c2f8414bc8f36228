#pragma once

#include <span>
#include <string>
#include <vector>

#include "credsel/data.hpp"
#include "credsel/models.hpp"
#include "credsel/random.hpp"
#include "credsel/training.hpp"

namespace credsel {

// ideal: z = 0 iff F(x) != F~(x).
// practical: z = 0 iff F(x) != F~(x) and y = F(x).
enum class SelectiveVariant { ideal, practical };

std::string to_string(SelectiveVariant v);
SelectiveVariant selective_variant_from_string(const std::string& s);

struct SelectiveLabels {
  std::vector<int> z;  // 1 = accepted by the linear model, 0 = rejected
  SelectiveVariant variant = SelectiveVariant::practical;

  std::size_t rejected_count() const;
  friend bool operator==(const SelectiveLabels&, const SelectiveLabels&) = default;
};

// Label rule applied to stored predictions: nn_pred = F, lr_pred = F~.
SelectiveLabels selective_labels_from_predictions(std::span<const int> nn_pred,
                                                  std::span<const int> lr_pred,
                                                  std::span<const int> y,
                                                  SelectiveVariant variant);

SelectiveLabels make_selective_labels(const Model& nn, const Model& lr, const Dataset& data,
                                      Threshold tau, SelectiveVariant variant);

// Agreement labels under randomised predictions driven by one shared uniform
// draw per sample: z = 1 iff [u < f] == [u < f~]. Their conditional mean is
// exactly 1 - |f - f~|, the acceptance rate targeted by acceptance_oracle.
std::vector<int> coupled_agreement_labels(std::span<const double> nn_prob,
                                          std::span<const double> lr_prob, Rng& rng);

// 1 - |f - f~| for probabilities in [0, 1].
double acceptance_oracle(double f_value, double lr_value);

// P(z = 1 | x) under the practical rule when y ~ Bernoulli(p_true).
double practical_acceptance_oracle(double p_true, int nn_label, int lr_label);

// Five-hidden-unit network fit to the selective labels. An all-accept label
// set yields a flagged constant model with G(x) = 1 everywhere.
TrainResult train_difference_net(const Dataset& data, const SelectiveLabels& labels,
                                 const TrainConfig& config);

struct RejectionSummary {
  std::size_t n = 0;
  double rejection_rate = 0.0;
  std::vector<std::size_t> rejected_indices;
  std::size_t nn_default_lr_non_default = 0;
  std::size_t nn_non_default_lr_default = 0;
  std::size_t models_agree = 0;

  // Share of rejections with NN = default and LR = non-default.
  double nn_default_share() const;
  std::string indices_csv() const;
};

// Predicted rejection G(x) = 0, i.e. g(x) < tau_g, with the direction
// breakdown taken from stored model predictions.
RejectionSummary rejection_summary(const Model& diffnet, const Dataset& data, Threshold tau_g,
                                   std::span<const int> nn_pred, std::span<const int> lr_pred);
RejectionSummary rejection_summary(const Model& diffnet, const Dataset& data, Threshold tau_g,
                                   const Model& nn, const Model& lr, Threshold tau = {});

}  // namespace credsel
