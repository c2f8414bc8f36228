#include "credsel/selective.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "credsel/metrics.hpp"

namespace credsel {
namespace {

void check_model_matches(const Model& model, const Dataset& data, const char* what) {
  if (input_dim(model) != data.p()) {
    throw ValidationError(std::string(what) + " expects " + std::to_string(input_dim(model)) +
                          " features, dataset has " + std::to_string(data.p()));
  }
}

}  // namespace

std::string to_string(SelectiveVariant v) {
  return v == SelectiveVariant::ideal ? "ideal" : "practical";
}

SelectiveVariant selective_variant_from_string(const std::string& s) {
  if (s == "ideal") return SelectiveVariant::ideal;
  if (s == "practical") return SelectiveVariant::practical;
  throw std::invalid_argument("unknown selective label variant '" + s + "'");
}

std::size_t SelectiveLabels::rejected_count() const {
  std::size_t c = 0;
  for (int v : z) c += (v == 0);
  return c;
}

SelectiveLabels selective_labels_from_predictions(std::span<const int> nn_pred,
                                                  std::span<const int> lr_pred,
                                                  std::span<const int> y,
                                                  SelectiveVariant variant) {
  if (nn_pred.size() != lr_pred.size() || nn_pred.size() != y.size()) {
    throw std::invalid_argument("prediction and label vectors differ in length");
  }
  SelectiveLabels out{std::vector<int>(y.size(), 1), variant};
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool disagree = nn_pred[i] != lr_pred[i];
    const bool reject =
        variant == SelectiveVariant::ideal ? disagree : (disagree && y[i] == nn_pred[i]);
    out.z[i] = reject ? 0 : 1;
  }
  return out;
}

SelectiveLabels make_selective_labels(const Model& nn, const Model& lr, const Dataset& data,
                                      Threshold tau, SelectiveVariant variant) {
  check_model_matches(nn, data, "neural network");
  check_model_matches(lr, data, "logistic model");
  return selective_labels_from_predictions(model_predictions(nn, data, tau),
                                           model_predictions(lr, data, tau), data.labels(),
                                           variant);
}

std::vector<int> coupled_agreement_labels(std::span<const double> nn_prob,
                                          std::span<const double> lr_prob, Rng& rng) {
  if (nn_prob.size() != lr_prob.size()) {
    throw std::invalid_argument("probability vectors differ in length");
  }
  std::vector<int> z(nn_prob.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double u = uniform01(rng);
    z[i] = ((u < nn_prob[i]) == (u < lr_prob[i])) ? 1 : 0;
  }
  return z;
}

double acceptance_oracle(double f_value, double lr_value) {
  if (!(f_value >= 0.0 && f_value <= 1.0 && lr_value >= 0.0 && lr_value <= 1.0)) {
    throw std::invalid_argument("acceptance oracle inputs must lie in [0, 1]");
  }
  return 1.0 - std::abs(f_value - lr_value);
}

double practical_acceptance_oracle(double p_true, int nn_label, int lr_label) {
  if (!(p_true >= 0.0 && p_true <= 1.0)) {
    throw std::invalid_argument("p_true must lie in [0, 1]");
  }
  if (nn_label == lr_label) return 1.0;
  return 1.0 - (nn_label == 1 ? p_true : 1.0 - p_true);
}

TrainResult train_difference_net(const Dataset& data, const SelectiveLabels& labels,
                                 const TrainConfig& config) {
  if (labels.z.size() != data.n()) {
    throw std::invalid_argument("selective labels do not match the dataset length");
  }
  return train(ModelKind::mlp5, data.features(), labels.z, config);
}

double RejectionSummary::nn_default_share() const {
  if (rejected_indices.empty()) return 0.0;
  return static_cast<double>(nn_default_lr_non_default) /
         static_cast<double>(rejected_indices.size());
}

std::string RejectionSummary::indices_csv() const {
  std::ostringstream os;
  os << "index\n";
  for (std::size_t i : rejected_indices) os << i << '\n';
  return os.str();
}

RejectionSummary rejection_summary(const Model& diffnet, const Dataset& data, Threshold tau_g,
                                   std::span<const int> nn_pred, std::span<const int> lr_pred) {
  check_model_matches(diffnet, data, "difference net");
  if (nn_pred.size() != data.n() || lr_pred.size() != data.n()) {
    throw std::invalid_argument("stored predictions do not match the dataset length");
  }
  RejectionSummary s;
  s.n = data.n();
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (predict(forward(diffnet, data.row(i)), tau_g) != 0) continue;
    s.rejected_indices.push_back(i);
    if (nn_pred[i] == lr_pred[i]) ++s.models_agree;
    else if (nn_pred[i] == 1) ++s.nn_default_lr_non_default;
    else ++s.nn_non_default_lr_default;
  }
  s.rejection_rate = static_cast<double>(s.rejected_indices.size()) / static_cast<double>(s.n);
  return s;
}

RejectionSummary rejection_summary(const Model& diffnet, const Dataset& data, Threshold tau_g,
                                   const Model& nn, const Model& lr, Threshold tau) {
  return rejection_summary(diffnet, data, tau_g, model_predictions(nn, data, tau),
                           model_predictions(lr, data, tau));
}

}  // namespace credsel
