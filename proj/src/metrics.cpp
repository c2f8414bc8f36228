#include "credsel/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace credsel {
namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("predictions and labels differ in length");
  if (a == 0) throw std::invalid_argument("empty evaluation set");
}

std::pair<std::size_t, std::size_t> class_counts(std::span<const int> labels) {
  std::size_t pos = 0;
  for (int y : labels) pos += (y == 1);
  return {pos, labels.size() - pos};
}

}  // namespace

std::string RocCurve::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "fpr,tpr\n";
  for (const auto& p : points) os << p.false_positive_rate << ',' << p.true_positive_rate << '\n';
  return os.str();
}

double classification_error(std::span<const int> predictions, std::span<const int> labels) {
  check_lengths(predictions.size(), labels.size());
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) wrong += (predictions[i] != labels[i]);
  return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels) {
  check_lengths(predictions.size(), labels.size());
  ConfusionMatrix m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool actual = labels[i] == 1;
    const bool predicted = predictions[i] == 1;
    if (actual && predicted) ++m.true_positive;
    else if (actual) ++m.false_negative;
    else if (predicted) ++m.false_positive;
    else ++m.true_negative;
  }
  return m;
}

std::optional<double> recall(const ConfusionMatrix& m) {
  const std::size_t actual = m.true_positive + m.false_negative;
  if (actual == 0) return std::nullopt;
  return static_cast<double>(m.true_positive) / static_cast<double>(actual);
}

RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores.size(), labels.size());
  const auto [pos, neg] = class_counts(labels);
  if (pos == 0 || neg == 0) throw std::invalid_argument("ROC needs both classes present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  double area = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    // Group ties: one threshold per distinct score.
    while (k < order.size() && scores[order[k]] == s) {
      if (labels[order[k]] == 1) ++tp;
      else ++fp;
      ++k;
    }
    const RocPoint next{static_cast<double>(fp) / static_cast<double>(neg),
                        static_cast<double>(tp) / static_cast<double>(pos)};
    const RocPoint& last = roc.points.back();
    area += (next.false_positive_rate - last.false_positive_rate) *
            (next.true_positive_rate + last.true_positive_rate) * 0.5;
    roc.points.push_back(next);
  }
  roc.auc = area;
  return roc;
}

double pair_counting_auc(std::span<const double> scores, std::span<const int> labels) {
  check_lengths(scores.size(), labels.size());
  const auto [pos, neg] = class_counts(labels);
  if (pos == 0 || neg == 0) throw std::invalid_argument("AUC needs both classes present");
  // Rank-sum form of the pair count: sort once, average ranks over ties.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    std::size_t e = k;
    while (e < order.size() && scores[order[e]] == scores[order[k]]) ++e;
    const double avg_rank = 0.5 * static_cast<double>(k + 1 + e);
    for (std::size_t t = k; t < e; ++t) {
      if (labels[order[t]] == 1) positive_rank_sum += avg_rank;
    }
    k = e;
  }
  const double p = static_cast<double>(pos);
  const double u = positive_rank_sum - p * (p + 1.0) * 0.5;
  return u / (p * static_cast<double>(neg));
}

std::vector<double> model_scores(const Model& model, const Dataset& data) {
  std::vector<double> s(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) s[i] = forward(model, data.row(i));
  return s;
}

std::vector<int> model_predictions(const Model& model, const Dataset& data, Threshold tau) {
  std::vector<int> out(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) out[i] = predict(forward(model, data.row(i)), tau);
  return out;
}

std::optional<SubsetErrors> rejected_set_errors(std::span<const std::size_t> indices,
                                                const Model& nn, const Model& lr,
                                                const Dataset& data, Threshold tau) {
  if (indices.empty()) return std::nullopt;
  std::size_t lr_wrong = 0;
  std::size_t nn_wrong = 0;
  for (std::size_t i : indices) {
    if (i >= data.n()) throw std::out_of_range("rejected index out of range");
    const int y = data.labels()[i];
    lr_wrong += (predict(forward(lr, data.row(i)), tau) != y);
    nn_wrong += (predict(forward(nn, data.row(i)), tau) != y);
  }
  const double n = static_cast<double>(indices.size());
  return SubsetErrors{static_cast<double>(lr_wrong) / n, static_cast<double>(nn_wrong) / n};
}

ModelEvaluation evaluate_model(const Model& model, const Dataset& data, Threshold tau) {
  const auto scores = model_scores(model, data);
  std::vector<int> preds(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) preds[i] = predict(scores[i], tau);
  ModelEvaluation e{classification_error(preds, data.labels()), confusion(preds, data.labels()),
                    std::nullopt, {}};
  e.recall = recall(e.confusion);
  const auto [pos, neg] = class_counts(data.labels());
  if (pos > 0 && neg > 0) e.roc = roc_auc(scores, data.labels());
  return e;
}

}  // namespace credsel
