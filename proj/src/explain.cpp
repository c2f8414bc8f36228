#include "credsel/explain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace credsel {

std::vector<std::size_t> GlobalImportance::ranking() const {
  std::vector<std::size_t> order(lambdas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lambdas[a] > lambdas[b]; });
  return order;
}

GlobalImportance global_importance(const Model& model, const Dataset& data,
                                   std::string model_tag) {
  const std::size_t p = data.p();
  if (input_dim(model) != p) throw std::invalid_argument("model/dataset dimension mismatch");
  std::vector<double> mean_sq(p, 0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto g = input_gradient(model, data.row(i));
    for (std::size_t j = 0; j < p; ++j) mean_sq[j] += g[j] * g[j];
  }
  std::vector<double> rms(p);
  for (std::size_t j = 0; j < p; ++j) rms[j] = std::sqrt(mean_sq[j] / static_cast<double>(data.n()));
  const double total = std::accumulate(rms.begin(), rms.end(), 0.0);
  if (!(total > 0.0)) {
    throw std::domain_error("global importance undefined: model output is constant on the data");
  }
  GlobalImportance out{std::vector<double>(p), std::move(model_tag)};
  for (std::size_t j = 0; j < p; ++j) out.lambdas[j] = 100.0 * rms[j] / total;
  return out;
}

std::vector<double> local_gradient_importance(const Model& model, std::span<const double> x) {
  return input_gradient(model, x);
}

std::optional<double> categorical_perturbation(const Model& model, std::span<const double> x,
                                               const Schema& schema, std::size_t feature,
                                               int direction) {
  if (feature >= schema.size() || schema.size() != x.size()) {
    throw std::invalid_argument("feature index or schema does not match the input");
  }
  if (!schema[feature].categorical()) {
    throw std::invalid_argument("feature " + schema[feature].name + " is not categorical");
  }
  if (direction != 1 && direction != -1) throw std::invalid_argument("direction must be +1 or -1");
  const double stepped = x[feature] + direction;
  if (!schema[feature].valid_range.contains(stepped)) return std::nullopt;
  std::vector<double> moved(x.begin(), x.end());
  moved[feature] = stepped;
  return forward(model, moved) - forward(model, x);
}

std::optional<double> CategoricalDelta::dominant() const {
  if (!minus) return plus;
  if (!plus) return minus;
  return std::abs(*plus) >= std::abs(*minus) ? plus : minus;
}

LocalExplanation local_explanation(const Model& model, const Dataset& data, std::size_t index) {
  if (index >= data.n()) throw std::out_of_range("sample index out of range");
  const auto x = data.row(index);
  LocalExplanation e;
  e.sample_index = index;
  e.output = forward(model, x);
  e.gradient_importances = local_gradient_importance(model, x);
  for (std::size_t j = 0; j < data.p(); ++j) {
    if (!data.schema()[j].categorical()) continue;
    e.categorical_deltas.push_back({j, categorical_perturbation(model, x, data.schema(), j, -1),
                                    categorical_perturbation(model, x, data.schema(), j, +1)});
  }
  return e;
}

PerturbationSummary average_perturbation(const Model& model, const Dataset& data,
                                         std::span<const std::size_t> indices,
                                         std::size_t feature, double value, int direction) {
  PerturbationSummary s{feature, value, direction, 0, 0.0, 0.0};
  for (std::size_t i : indices) {
    const auto x = data.row(i);
    if (x[feature] != value) continue;
    const auto d = categorical_perturbation(model, x, data.schema(), feature, direction);
    if (!d) continue;
    ++s.samples;
    s.mean_delta += *d;
    s.mean_abs_delta += std::abs(*d);
  }
  if (s.samples > 0) {
    s.mean_delta /= static_cast<double>(s.samples);
    s.mean_abs_delta /= static_cast<double>(s.samples);
  }
  return s;
}

std::string PatternReport::scatter_csv(std::size_t feature) const {
  std::ostringstream os;
  os.precision(17);
  os << "index,lr_output,nn_output,feature_value\n";
  for (const auto& [f, rows] : scatter) {
    if (f != feature) continue;
    for (const auto& r : rows) {
      os << r.index << ',' << r.lr_output << ',' << r.nn_output << ',' << r.feature_value << '\n';
    }
  }
  return os.str();
}

PatternReport pattern_report_for(std::span<const std::size_t> rejected, const Model& nn,
                                 const Model& lr, const Dataset& data,
                                 double dominance_threshold) {
  PatternReport r;
  r.dominance_threshold = dominance_threshold;
  r.rejected_indices.assign(rejected.begin(), rejected.end());
  r.rejected_count = rejected.size();
  r.empty = rejected.empty();
  if (r.empty) return r;

  const double total = static_cast<double>(rejected.size());
  for (std::size_t j = 0; j < data.p(); ++j) {
    if (!data.schema()[j].categorical()) continue;
    std::map<double, std::size_t> counts;
    for (std::size_t i : rejected) ++counts[data.row(i)[j]];
    FeaturePattern fp{j, {}};
    bool any_dominant = false;
    for (const auto& [value, count] : counts) {
      const double share = static_cast<double>(count) / total;
      const bool dom = share >= dominance_threshold;
      any_dominant = any_dominant || dom;
      fp.values.push_back({value, count, share, dom});
    }
    r.patterns.push_back(std::move(fp));
    if (any_dominant) {
      std::vector<ScatterPoint> pts;
      pts.reserve(rejected.size());
      for (std::size_t i : rejected) {
        const auto x = data.row(i);
        pts.push_back({i, forward(lr, x), forward(nn, x), x[j]});
      }
      r.scatter.emplace_back(j, std::move(pts));
    }
  }
  return r;
}

PatternReport pattern_report(const Model& diffnet, const Model& nn, const Model& lr,
                             const Dataset& data, Threshold tau, double dominance_threshold) {
  std::vector<std::size_t> rejected;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (predict(forward(diffnet, data.row(i)), tau) == 0) rejected.push_back(i);
  }
  return pattern_report_for(rejected, nn, lr, data, dominance_threshold);
}

std::vector<LogitPoint> logit_shape(const Model& model, const Dataset& data, std::size_t feature,
                                    std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("logit_shape needs a non-empty grid");
  if (feature >= data.p()) throw std::invalid_argument("feature index out of range");
  const auto& spec = data.schema()[feature];
  if (!spec.categorical()) {
    throw std::invalid_argument("feature " + spec.name + " is not categorical");
  }
  for (double v : grid) {
    if (!spec.valid_range.contains(v)) {
      throw std::invalid_argument("grid value outside the valid range of " + spec.name);
    }
  }
  std::vector<LogitPoint> out;
  std::vector<double> x(data.p());
  for (double v : grid) {
    double sum = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
      const auto r = data.row(i);
      std::copy(r.begin(), r.end(), x.begin());
      x[feature] = v;
      sum += log_odds(forward(model, x));
    }
    out.push_back({v, sum / static_cast<double>(data.n())});
  }
  return out;
}

}  // namespace credsel
