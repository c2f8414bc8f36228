#include "credsel/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "credsel/bounds.hpp"
#include "credsel/random.hpp"

namespace credsel {
namespace {

void draw_point(const Scenario& s, Rng& rng, std::span<double> x) {
  for (std::size_t j = 0; j < s.dimension; ++j) {
    if (s.kind == ScenarioKind::diminishing_marginal && j == 0) {
      x[j] = static_cast<double>(uniform_index(rng, static_cast<std::uint64_t>(s.count_max) + 1));
    } else {
      x[j] = uniform(rng, s.box_lo, s.box_hi);
    }
  }
}

}  // namespace

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::linear: return "linear";
    case ScenarioKind::diminishing_marginal: return "diminishing_marginal";
    case ScenarioKind::bump: return "bump";
  }
  return "linear";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "linear") return ScenarioKind::linear;
  if (s == "diminishing_marginal") return ScenarioKind::diminishing_marginal;
  if (s == "bump") return ScenarioKind::bump;
  throw std::invalid_argument("unknown scenario '" + s + "'");
}

void Scenario::validate() const {
  if (dimension == 0) throw std::invalid_argument("scenario dimension must be >= 1");
  if (!(box_lo < box_hi)) throw std::invalid_argument("scenario box is empty");
  if (!std::isfinite(intercept)) throw std::invalid_argument("intercept must be finite");
  switch (kind) {
    case ScenarioKind::linear:
    case ScenarioKind::bump:
      if (coefficients.size() != dimension) {
        throw std::invalid_argument("scenario needs one coefficient per dimension");
      }
      if (kind == ScenarioKind::bump) {
        if (center.size() != dimension) throw std::invalid_argument("bump center has wrong length");
        if (!(width > 0.0)) throw std::invalid_argument("bump width must be > 0");
      }
      break;
    case ScenarioKind::diminishing_marginal:
      if (dimension != 2) throw std::invalid_argument("diminishing_marginal is two-dimensional");
      if (!(saturation > 0.0)) throw std::invalid_argument("saturation must be > 0");
      if (count_max < 1) throw std::invalid_argument("count_max must be >= 1");
      break;
  }
}

Schema Scenario::schema() const {
  Schema s;
  for (std::size_t j = 0; j < dimension; ++j) {
    FeatureSpec f{"x" + std::to_string(j + 1), FeatureKind::continuous, {box_lo, box_hi}, j};
    if (kind == ScenarioKind::diminishing_marginal && j == 0) {
      f.kind = FeatureKind::ordinal_categorical;
      f.valid_range = {0.0, static_cast<double>(count_max)};
    }
    s.push_back(std::move(f));
  }
  return s;
}

double Scenario::linear_probability(std::span<const double> x) const {
  if (kind == ScenarioKind::diminishing_marginal) {
    return sigmoid(intercept + saturation_effect * x[0] + linear_effect * x[1]);
  }
  return sigmoid(intercept + dot(coefficients, x));
}

double Scenario::probability(std::span<const double> x) const {
  switch (kind) {
    case ScenarioKind::linear:
      return sigmoid(intercept + dot(coefficients, x));
    case ScenarioKind::diminishing_marginal:
      return sigmoid(intercept + saturation_effect * std::min(x[0], saturation) +
                     linear_effect * x[1]);
    case ScenarioKind::bump: {
      double r2 = 0.0;
      for (std::size_t j = 0; j < dimension; ++j) r2 += (x[j] - center[j]) * (x[j] - center[j]);
      return sigmoid(intercept + dot(coefficients, x) +
                     height * std::exp(-r2 / (2.0 * width * width)));
    }
  }
  return 0.5;
}

Scenario default_scenario(ScenarioKind kind) {
  Scenario s;
  s.kind = kind;
  switch (kind) {
    case ScenarioKind::linear:
      s.intercept = -0.5;
      s.coefficients = {1.5, -1.0};
      break;
    case ScenarioKind::diminishing_marginal:
      s.intercept = -2.0;
      s.coefficients = {};
      break;
    case ScenarioKind::bump:
      s.intercept = -1.0;
      s.coefficients = {1.0, 0.5};
      s.center = {0.3, 0.2};
      s.width = 0.3;
      s.height = 3.0;
      break;
  }
  return s;
}

SyntheticSample sample(const Scenario& scenario, std::size_t n, std::uint64_t seed) {
  scenario.validate();
  if (n == 0) throw std::invalid_argument("sample size must be >= 1");
  Rng rng(seed);
  Matrix x(n, scenario.dimension);
  std::vector<int> y(n);
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = x.row(i);
    draw_point(scenario, rng, row);
    p[i] = scenario.probability(row);
    y[i] = bernoulli(rng, p[i]) ? 1 : 0;
  }
  return {Dataset(std::move(x), std::move(y), scenario.schema(), Provenance::synthetic),
          std::move(p)};
}

ProbabilityFn model_probability(const Model& model) {
  return [model](std::span<const double> x) { return forward(model, x); };
}

ProbabilityFn scenario_probability(const Scenario& scenario) {
  return [scenario](std::span<const double> x) { return scenario.probability(x); };
}

ProbabilityFn scenario_linear_probability(const Scenario& scenario) {
  return [scenario](std::span<const double> x) { return scenario.linear_probability(x); };
}

MonteCarloEstimate true_rejection_rate(const Scenario& scenario, const ProbabilityFn& nn,
                                       const ProbabilityFn& lr, Threshold tau,
                                       std::size_t mc_samples, std::uint64_t seed) {
  scenario.validate();
  if (mc_samples < 1000) {
    throw std::invalid_argument("true_rejection_rate needs at least 1000 Monte-Carlo samples");
  }
  Rng rng(seed);
  std::vector<double> x(scenario.dimension);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < mc_samples; ++k) {
    draw_point(scenario, rng, x);
    const int big = predict(nn(x), tau);
    const int coarse = predict(lr(x), tau);
    if (big == coarse) continue;
    const double p = scenario.probability(x);
    const double c = big == 1 ? p : 1.0 - p;
    sum += c;
    sum_sq += c * c;
  }
  const double m = static_cast<double>(mc_samples);
  const double mean = sum / m;
  const double var = std::max(0.0, sum_sq / m - mean * mean);
  return {mean, std::sqrt(var / m)};
}

double empirical_rejection_rate(const SyntheticSample& s, const ProbabilityFn& nn,
                                const ProbabilityFn& lr, Threshold tau) {
  std::size_t rejected = 0;
  for (std::size_t i = 0; i < s.data.n(); ++i) {
    const auto x = s.data.row(i);
    const int big = predict(nn(x), tau);
    const int coarse = predict(lr(x), tau);
    if (big != coarse && s.data.labels()[i] == big) ++rejected;
  }
  return static_cast<double>(rejected) / static_cast<double>(s.data.n());
}

CoverageResult coverage_experiment(const Scenario& scenario, std::size_t n, double epsilon,
                                   std::size_t trials, std::uint64_t seed,
                                   std::size_t gamma_mc_samples) {
  if (trials < 200) throw std::invalid_argument("coverage_experiment needs at least 200 trials");
  if (n == 0) throw std::invalid_argument("sample size must be >= 1");
  const auto nn = scenario_probability(scenario);
  const auto lr = scenario_linear_probability(scenario);
  CoverageResult r;
  r.trials = trials;
  r.bound = train_bound(static_cast<std::int64_t>(n), epsilon);
  r.gamma = true_rejection_rate(scenario, nn, lr, Threshold{}, gamma_mc_samples,
                                derive_seed(seed, 0));
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = sample(scenario, n, derive_seed(seed, t + 1));
    const double g = empirical_rejection_rate(s, nn, lr, Threshold{});
    if (std::abs(g - r.gamma.value) >= epsilon) ++r.violations;
  }
  r.violation_frequency = static_cast<double>(r.violations) / static_cast<double>(trials);
  const double b = std::min(r.bound, 1.0);
  r.tolerance = r.bound + 3.0 * std::sqrt(b * (1.0 - b) / static_cast<double>(trials));
  return r;
}

}  // namespace credsel
