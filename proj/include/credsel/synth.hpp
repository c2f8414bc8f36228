#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "credsel/data.hpp"
#include "credsel/models.hpp"

namespace credsel {

enum class ScenarioKind { linear, diminishing_marginal, bump };

std::string to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(const std::string& s);

// Population with a known default probability p(x) and a uniform sampling
// density on a box.
//   linear:               logit p = intercept + <coefficients, x>
//   diminishing_marginal: logit p = intercept + a * min(x_1, s) + b * x_2,
//                         with x_1 an integer count in [0, count_max]
//   bump:                 logit p = intercept + <coefficients, x>
//                         + height * exp(-|x - center|^2 / (2 width^2))
struct Scenario {
  ScenarioKind kind = ScenarioKind::linear;
  std::size_t dimension = 2;
  double intercept = 0.0;
  std::vector<double> coefficients;
  double box_lo = -1.0;
  double box_hi = 1.0;
  // diminishing_marginal
  double saturation_effect = 1.5;  // a
  double saturation = 2.0;         // s
  double linear_effect = 0.5;      // b
  int count_max = 8;
  // bump
  std::vector<double> center;
  double width = 0.25;
  double height = 3.0;

  void validate() const;
  Schema schema() const;
  double probability(std::span<const double> x) const;
  // Probability with the nonlinear term removed; the scenario's reference
  // linear model.
  double linear_probability(std::span<const double> x) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

Scenario default_scenario(ScenarioKind kind);

struct SyntheticSample {
  Dataset data;
  std::vector<double> true_probability;
};

// x ~ uniform box, y ~ Bernoulli(p(x)). Deterministic per seed.
SyntheticSample sample(const Scenario& scenario, std::size_t n, std::uint64_t seed);

using ProbabilityFn = std::function<double(std::span<const double>)>;

ProbabilityFn model_probability(const Model& model);
ProbabilityFn scenario_probability(const Scenario& scenario);
ProbabilityFn scenario_linear_probability(const Scenario& scenario);

struct MonteCarloEstimate {
  double value;
  double standard_error;
};

// Monte-Carlo estimate of the population rejection rate under the practical
// rule: over x ~ eta where F != F~, a sample is rejected when its outcome
// matches the network, which happens with probability p(x) where F = 1 and
// 1 - p(x) where F = 0. Refuses mc_samples < 1000.
MonteCarloEstimate true_rejection_rate(const Scenario& scenario, const ProbabilityFn& nn,
                                       const ProbabilityFn& lr, Threshold tau,
                                       std::size_t mc_samples, std::uint64_t seed);

// Empirical rejection rate of a labelled sample under the practical rule.
double empirical_rejection_rate(const SyntheticSample& s, const ProbabilityFn& nn,
                                const ProbabilityFn& lr, Threshold tau);

struct CoverageResult {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double violation_frequency = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;  // bound + 3 binomial standard errors
  MonteCarloEstimate gamma{0.0, 0.0};

  bool within_bound() const { return violation_frequency <= tolerance; }
};

// Repeatedly draws n-sample training sets and counts |gamma_X - gamma| >= eps,
// with the scenario's reference models: the Bayes probability as the network
// and the scenario's linear part as the logistic model. Needs trials >= 200.
CoverageResult coverage_experiment(const Scenario& scenario, std::size_t n, double epsilon,
                                   std::size_t trials, std::uint64_t seed,
                                   std::size_t gamma_mc_samples = 2'000'000);

}  // namespace credsel
