#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "credsel/data.hpp"
#include "credsel/explain.hpp"
#include "credsel/metrics.hpp"
#include "credsel/selective.hpp"
#include "credsel/serialize.hpp"
#include "credsel/synth.hpp"
#include "credsel/training.hpp"

namespace credsel {

inline constexpr const char* kVersion = "credsel 1.0.0";

// Process exit codes, one per pipeline stage.
enum class Stage : int {
  config = 2,
  ingest = 10,
  prepare = 11,
  train = 12,
  selective = 13,
  evaluate = 14,
  explain = 15,
  bounds = 16,
  report = 17,
};

std::string to_string(Stage s);

class StageError : public std::runtime_error {
 public:
  StageError(Stage stage, const std::string& what)
      : std::runtime_error(to_string(stage) + ": " + what), stage_(stage) {}
  Stage stage() const { return stage_; }
  int exit_code() const { return static_cast<int>(stage_); }

 private:
  Stage stage_;
};

struct RunConfig {
  std::string dataset = "taiwan";  // taiwan | gmsc | generic | synthetic
  std::filesystem::path input;
  bool no_header = false;
  Scenario scenario = default_scenario(ScenarioKind::linear);
  std::size_t synthetic_n = 100'000;
  std::uint64_t synthetic_seed = 1;

  double split_fraction = 0.75;
  std::uint64_t split_seed = 1;
  double tau = 0.5;

  TrainConfig lr{.seed = 101};
  TrainConfig nn{.seed = 202};
  TrainConfig diffnet{.seed = 303};
  SelectiveVariant variant = SelectiveVariant::practical;

  double dominance_threshold = 0.5;
  // Features swept by logit_shape; empty selects a per-dataset default.
  std::vector<std::string> logit_features;
  std::vector<double> logit_grid{0, 1, 2, 3, 4, 5};

  double bound_epsilon = 0.01;
  double bound_delta = 0.05;
  std::size_t rejection_mc_samples = 200'000;  // synthetic runs only

  std::filesystem::path output_dir = "out";
  std::set<std::string> formats{"json", "csv", "svg"};

  void validate() const;
};

Json to_json(const RunConfig& c);
// Every key is optional; missing keys keep the defaults above.
RunConfig run_config_from_json(const Json& j, RunConfig base = {});

struct LogitCurve {
  std::size_t feature;
  std::vector<LogitPoint> points;
};

struct PipelineResult {
  Schema schema;
  ScalerParams scaler;
  Model lr;
  Model nn;
  Model diffnet;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  ModelEvaluation lr_test;
  ModelEvaluation nn_test;
  SelectiveLabels train_labels;
  SelectiveLabels test_labels;
  double diffnet_test_error = 0.0;
  bool diffnet_degenerate = false;
  RejectionSummary test_rejection;
  std::optional<SubsetErrors> rejected_errors;
  PatternReport patterns;
  std::optional<GlobalImportance> diffnet_importance;
  std::vector<LogitCurve> logit_curves;
  std::vector<PerturbationSummary> perturbations;
  std::optional<MonteCarloEstimate> true_rejection;  // synthetic runs only
  Json report;
  Json manifest;
};

// ingest -> split -> standardize -> train LR and NN -> selective labels ->
// Difference Net -> evaluate -> explain -> bounds -> files under output_dir.
// Failures throw StageError; the manifest is then written as incomplete.
PipelineResult run_pipeline(const RunConfig& config);

// Loads the configured dataset (raw, unsplit).
Dataset load_configured_dataset(const RunConfig& config);

}  // namespace credsel
