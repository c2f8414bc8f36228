#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "credsel/data.hpp"
#include "credsel/explain.hpp"
#include "credsel/metrics.hpp"
#include "credsel/models.hpp"
#include "credsel/selective.hpp"
#include "credsel/synth.hpp"
#include "credsel/training.hpp"

namespace credsel {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchemaVersion = "credsel.report/1";

// Canonical dataset document:
//   {schema: [...], n, p, features: row-major, labels, provenance}
Json to_json(const Dataset& d);
Dataset dataset_from_json(const Json& j);

Json to_json(const FeatureSpec& f);
FeatureSpec feature_spec_from_json(const Json& j);
Schema schema_from_json(const Json& j);

Json to_json(const ScalerParams& s);
ScalerParams scaler_from_json(const Json& j);

Json to_json(const TrainConfig& c);
// Missing keys keep their defaults.
TrainConfig train_config_from_json(const Json& j, TrainConfig base = {});

// A trained predictor together with what is needed to apply it to raw data.
struct FittedModel {
  Model model;
  ModelKind kind = ModelKind::logistic;
  Schema schema;  // raw input schema
  std::optional<ScalerParams> scaler;
  std::uint64_t seed = 0;
  int epochs = 0;
  double final_loss = 0.0;
  bool degenerate = false;

  // Checks the schema fingerprint and maps raw data into model space.
  Dataset prepare(const Dataset& raw) const;
};

Json to_json(const FittedModel& m);
FittedModel fitted_model_from_json(const Json& j);

Json to_json(const SelectiveLabels& l);
SelectiveLabels selective_labels_from_json(const Json& j);

Json to_json(const RejectionSummary& s);
Json to_json(const ConfusionMatrix& m);
Json to_json(const ModelEvaluation& e, bool include_roc_points = false);
Json to_json(const GlobalImportance& g, const Schema& schema);
Json to_json(const LocalExplanation& e, const Schema& schema);
Json to_json(const PatternReport& r, const Schema& schema);

Json to_json(const Scenario& s);
Scenario scenario_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
// Pretty-printed, trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const std::filesystem::path& path, const Dataset& d);

}  // namespace credsel
