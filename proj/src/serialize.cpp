#include "credsel/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace credsel {
namespace {

// JSON has no infinities; unbounded range ends are written as null.
Json bound_to_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double bound_from_json(const Json& j, double if_null) {
  return j.is_null() ? if_null : j.get<double>();
}

template <class T>
T required(const Json& j, const char* key) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("missing key '") + key + "'");
  return j.at(key).get<T>();
}

}  // namespace

Json to_json(const FeatureSpec& f) {
  return Json{{"name", f.name},
              {"kind", to_string(f.kind)},
              {"valid_range", Json::array({bound_to_json(f.valid_range.lo),
                                           bound_to_json(f.valid_range.hi)})},
              {"column_index", f.column_index}};
}

FeatureSpec feature_spec_from_json(const Json& j) {
  const auto& r = j.at("valid_range");
  return FeatureSpec{required<std::string>(j, "name"),
                     feature_kind_from_string(required<std::string>(j, "kind")),
                     ValueRange{bound_from_json(r.at(0), -HUGE_VAL),
                                bound_from_json(r.at(1), HUGE_VAL)},
                     required<std::size_t>(j, "column_index")};
}

Schema schema_from_json(const Json& j) {
  Schema s;
  for (const auto& f : j) s.push_back(feature_spec_from_json(f));
  validate_schema(s);
  return s;
}

Json to_json(const Dataset& d) {
  Json schema = Json::array();
  for (const auto& f : d.schema()) schema.push_back(to_json(f));
  return Json{{"schema", std::move(schema)},
              {"n", d.n()},
              {"p", d.p()},
              {"features", d.features().data()},
              {"labels", d.labels()},
              {"provenance", to_string(d.provenance())}};
}

Dataset dataset_from_json(const Json& j) {
  Schema schema = schema_from_json(j.at("schema"));
  const auto n = required<std::size_t>(j, "n");
  const auto p = required<std::size_t>(j, "p");
  auto features = required<std::vector<double>>(j, "features");
  if (features.size() != n * p) throw ValidationError("feature array does not match n * p");
  return Dataset(Matrix(n, p, std::move(features)), required<std::vector<int>>(j, "labels"),
                 std::move(schema), provenance_from_string(required<std::string>(j, "provenance")));
}

Json to_json(const ScalerParams& s) {
  Json scaling = Json::array();
  for (auto c : s.scaling) scaling.push_back(to_string(c));
  return Json{{"means", s.means},
              {"standard_deviations", s.standard_deviations},
              {"scaling", std::move(scaling)}};
}

ScalerParams scaler_from_json(const Json& j) {
  ScalerParams s;
  s.means = required<std::vector<double>>(j, "means");
  s.standard_deviations = required<std::vector<double>>(j, "standard_deviations");
  for (const auto& c : j.at("scaling")) s.scaling.push_back(column_scaling_from_string(c));
  if (s.standard_deviations.size() != s.means.size() || s.scaling.size() != s.means.size()) {
    throw std::invalid_argument("scaler arrays differ in length");
  }
  return s;
}

Json to_json(const TrainConfig& c) {
  return Json{{"max_epochs", c.max_epochs},
              {"gradient_tolerance", c.gradient_tolerance},
              {"seed", c.seed},
              {"init_scale", c.init_scale},
              {"cg_variant", "polak_ribiere_plus"},
              {"line_search", "backtracking_armijo"},
              {"armijo_c", c.armijo_c},
              {"backtrack_factor", c.backtrack_factor}};
}

TrainConfig train_config_from_json(const Json& j, TrainConfig c) {
  if (j.contains("max_epochs")) c.max_epochs = j.at("max_epochs").get<int>();
  if (j.contains("gradient_tolerance")) c.gradient_tolerance = j.at("gradient_tolerance");
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("init_scale")) c.init_scale = j.at("init_scale");
  if (j.contains("armijo_c")) c.armijo_c = j.at("armijo_c");
  if (j.contains("backtrack_factor")) c.backtrack_factor = j.at("backtrack_factor");
  if (j.contains("cg_variant") && j.at("cg_variant") != "polak_ribiere_plus") {
    throw std::invalid_argument("only the polak_ribiere_plus CG variant is supported");
  }
  if (j.contains("line_search") && j.at("line_search") != "backtracking_armijo") {
    throw std::invalid_argument("only backtracking_armijo line search is supported");
  }
  c.validate();
  return c;
}

Dataset FittedModel::prepare(const Dataset& raw) const {
  if (schema_fingerprint(raw.schema()) != schema_fingerprint(schema)) {
    throw ValidationError("dataset schema does not match the model's training schema");
  }
  return scaler ? scaler->apply(raw) : raw;
}

Json to_json(const FittedModel& m) {
  Json j;
  j["model_kind"] = to_string(m.kind);
  if (const auto* lr = std::get_if<LogisticModel>(&m.model)) {
    j["dimensions"] = Json{{"inputs", lr->input_dim()}, {"hidden", 0}};
    j["weights"] = Json{{"coefficients", lr->coefficients}};
    j["biases"] = Json{{"output", lr->bias}};
  } else {
    const auto& nn = std::get<MlpModel>(m.model);
    j["dimensions"] = Json{{"inputs", nn.input_dim()}, {"hidden", nn.hidden_units()}};
    j["weights"] = Json{{"hidden", nn.hidden_weights.data()}, {"output", nn.output_weights}};
    j["biases"] = Json{{"hidden", nn.hidden_biases}, {"output", nn.output_bias}};
  }
  j["scaler"] = m.scaler ? to_json(*m.scaler) : Json(nullptr);
  Json schema = Json::array();
  for (const auto& f : m.schema) schema.push_back(to_json(f));
  j["schema"] = std::move(schema);
  j["schema_fingerprint"] = schema_fingerprint(m.schema);
  j["training"] = Json{{"seed", m.seed},
                       {"epochs", m.epochs},
                       {"final_loss", m.final_loss},
                       {"degenerate", m.degenerate}};
  return j;
}

FittedModel fitted_model_from_json(const Json& j) {
  FittedModel m;
  m.kind = model_kind_from_string(required<std::string>(j, "model_kind"));
  const auto inputs = j.at("dimensions").at("inputs").get<std::size_t>();
  const auto hidden = j.at("dimensions").at("hidden").get<std::size_t>();
  if (hidden != hidden_units(m.kind)) throw std::invalid_argument("hidden size does not match kind");
  if (m.kind == ModelKind::logistic) {
    LogisticModel lr{j.at("weights").at("coefficients").get<std::vector<double>>(),
                     j.at("biases").at("output").get<double>()};
    if (lr.coefficients.size() != inputs) throw std::invalid_argument("coefficient count mismatch");
    m.model = std::move(lr);
  } else {
    MlpModel nn(inputs, hidden);
    nn.hidden_weights =
        Matrix(hidden, inputs, j.at("weights").at("hidden").get<std::vector<double>>());
    nn.output_weights = j.at("weights").at("output").get<std::vector<double>>();
    nn.hidden_biases = j.at("biases").at("hidden").get<std::vector<double>>();
    nn.output_bias = j.at("biases").at("output").get<double>();
    if (nn.output_weights.size() != hidden || nn.hidden_biases.size() != hidden) {
      throw std::invalid_argument("hidden layer arrays have the wrong length");
    }
    m.model = std::move(nn);
  }
  if (!j.at("scaler").is_null()) m.scaler = scaler_from_json(j.at("scaler"));
  m.schema = schema_from_json(j.at("schema"));
  if (m.schema.size() != inputs) throw std::invalid_argument("schema length mismatch");
  if (j.contains("schema_fingerprint") &&
      j.at("schema_fingerprint").get<std::string>() != schema_fingerprint(m.schema)) {
    throw ValidationError("model schema fingerprint does not match its schema");
  }
  const auto& t = j.at("training");
  m.seed = t.at("seed").get<std::uint64_t>();
  m.epochs = t.at("epochs").get<int>();
  m.final_loss = t.at("final_loss").get<double>();
  m.degenerate = t.at("degenerate").get<bool>();
  return m;
}

Json to_json(const SelectiveLabels& l) {
  return Json{{"variant", to_string(l.variant)},
              {"n", l.z.size()},
              {"rejected", l.rejected_count()},
              {"z", l.z}};
}

SelectiveLabels selective_labels_from_json(const Json& j) {
  SelectiveLabels l{required<std::vector<int>>(j, "z"),
                    selective_variant_from_string(required<std::string>(j, "variant"))};
  for (int v : l.z) {
    if (v != 0 && v != 1) throw ValidationError("selective labels must be 0 or 1");
  }
  return l;
}

Json to_json(const RejectionSummary& s) {
  return Json{{"n", s.n},
              {"rejection_rate", s.rejection_rate},
              {"rejected_count", s.rejected_indices.size()},
              {"direction_breakdown",
               Json{{"nn_default_lr_non_default", s.nn_default_lr_non_default},
                    {"nn_non_default_lr_default", s.nn_non_default_lr_default},
                    {"models_agree", s.models_agree},
                    {"nn_default_share", s.nn_default_share()}}},
              {"rejected_indices", s.rejected_indices}};
}

Json to_json(const ConfusionMatrix& m) {
  return Json{{"true_positive", m.true_positive},
              {"false_negative", m.false_negative},
              {"false_positive", m.false_positive},
              {"true_negative", m.true_negative}};
}

Json to_json(const ModelEvaluation& e, bool include_roc_points) {
  Json j{{"classification_error", e.error},
         {"confusion", to_json(e.confusion)},
         {"recall", e.recall ? Json(*e.recall) : Json(nullptr)},
         {"auc", e.roc ? Json(e.roc->auc) : Json(nullptr)}};
  if (include_roc_points && e.roc) {
    Json pts = Json::array();
    for (const auto& p : e.roc->points) {
      pts.push_back(Json::array({p.false_positive_rate, p.true_positive_rate}));
    }
    j["roc"] = std::move(pts);
  }
  return j;
}

Json to_json(const GlobalImportance& g, const Schema& schema) {
  Json rows = Json::array();
  for (std::size_t j : g.ranking()) {
    rows.push_back(Json{{"feature", schema.at(j).name}, {"index", j}, {"lambda", g.lambdas[j]}});
  }
  return Json{{"model", g.model_tag}, {"lambdas", g.lambdas}, {"ranking", std::move(rows)}};
}

Json to_json(const LocalExplanation& e, const Schema& schema) {
  Json grads = Json::object();
  for (std::size_t j = 0; j < e.gradient_importances.size(); ++j) {
    grads[schema.at(j).name] = e.gradient_importances[j];
  }
  Json cats = Json::object();
  for (const auto& d : e.categorical_deltas) {
    cats[schema.at(d.feature).name] =
        Json{{"minus_one", d.minus ? Json(*d.minus) : Json(nullptr)},
             {"plus_one", d.plus ? Json(*d.plus) : Json(nullptr)},
             {"dominant", d.dominant() ? Json(*d.dominant()) : Json(nullptr)}};
  }
  return Json{{"sample_index", e.sample_index},
              {"output", e.output},
              {"gradient_importances", std::move(grads)},
              {"categorical_deltas", std::move(cats)}};
}

Json to_json(const PatternReport& r, const Schema& schema) {
  Json j{{"empty", r.empty},
         {"rejected_count", r.rejected_count},
         {"dominance_threshold", r.dominance_threshold}};
  Json patterns = Json::array();
  Json dominant = Json::array();
  for (const auto& fp : r.patterns) {
    Json values = Json::array();
    for (const auto& v : fp.values) {
      values.push_back(Json{{"value", v.value}, {"count", v.count}, {"share", v.share},
                            {"dominant", v.dominant}});
      if (v.dominant) {
        dominant.push_back(Json{{"feature", schema.at(fp.feature).name},
                                {"value", v.value},
                                {"share", v.share}});
      }
    }
    patterns.push_back(Json{{"feature", schema.at(fp.feature).name}, {"values", std::move(values)}});
  }
  j["dominant_patterns"] = std::move(dominant);
  j["patterns"] = std::move(patterns);
  return j;
}

Json to_json(const Scenario& s) {
  Json j{{"name", to_string(s.kind)},
         {"dimension", s.dimension},
         {"intercept", s.intercept},
         {"coefficients", s.coefficients},
         {"box", Json::array({s.box_lo, s.box_hi})}};
  if (s.kind == ScenarioKind::diminishing_marginal) {
    j["saturation_effect"] = s.saturation_effect;
    j["saturation"] = s.saturation;
    j["linear_effect"] = s.linear_effect;
    j["count_max"] = s.count_max;
  }
  if (s.kind == ScenarioKind::bump) {
    j["center"] = s.center;
    j["width"] = s.width;
    j["height"] = s.height;
  }
  return j;
}

Scenario scenario_from_json(const Json& j) {
  Scenario s = default_scenario(scenario_kind_from_string(required<std::string>(j, "name")));
  if (j.contains("dimension")) s.dimension = j.at("dimension");
  if (j.contains("intercept")) s.intercept = j.at("intercept");
  if (j.contains("coefficients")) s.coefficients = j.at("coefficients").get<std::vector<double>>();
  if (j.contains("box")) {
    s.box_lo = j.at("box").at(0);
    s.box_hi = j.at("box").at(1);
  }
  if (j.contains("saturation_effect")) s.saturation_effect = j.at("saturation_effect");
  if (j.contains("saturation")) s.saturation = j.at("saturation");
  if (j.contains("linear_effect")) s.linear_effect = j.at("linear_effect");
  if (j.contains("count_max")) s.count_max = j.at("count_max");
  if (j.contains("center")) s.center = j.at("center").get<std::vector<double>>();
  if (j.contains("width")) s.width = j.at("width");
  if (j.contains("height")) s.height = j.at("height");
  s.validate();
  return s;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path& path) {
  return dataset_from_json(read_json_file(path));
}

void save_dataset(const std::filesystem::path& path, const Dataset& d) {
  write_text_file(path, to_json(d).dump() + "\n");
}

}  // namespace credsel
