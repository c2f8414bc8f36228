#include "credsel/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "credsel/bounds.hpp"
#include "credsel/digest.hpp"
#include "credsel/random.hpp"
#include "credsel/svg.hpp"

namespace credsel {
namespace {

// Runs `f`, tagging any failure with `stage`.
template <class F>
auto in_stage(Stage stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

std::string file_stem(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    out += keep ? c : '_';
  }
  return out;
}

std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Writes files under the output directory and records their digests.
class OutputWriter {
 public:
  OutputWriter(std::filesystem::path dir, std::set<std::string> formats)
      : dir_(std::move(dir)), formats_(std::move(formats)) {}

  bool wants(const std::string& format) const { return formats_.contains(format); }

  void json(const std::string& name, const Json& j) {
    write_json_file(dir_ / name, j);
    record(name);
  }
  void text(const std::string& name, const std::string& body) {
    write_text_file(dir_ / name, body);
    record(name);
  }
  void csv(const std::string& name, const std::string& body) {
    if (wants("csv")) text(name, body);
  }
  void svg(const std::string& name, const std::string& body) {
    if (wants("svg")) text(name, body);
  }

  Json file_list() const {
    Json files = Json::array();
    for (const auto& [name, digest] : digests_) files.push_back({{"path", name}, {"sha256", digest}});
    return files;
  }

 private:
  void record(const std::string& name) { digests_[name] = sha256_file(dir_ / name); }

  std::filesystem::path dir_;
  std::set<std::string> formats_;
  std::map<std::string, std::string> digests_;
};

Json trace_json(const TrainTrace& t) {
  return {{"epochs", t.epochs_run},
          {"initial_loss", t.initial_loss},
          {"final_loss", t.final_loss()},
          {"final_gradient_norm", t.final_gradient_norm},
          {"converged", t.converged},
          {"degenerate", t.degenerate},
          {"line_search_failures", t.line_search_failures}};
}

FittedModel fitted(const TrainResult& r, ModelKind kind, const Schema& schema,
                   const ScalerParams& scaler, const TrainConfig& config) {
  return FittedModel{r.model,     kind, schema, scaler, config.seed, r.trace.epochs_run,
                     r.trace.final_loss(), r.trace.degenerate};
}

std::vector<std::size_t> resolve_logit_features(const RunConfig& config, const Schema& schema) {
  std::vector<std::size_t> out;
  if (!config.logit_features.empty()) {
    for (const auto& name : config.logit_features) {
      const auto it = std::find_if(schema.begin(), schema.end(),
                                   [&](const FeatureSpec& f) { return f.name == name; });
      if (it == schema.end()) throw std::invalid_argument("unknown logit feature '" + name + "'");
      if (!it->categorical()) {
        throw std::invalid_argument("logit feature '" + name + "' is not categorical");
      }
      out.push_back(static_cast<std::size_t>(it - schema.begin()));
    }
    return out;
  }
  if (config.dataset == "gmsc") return {2, 6, 8};
  if (config.dataset == "taiwan") return {5};
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (schema[j].categorical()) out.push_back(j);
  }
  return out;
}

Json bounds_section(const RunConfig& config, std::size_t n_train, std::size_t n_test,
                    const SelectiveLabels& train_labels, const SelectiveLabels& test_labels) {
  const auto nt = static_cast<std::int64_t>(n_train);
  const auto ns = static_cast<std::int64_t>(n_test);
  const double eps = config.bound_epsilon;
  const double b1 = train_bound(nt, eps);
  const double b2 = train_test_bound(nt, ns, eps, eps);
  const double gamma_train =
      static_cast<double>(train_labels.rejected_count()) / static_cast<double>(n_train);
  const double gamma_test =
      static_cast<double>(test_labels.rejected_count()) / static_cast<double>(n_test);
  return {{"epsilon", eps},
          {"delta", config.bound_delta},
          {"n_train", n_train},
          {"n_test", n_test},
          {"train_bound", b1},
          {"train_bound_vacuous", vacuous(b1)},
          {"train_test_bound", b2},
          {"train_test_bound_vacuous", vacuous(b2)},
          {"epsilon_for_confidence", epsilon_for_confidence(nt, config.bound_delta)},
          {"gamma_train", gamma_train},
          {"gamma_test", gamma_test},
          {"gamma_gap", std::abs(gamma_train - gamma_test)}};
}

std::string importance_csv(const GlobalImportance& g, const Schema& schema) {
  std::ostringstream os;
  os << "feature,name,lambda\n";
  for (std::size_t j = 0; j < g.lambdas.size(); ++j) {
    os << (j + 1) << ',' << schema[j].name << ',' << csv_number(g.lambdas[j]) << '\n';
  }
  return os.str();
}

std::string logit_csv(const std::vector<LogitPoint>& points) {
  std::ostringstream os;
  os << "value,mean_logit\n";
  for (const auto& p : points) os << csv_number(p.value) << ',' << csv_number(p.mean_logit) << '\n';
  return os.str();
}

}  // namespace

std::string to_string(Stage s) {
  switch (s) {
    case Stage::config: return "config";
    case Stage::ingest: return "ingest";
    case Stage::prepare: return "prepare";
    case Stage::train: return "train";
    case Stage::selective: return "selective";
    case Stage::evaluate: return "evaluate";
    case Stage::explain: return "explain";
    case Stage::bounds: return "bounds";
    case Stage::report: return "report";
  }
  return "unknown";
}

void RunConfig::validate() const {
  static const std::set<std::string> kDatasets{"taiwan", "gmsc", "generic", "synthetic"};
  static const std::set<std::string> kFormats{"json", "csv", "svg"};
  if (!kDatasets.contains(dataset)) throw std::invalid_argument("unknown dataset '" + dataset + "'");
  if (dataset == "synthetic") {
    scenario.validate();
    if (synthetic_n < 2) throw std::invalid_argument("synthetic_n must be >= 2");
  } else {
    if (input.empty()) throw std::invalid_argument("input path is required for " + dataset);
    if (!std::filesystem::exists(input)) {
      throw std::invalid_argument("input file not found: " + input.string());
    }
  }
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw std::invalid_argument("split_fraction must lie in (0,1)");
  }
  static_cast<void>(Threshold(tau));
  if (!(dominance_threshold > 0.0 && dominance_threshold <= 1.0)) {
    throw std::invalid_argument("dominance_threshold must lie in (0,1]");
  }
  if (logit_grid.empty()) throw std::invalid_argument("logit_grid is empty");
  if (!(bound_epsilon > 0.0)) throw std::invalid_argument("bound_epsilon must be > 0");
  if (!(bound_delta > 0.0 && bound_delta < 1.0)) {
    throw std::invalid_argument("bound_delta must lie in (0,1)");
  }
  if (rejection_mc_samples < 1000) throw std::invalid_argument("rejection_mc_samples must be >= 1000");
  lr.validate();
  nn.validate();
  diffnet.validate();
  for (const auto& f : formats) {
    if (!kFormats.contains(f)) throw std::invalid_argument("unknown report format '" + f + "'");
  }
  if (output_dir.empty()) throw std::invalid_argument("output_dir is required");
}

Json to_json(const RunConfig& c) {
  Json j;
  j["dataset"] = c.dataset;
  j["input"] = c.input.string();
  j["no_header"] = c.no_header;
  j["scenario"] = to_json(c.scenario);
  j["synthetic_n"] = c.synthetic_n;
  j["synthetic_seed"] = c.synthetic_seed;
  j["split_fraction"] = c.split_fraction;
  j["split_seed"] = c.split_seed;
  j["tau"] = c.tau;
  j["lr"] = to_json(c.lr);
  j["nn"] = to_json(c.nn);
  j["diffnet"] = to_json(c.diffnet);
  j["variant"] = to_string(c.variant);
  j["dominance_threshold"] = c.dominance_threshold;
  j["logit_features"] = c.logit_features;
  j["logit_grid"] = c.logit_grid;
  j["bound_epsilon"] = c.bound_epsilon;
  j["bound_delta"] = c.bound_delta;
  j["rejection_mc_samples"] = c.rejection_mc_samples;
  j["output_dir"] = c.output_dir.string();
  j["formats"] = c.formats;
  return j;
}

RunConfig run_config_from_json(const Json& j, RunConfig c) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const std::set<std::string> kKeys{
      "dataset", "input", "no_header", "scenario", "synthetic_n", "synthetic_seed",
      "split_fraction", "split_seed", "tau", "lr", "nn", "diffnet", "variant",
      "dominance_threshold", "logit_features", "logit_grid", "bound_epsilon", "bound_delta",
      "rejection_mc_samples", "output_dir", "formats"};
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.contains(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  }
  if (j.contains("dataset")) c.dataset = j["dataset"].get<std::string>();
  if (j.contains("input")) c.input = j["input"].get<std::string>();
  if (j.contains("no_header")) c.no_header = j["no_header"].get<bool>();
  if (j.contains("scenario")) c.scenario = scenario_from_json(j["scenario"]);
  if (j.contains("synthetic_n")) c.synthetic_n = j["synthetic_n"].get<std::size_t>();
  if (j.contains("synthetic_seed")) c.synthetic_seed = j["synthetic_seed"].get<std::uint64_t>();
  if (j.contains("split_fraction")) c.split_fraction = j["split_fraction"].get<double>();
  if (j.contains("split_seed")) c.split_seed = j["split_seed"].get<std::uint64_t>();
  if (j.contains("tau")) c.tau = j["tau"].get<double>();
  if (j.contains("lr")) c.lr = train_config_from_json(j["lr"], c.lr);
  if (j.contains("nn")) c.nn = train_config_from_json(j["nn"], c.nn);
  if (j.contains("diffnet")) c.diffnet = train_config_from_json(j["diffnet"], c.diffnet);
  if (j.contains("variant")) c.variant = selective_variant_from_string(j["variant"]);
  if (j.contains("dominance_threshold")) {
    c.dominance_threshold = j["dominance_threshold"].get<double>();
  }
  if (j.contains("logit_features")) {
    c.logit_features = j["logit_features"].get<std::vector<std::string>>();
  }
  if (j.contains("logit_grid")) c.logit_grid = j["logit_grid"].get<std::vector<double>>();
  if (j.contains("bound_epsilon")) c.bound_epsilon = j["bound_epsilon"].get<double>();
  if (j.contains("bound_delta")) c.bound_delta = j["bound_delta"].get<double>();
  if (j.contains("rejection_mc_samples")) {
    c.rejection_mc_samples = j["rejection_mc_samples"].get<std::size_t>();
  }
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("formats")) c.formats = j["formats"].get<std::set<std::string>>();
  return c;
}

Dataset load_configured_dataset(const RunConfig& config) {
  const CsvOptions csv{.header = !config.no_header};
  if (config.dataset == "taiwan") return load_taiwan(config.input, csv);
  if (config.dataset == "gmsc") return load_gmsc(config.input, csv);
  if (config.dataset == "generic") return load_generic(config.input, csv);
  return sample(config.scenario, config.synthetic_n, config.synthetic_seed).data;
}

PipelineResult run_pipeline(const RunConfig& config) {
  in_stage(Stage::config, [&] {
    config.validate();
    std::filesystem::create_directories(config.output_dir);
  });

  OutputWriter out(config.output_dir, config.formats);
  Json manifest;
  manifest["schema_version"] = "credsel.manifest/1";
  manifest["version"] = kVersion;
  manifest["status"] = "incomplete";
  Json manifest_config = to_json(config);
  manifest_config.erase("output_dir");
  manifest["config"] = manifest_config;
  manifest["seeds"] = {{"split", config.split_seed},
                       {"lr", config.lr.seed},
                       {"nn", config.nn.seed},
                       {"diffnet", config.diffnet.seed},
                       {"synthetic", config.synthetic_seed}};
  manifest["input_sha256"] = nullptr;

  auto write_manifest = [&](const std::string& status, const std::string& failed_stage) {
    manifest["status"] = status;
    manifest["failed_stage"] = failed_stage.empty() ? Json(nullptr) : Json(failed_stage);
    manifest["files"] = out.file_list();
    write_json_file(config.output_dir / "manifest.json", manifest);
  };

  try {
    PipelineResult r;
    const Threshold tau(config.tau);
    const Threshold tau_g(0.5);

    const Dataset raw = in_stage(Stage::ingest, [&] {
      Dataset d = load_configured_dataset(config);
      if (config.dataset != "synthetic") manifest["input_sha256"] = sha256_file(config.input);
      return d;
    });
    r.schema = raw.schema();

    auto [train_set, test_set, scaler] = in_stage(Stage::prepare, [&] {
      auto [tr, te] = split(raw, config.split_fraction, config.split_seed);
      Standardized s = standardize(tr, {te});
      return std::tuple{std::move(s.train), std::move(s.others.front()), std::move(s.params)};
    });
    r.scaler = scaler;
    r.n_train = train_set.n();
    r.n_test = test_set.n();

    auto [lr_fit, nn_fit] = in_stage(Stage::train, [&] {
      return std::pair{train(ModelKind::logistic, train_set, config.lr),
                       train(ModelKind::mlp2, train_set, config.nn)};
    });
    r.lr = lr_fit.model;
    r.nn = nn_fit.model;

    auto [train_labels, diffnet_fit] = in_stage(Stage::selective, [&] {
      SelectiveLabels z = make_selective_labels(r.nn, r.lr, train_set, tau, config.variant);
      TrainResult g = train_difference_net(train_set, z, config.diffnet);
      return std::pair{std::move(z), std::move(g)};
    });
    r.diffnet = diffnet_fit.model;
    r.train_labels = train_labels;
    r.diffnet_degenerate = diffnet_fit.trace.degenerate;

    in_stage(Stage::evaluate, [&] {
      r.lr_test = evaluate_model(r.lr, test_set, tau);
      r.nn_test = evaluate_model(r.nn, test_set, tau);
      const auto nn_pred = model_predictions(r.nn, test_set, tau);
      const auto lr_pred = model_predictions(r.lr, test_set, tau);
      r.test_labels =
          selective_labels_from_predictions(nn_pred, lr_pred, test_set.labels(), config.variant);
      const auto g_pred = model_predictions(r.diffnet, test_set, tau_g);
      r.diffnet_test_error = classification_error(g_pred, r.test_labels.z);
      r.test_rejection = rejection_summary(r.diffnet, test_set, tau_g, nn_pred, lr_pred);
      r.rejected_errors =
          rejected_set_errors(r.test_rejection.rejected_indices, r.nn, r.lr, test_set, tau);
      if (config.dataset == "synthetic") {
        auto through = [&](const Model& m) -> ProbabilityFn {
          return [&m, &scaler](std::span<const double> x) {
            return forward(m, scaler.transform(x));
          };
        };
        r.true_rejection =
            true_rejection_rate(config.scenario, through(r.nn), through(r.lr), tau,
                                config.rejection_mc_samples, derive_seed(config.synthetic_seed, 1));
      }
    });

    std::optional<LocalExplanation> local;
    in_stage(Stage::explain, [&] {
      try {
        r.diffnet_importance = global_importance(r.diffnet, train_set, "diffnet");
      } catch (const std::domain_error&) {
        r.diffnet_importance.reset();
      }
      r.patterns = pattern_report_for(r.test_rejection.rejected_indices, r.nn, r.lr, test_set,
                                      config.dominance_threshold);
      for (const auto& fp : r.patterns.patterns) {
        for (const auto& vs : fp.values) {
          if (!vs.dominant) continue;
          for (int dir : {-1, 1}) {
            r.perturbations.push_back(average_perturbation(
                r.nn, test_set, r.test_rejection.rejected_indices, fp.feature, vs.value, dir));
          }
        }
      }
      for (std::size_t j : resolve_logit_features(config, r.schema)) {
        std::vector<double> grid;
        for (double v : config.logit_grid) {
          if (r.schema[j].valid_range.contains(v)) grid.push_back(v);
        }
        if (grid.empty()) continue;
        r.logit_curves.push_back({j, logit_shape(r.nn, train_set, j, grid)});
      }
      const std::size_t sample_index = r.test_rejection.rejected_indices.empty()
                                           ? 0
                                           : r.test_rejection.rejected_indices.front();
      local = local_explanation(r.nn, test_set, sample_index);
    });

    const Json bounds = in_stage(Stage::bounds, [&] {
      return bounds_section(config, r.n_train, r.n_test, r.train_labels, r.test_labels);
    });

    in_stage(Stage::report, [&] {
      const auto& schema = r.schema;
      out.json("lr.json", to_json(fitted(lr_fit, ModelKind::logistic, schema, scaler, config.lr)));
      out.json("nn.json", to_json(fitted(nn_fit, ModelKind::mlp2, schema, scaler, config.nn)));
      out.json("diffnet.json",
               to_json(fitted(diffnet_fit, ModelKind::mlp5, schema, scaler, config.diffnet)));
      out.json("selective_labels.json", to_json(r.train_labels));
      out.json("rejection.json", to_json(r.test_rejection));
      out.csv("rejected_indices.csv", r.test_rejection.indices_csv());

      Json report;
      report["schema_version"] = kReportSchemaVersion;
      report["version"] = kVersion;
      report["dataset"] = {{"name", config.dataset},
                           {"provenance", to_string(raw.provenance())},
                           {"n", raw.n()},
                           {"p", raw.p()},
                           {"n_train", r.n_train},
                           {"n_test", r.n_test},
                           {"default_share_train", train_set.default_share()},
                           {"default_share_test", test_set.default_share()},
                           {"schema_fingerprint", schema_fingerprint(schema)}};
      report["training"] = {{"lr", trace_json(lr_fit.trace)},
                            {"nn", trace_json(nn_fit.trace)},
                            {"diffnet", trace_json(diffnet_fit.trace)}};
      report["evaluation"] = {{"tau", config.tau},
                              {"lr", to_json(r.lr_test)},
                              {"nn", to_json(r.nn_test)}};
      Json selective;
      selective["variant"] = to_string(config.variant);
      selective["tau_g"] = tau_g.value();
      selective["train_rejected"] = r.train_labels.rejected_count();
      selective["test_rejected_labels"] = r.test_labels.rejected_count();
      selective["diffnet_test_error"] = r.diffnet_test_error;
      selective["diffnet_degenerate"] = r.diffnet_degenerate;
      selective["rejection"] = to_json(r.test_rejection);
      selective["rejection"].erase("rejected_indices");
      selective["rejected_set_errors"] =
          r.rejected_errors ? Json{{"lr", r.rejected_errors->lr_error},
                                   {"nn", r.rejected_errors->nn_error}}
                            : Json(nullptr);
      if (r.true_rejection) {
        selective["true_rejection_rate"] = {{"value", r.true_rejection->value},
                                            {"standard_error", r.true_rejection->standard_error}};
      }
      report["selective"] = selective;

      Json explanation;
      explanation["global_importance"] =
          r.diffnet_importance ? to_json(*r.diffnet_importance, schema) : Json(nullptr);
      Json perturbations = Json::array();
      for (const auto& p : r.perturbations) {
        perturbations.push_back({{"feature", p.feature + 1},
                                 {"name", schema[p.feature].name},
                                 {"value", p.value},
                                 {"direction", p.direction},
                                 {"samples", p.samples},
                                 {"mean_delta", p.mean_delta},
                                 {"mean_abs_delta", p.mean_abs_delta}});
      }
      explanation["perturbations"] = perturbations;
      Json curves = Json::array();
      for (const auto& c : r.logit_curves) {
        Json pts = Json::array();
        for (const auto& p : c.points) pts.push_back({{"value", p.value}, {"mean_logit", p.mean_logit}});
        curves.push_back({{"feature", c.feature + 1}, {"name", schema[c.feature].name}, {"points", pts}});
      }
      explanation["logit_shapes"] = curves;
      explanation["local"] = to_json(*local, schema);
      report["explanation"] = explanation;
      report["bounds"] = bounds;
      r.report = report;
      out.json("report.json", report);

      const Json patterns = to_json(r.patterns, schema);
      out.json("patterns.json", patterns);
      for (const auto& [feature, points] : r.patterns.scatter) {
        const std::string stem = file_stem(schema[feature].name);
        out.csv("scatter_" + stem + ".csv", r.patterns.scatter_csv(feature));
        svg::Series s{"rejected", {}, true};
        for (const auto& p : points) s.points.emplace_back(p.lr_output, p.nn_output);
        out.svg("scatter_" + stem + ".svg",
                svg::line_plot({"Rejected samples, " + schema[feature].name, "LR output",
                                "NN output", 0, 1, 0, 1},
                               {s}));
      }

      if (r.diffnet_importance) {
        out.csv("importance.csv", importance_csv(*r.diffnet_importance, schema));
        std::vector<std::string> labels;
        for (std::size_t j = 0; j < schema.size(); ++j) labels.push_back("x" + std::to_string(j + 1));
        out.svg("importance.svg",
                svg::bar_chart("Difference Net global importance", labels,
                               r.diffnet_importance->lambdas));
      }

      std::vector<svg::Series> logit_series;
      for (const auto& c : r.logit_curves) {
        const std::string& name = schema[c.feature].name;
        out.csv("logit_" + file_stem(name) + ".csv", logit_csv(c.points));
        svg::Series s{name, {}, false};
        for (const auto& p : c.points) s.points.emplace_back(p.value, p.mean_logit);
        logit_series.push_back(std::move(s));
      }
      if (!logit_series.empty()) {
        out.svg("logit_shapes.svg",
                svg::line_plot({"NN partial dependence", "feature value", "mean log-odds"},
                               logit_series));
      }

      std::vector<svg::Series> roc_series;
      for (const auto& [name, eval] : {std::pair{"lr", &r.lr_test}, std::pair{"nn", &r.nn_test}}) {
        if (!eval->roc) continue;
        out.csv(std::string("roc_") + name + ".csv", eval->roc->to_csv());
        svg::Series s{name, {}, false};
        for (const auto& p : eval->roc->points) {
          s.points.emplace_back(p.false_positive_rate, p.true_positive_rate);
        }
        roc_series.push_back(std::move(s));
      }
      if (!roc_series.empty()) {
        out.svg("roc.svg", svg::line_plot({"ROC (test set)", "false positive rate",
                                           "true positive rate", 0, 1, 0, 1},
                                          roc_series));
      }

      out.csv("trace_lr.csv", lr_fit.trace.to_csv());
      out.csv("trace_nn.csv", nn_fit.trace.to_csv());
      out.csv("trace_diffnet.csv", diffnet_fit.trace.to_csv());
    });

    in_stage(Stage::report, [&] { write_manifest("complete", ""); });
    r.manifest = manifest;
    return r;
  } catch (const StageError& e) {
    try {
      write_manifest("incomplete", to_string(e.stage()));
    } catch (const std::exception&) {
      // The original stage error is more useful than a secondary I/O failure.
    }
    throw;
  }
}

}  // namespace credsel
