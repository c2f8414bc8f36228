// Command-line front end for the selective credit-risk pipeline.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "credsel/bounds.hpp"
#include "credsel/pipeline.hpp"

using namespace credsel;

namespace {

constexpr int kUsage = 2;

// Thrown for flag combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

FittedModel load_model(const std::string& path) { return fitted_model_from_json(read_json_file(path)); }

int run_ingest(const std::string& dataset, const std::string& input, bool no_header,
               const std::optional<std::string>& schema_path, const std::string& out) {
  const CsvOptions csv{.header = !no_header};
  std::optional<Dataset> d;
  if (dataset == "taiwan") {
    d = load_taiwan(input, csv);
  } else if (dataset == "gmsc") {
    d = load_gmsc(input, csv);
  } else {
    std::optional<Schema> schema;
    if (schema_path) schema = schema_from_json(read_json_file(*schema_path));
    d = load_generic(input, csv, schema);
  }
  save_dataset(out, *d);
  std::cout << "ingested " << d->n() << " rows x " << d->p() << " features, default share "
            << d->default_share() << " -> " << out << '\n';
  return 0;
}

int run_train(const std::string& kind_name, const std::string& data_path,
              const std::optional<std::string>& labels_path, std::uint64_t seed, int epochs,
              const std::optional<std::string>& trace_path, const std::string& out) {
  const ModelKind kind = model_kind_from_string(kind_name);
  if (kind == ModelKind::mlp5 && !labels_path) {
    throw UsageError("--model diffnet requires --labels (selective labels)");
  }
  Dataset raw = load_dataset(data_path);
  if (labels_path) {
    const SelectiveLabels z = selective_labels_from_json(read_json_file(*labels_path));
    raw = raw.relabeled(z.z);
  }
  const ScalerParams scaler = fit_scaler(raw);
  const Dataset data = scaler.apply(raw);
  TrainConfig config;
  config.seed = seed;
  config.max_epochs = epochs;
  const TrainResult r = train(kind, data, config);
  const FittedModel fitted{r.model, kind, raw.schema(), scaler, seed, r.trace.epochs_run,
                           r.trace.final_loss(), r.trace.degenerate};
  write_json_file(out, to_json(fitted));
  if (trace_path) write_text_file(*trace_path, r.trace.to_csv());
  std::cout << to_string(kind) << ": " << r.trace.epochs_run << " epochs, loss "
            << r.trace.initial_loss << " -> " << r.trace.final_loss()
            << (r.trace.degenerate ? " (single-class labels, constant model)" : "") << '\n';
  return 0;
}

int run_selective(const std::string& lr_path, const std::string& nn_path,
                  const std::string& data_path, const std::string& variant, double tau,
                  const std::string& out) {
  const FittedModel lr = load_model(lr_path);
  const FittedModel nn = load_model(nn_path);
  const Dataset raw = load_dataset(data_path);
  const auto nn_pred = model_predictions(nn.model, nn.prepare(raw), Threshold(tau));
  const auto lr_pred = model_predictions(lr.model, lr.prepare(raw), Threshold(tau));
  const SelectiveLabels z = selective_labels_from_predictions(
      nn_pred, lr_pred, raw.labels(), selective_variant_from_string(variant));
  write_json_file(out, to_json(z));
  std::cout << "rejected " << z.rejected_count() << " of " << z.z.size() << " samples\n";
  return 0;
}

int run_evaluate(const std::string& model_path, const std::optional<std::string>& reject_path,
                 const std::string& data_path, double tau, const std::string& report_path) {
  const FittedModel m = load_model(model_path);
  const Dataset raw = load_dataset(data_path);
  const Dataset data = m.prepare(raw);
  const ModelEvaluation eval = evaluate_model(m.model, data, Threshold(tau));
  Json report;
  report["schema_version"] = kReportSchemaVersion;
  report["model_kind"] = to_string(m.kind);
  report["n"] = data.n();
  report["tau"] = tau;
  report["evaluation"] = to_json(eval, true);
  std::cout << "error " << eval.error;
  if (eval.roc) std::cout << ", AUC " << eval.roc->auc;
  if (eval.recall) std::cout << ", recall " << *eval.recall;
  std::cout << '\n';

  if (reject_path) {
    const FittedModel g = load_model(*reject_path);
    const auto g_pred = model_predictions(g.model, g.prepare(raw), Threshold(0.5));
    const auto pred = model_predictions(m.model, data, Threshold(tau));
    std::vector<std::size_t> rejected;
    std::size_t rejected_wrong = 0;
    std::size_t accepted_wrong = 0;
    for (std::size_t i = 0; i < g_pred.size(); ++i) {
      const bool wrong = pred[i] != data.labels()[i];
      if (g_pred[i] == 0) {
        rejected.push_back(i);
        rejected_wrong += wrong;
      } else {
        accepted_wrong += wrong;
      }
    }
    const std::size_t accepted = data.n() - rejected.size();
    auto share = [](std::size_t a, std::size_t b) { return b ? Json(double(a) / double(b)) : Json(nullptr); };
    report["rejection"] = {{"rejected", rejected.size()},
                           {"rejection_rate", double(rejected.size()) / double(data.n())},
                           {"rejected_set_error", share(rejected_wrong, rejected.size())},
                           {"accepted_set_error", share(accepted_wrong, accepted)},
                           {"rejected_indices", rejected}};
    std::cout << "rejected " << rejected.size() << " of " << data.n() << '\n';
  }
  write_json_file(report_path, report);
  return 0;
}

int run_explain(const std::string& model_path, const std::string& data_path, bool global,
                const std::optional<std::size_t>& local_index, bool patterns,
                const std::optional<std::string>& lr_path,
                const std::optional<std::string>& nn_path, double dominance,
                const std::string& out) {
  if (int(global) + int(local_index.has_value()) + int(patterns) != 1) {
    throw UsageError("choose exactly one of --global, --local-sample, --patterns");
  }
  const FittedModel m = load_model(model_path);
  const Dataset data = m.prepare(load_dataset(data_path));
  const Schema& schema = data.schema();
  Json j;
  if (global) {
    const GlobalImportance g = global_importance(m.model, data, to_string(m.kind));
    j = to_json(g, schema);
    for (std::size_t rank = 0; const std::size_t f : g.ranking()) {
      if (rank++ == 5) break;
      std::cout << "x" << (f + 1) << " " << schema[f].name << " " << g.lambdas[f] << '\n';
    }
  } else if (local_index) {
    if (*local_index >= data.n()) throw UsageError("--local-sample is out of range");
    j = to_json(local_explanation(m.model, data, *local_index), schema);
  } else {
    if (!lr_path || !nn_path) throw UsageError("--patterns requires --lr and --nn");
    const FittedModel lr = load_model(*lr_path);
    const FittedModel nn = load_model(*nn_path);
    const Dataset raw = load_dataset(data_path);
    const auto nn_pred = model_predictions(nn.model, nn.prepare(raw));
    const auto lr_pred = model_predictions(lr.model, lr.prepare(raw));
    const RejectionSummary rs =
        rejection_summary(m.model, data, Threshold(0.5), nn_pred, lr_pred);
    // The scatter plots show model outputs, so each model sees its own scaling.
    PatternReport report = pattern_report_for(rs.rejected_indices, nn.model, lr.model,
                                              nn.prepare(raw), dominance);
    if (lr.scaler != nn.scaler) {
      const Dataset lr_data = lr.prepare(raw);
      for (auto& [feature, points] : report.scatter) {
        for (auto& p : points) p.lr_output = forward(lr.model, lr_data.row(p.index));
      }
    }
    j = to_json(report, schema);
    j["rejection"] = to_json(rs);
    std::cout << "rejected " << rs.rejected_indices.size() << " of " << data.n() << '\n';
  }
  write_json_file(out, j);
  return 0;
}

int run_bounds(std::int64_t n, const std::optional<std::int64_t>& n_test,
               const std::vector<double>& epsilon, const std::optional<double>& delta) {
  if (epsilon.empty() == !delta.has_value()) throw UsageError("choose one of --epsilon or --delta");
  Json j;
  j["n"] = n;
  j["n_test"] = n_test ? Json(*n_test) : Json(nullptr);
  std::printf("%-12s %-12s %-14s %s\n", "n", "n_test", "epsilon", "bound");
  if (delta) {
    const double eps = epsilon_for_confidence(n, *delta);
    j["delta"] = *delta;
    j["epsilon"] = eps;
    std::printf("%-12lld %-12s %-14.6g %.6g (delta)\n", static_cast<long long>(n), "-", eps, *delta);
    if (n_test) {
      const double eps_test = epsilon_for_confidence(*n_test, *delta);
      j["epsilon_test"] = eps_test;
      std::printf("%-12s %-12lld %-14.6g %.6g (delta)\n", "-", static_cast<long long>(*n_test),
                  eps_test, *delta);
    }
  } else {
    const double e1 = epsilon[0];
    const double e2 = epsilon.size() > 1 ? epsilon[1] : e1;
    const double b = n_test ? train_test_bound(n, *n_test, e1, e2) : train_bound(n, e1);
    j["epsilon"] = epsilon;
    j["bound"] = b;
    j["vacuous"] = vacuous(b);
    const std::string eps_text =
        n_test ? std::to_string(e1) + "+" + std::to_string(e2) : std::to_string(e1);
    const std::string n_test_text = n_test ? std::to_string(*n_test) : "-";
    std::printf("%-12lld %-12s %-14s %.6g%s\n", static_cast<long long>(n), n_test_text.c_str(),
                eps_text.c_str(), b, vacuous(b) ? " (vacuous)" : "");
  }
  std::cout << j.dump() << '\n';
  return 0;
}

int run_synth(const std::string& scenario_name, std::size_t n, std::uint64_t seed,
              const std::string& out) {
  Scenario scenario;
  if (scenario_name.ends_with(".json")) {
    scenario = scenario_from_json(read_json_file(scenario_name));
  } else {
    scenario = default_scenario(scenario_kind_from_string(scenario_name));
  }
  const SyntheticSample s = sample(scenario, n, seed);
  Json j = to_json(s.data);
  j["scenario"] = to_json(scenario);
  j["true_probability"] = s.true_probability;
  write_text_file(out, j.dump() + "\n");
  std::cout << "sampled " << n << " rows, default share " << s.data.default_share() << '\n';
  return 0;
}

int run_pipeline_command(const std::string& config_path, const std::optional<std::string>& out,
                         const std::optional<std::uint64_t>& split_seed,
                         const std::optional<std::string>& input) {
  RunConfig config;
  try {
    config = run_config_from_json(read_json_file(config_path));
  } catch (const std::exception& e) {
    throw StageError(Stage::config, e.what());
  }
  if (out) config.output_dir = *out;
  if (split_seed) config.split_seed = *split_seed;
  if (input) config.input = *input;
  const PipelineResult r = run_pipeline(config);
  std::printf("LR  error %.4f  AUC %s\n", r.lr_test.error,
              r.lr_test.roc ? std::to_string(r.lr_test.roc->auc).c_str() : "n/a");
  std::printf("NN  error %.4f  AUC %s\n", r.nn_test.error,
              r.nn_test.roc ? std::to_string(r.nn_test.roc->auc).c_str() : "n/a");
  std::printf("Difference Net error %.4f, rejected %.4f of test set\n", r.diffnet_test_error,
              r.test_rejection.rejection_rate);
  std::cout << "outputs written to " << config.output_dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpretable selective learning for credit risk"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest", "Validate a raw CSV and write the canonical dataset");
  std::string dataset, input, out;
  bool no_header = false;
  std::optional<std::string> schema_path;
  ingest->add_option("--dataset", dataset, "Source layout")
      ->required()
      ->check(CLI::IsMember({"taiwan", "gmsc", "generic"}));
  ingest->add_option("--input", input, "CSV file")->required()->check(CLI::ExistingFile);
  ingest->add_flag("--no-header", no_header, "The CSV has no header row");
  ingest->add_option("--schema", schema_path, "Schema JSON for generic data")
      ->check(CLI::ExistingFile);
  ingest->add_option("--out", out, "Output dataset JSON")->required();

  auto* train_cmd = app.add_subcommand("train", "Train a model on a canonical dataset");
  std::string model_kind, data_path;
  std::optional<std::string> labels_path, trace_path;
  std::uint64_t seed = 0;
  int epochs = 500;
  train_cmd->add_option("--model", model_kind, "Model type")
      ->required()
      ->check(CLI::IsMember({"lr", "nn", "diffnet"}));
  train_cmd->add_option("--data", data_path, "Dataset JSON")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--labels", labels_path, "Selective labels JSON (diffnet)")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--seed", seed, "Initialisation seed")->required();
  train_cmd->add_option("--epochs", epochs, "Maximum CG epochs")->required()->check(CLI::PositiveNumber);
  train_cmd->add_option("--trace", trace_path, "Write the loss trace CSV here");
  train_cmd->add_option("--out", out, "Output model JSON")->required();

  auto* selective = app.add_subcommand("selective", "Derive selective labels from two models");
  std::string lr_path, nn_path, variant;
  double tau = 0.5;
  selective->add_option("--lr", lr_path, "Logistic model JSON")->required()->check(CLI::ExistingFile);
  selective->add_option("--nn", nn_path, "Network model JSON")->required()->check(CLI::ExistingFile);
  selective->add_option("--data", data_path, "Dataset JSON")->required()->check(CLI::ExistingFile);
  selective->add_option("--variant", variant, "Label rule")
      ->required()
      ->check(CLI::IsMember({"ideal", "practical"}));
  selective->add_option("--tau", tau, "Decision threshold")->check(CLI::Range(0.0, 1.0));
  selective->add_option("--out", out, "Output labels JSON")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a model, optionally with a reject model");
  std::string model_path, report_path;
  std::optional<std::string> reject_path;
  evaluate->add_option("--model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--reject", reject_path, "Difference Net JSON")->check(CLI::ExistingFile);
  evaluate->add_option("--data", data_path, "Dataset JSON")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--tau", tau, "Decision threshold")->check(CLI::Range(0.0, 1.0));
  evaluate->add_option("--report", report_path, "Output report JSON")->required();

  auto* explain = app.add_subcommand("explain", "Explain a model");
  bool global = false, patterns = false;
  std::optional<std::size_t> local_index;
  std::optional<std::string> explain_lr, explain_nn;
  double dominance = 0.5;
  explain->add_option("--model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  explain->add_option("--data", data_path, "Dataset JSON")->required()->check(CLI::ExistingFile);
  auto* g_flag = explain->add_flag("--global", global, "Global feature importance");
  auto* l_opt = explain->add_option("--local-sample", local_index, "Local explanation of one row");
  auto* p_flag = explain->add_flag("--patterns", patterns, "Rejected-set patterns (--model is the Difference Net)");
  g_flag->excludes(l_opt)->excludes(p_flag);
  l_opt->excludes(p_flag);
  explain->add_option("--lr", explain_lr, "Logistic model JSON for --patterns")->check(CLI::ExistingFile);
  explain->add_option("--nn", explain_nn, "Network model JSON for --patterns")->check(CLI::ExistingFile);
  explain->add_option("--dominance", dominance, "Pattern dominance threshold")->check(CLI::Range(0.0, 1.0));
  explain->add_option("--out", out, "Output JSON")->required();

  auto* bounds = app.add_subcommand("bounds", "Hoeffding bounds on rejection rates");
  std::int64_t n = 0;
  std::optional<std::int64_t> n_test;
  std::vector<double> epsilon;
  std::optional<double> delta;
  bounds->add_option("--n", n, "Training sample size")->required()->check(CLI::PositiveNumber);
  bounds->add_option("--n-test", n_test, "Test sample size")->check(CLI::PositiveNumber);
  auto* eps_opt = bounds->add_option("--epsilon", epsilon, "Deviation(s) E [E2]")->expected(1, 2);
  auto* delta_opt = bounds->add_option("--delta", delta, "Confidence level");
  eps_opt->excludes(delta_opt);

  auto* synth = app.add_subcommand("synth", "Sample a synthetic population");
  std::string scenario;
  std::size_t synth_n = 0;
  synth->add_option("--scenario", scenario, "linear, diminishing_marginal, bump or a scenario JSON")
      ->required();
  synth->add_option("--n", synth_n, "Sample size")->required()->check(CLI::PositiveNumber);
  synth->add_option("--seed", seed, "Sampling seed")->required();
  synth->add_option("--out", out, "Output dataset JSON")->required();

  auto* pipeline = app.add_subcommand("pipeline", "Run every stage from a JSON config");
  std::string config_path;
  std::optional<std::string> pipeline_out, pipeline_input;
  std::optional<std::uint64_t> split_seed;
  pipeline->add_option("--config", config_path, "Run config JSON")->required()->check(CLI::ExistingFile);
  pipeline->add_option("--out", pipeline_out, "Override output_dir");
  pipeline->add_option("--split-seed", split_seed, "Override split_seed");
  pipeline->add_option("--input", pipeline_input, "Override input");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  Stage stage = Stage::report;
  try {
    if (ingest->parsed()) {
      stage = Stage::ingest;
      return run_ingest(dataset, input, no_header, schema_path, out);
    }
    if (train_cmd->parsed()) {
      stage = Stage::train;
      return run_train(model_kind, data_path, labels_path, seed, epochs, trace_path, out);
    }
    if (selective->parsed()) {
      stage = Stage::selective;
      return run_selective(lr_path, nn_path, data_path, variant, tau, out);
    }
    if (evaluate->parsed()) {
      stage = Stage::evaluate;
      return run_evaluate(model_path, reject_path, data_path, tau, report_path);
    }
    if (explain->parsed()) {
      stage = Stage::explain;
      return run_explain(model_path, data_path, global, local_index, patterns, explain_lr,
                         explain_nn, dominance, out);
    }
    if (bounds->parsed()) {
      stage = Stage::bounds;
      return run_bounds(n, n_test, epsilon, delta);
    }
    if (synth->parsed()) {
      stage = Stage::ingest;
      return run_synth(scenario, synth_n, seed, out);
    }
    if (pipeline->parsed()) return run_pipeline_command(config_path, pipeline_out, split_seed, pipeline_input);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const StageError& e) {
    std::cerr << "error [" << to_string(e.stage()) << "]: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error [" << to_string(stage) << "]: " << e.what() << '\n';
    return static_cast<int>(stage);
  }
  return kUsage;
}
