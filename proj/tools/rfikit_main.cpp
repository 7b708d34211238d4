#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rfikit/features.hpp"
#include "rfikit/pipeline.hpp"
#include "rfikit/simulator.hpp"

namespace {

using namespace rfikit;

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_override) {
    SimulationConfig config = load_simulation_config(config_path);
    if (seed_override) {
        config.seed = *seed_override;
    }
    const Dataset ds = generate_dataset(config, out_dir);
    std::size_t jammed = 0;
    std::size_t epochs = 0;
    for (const auto& rec : ds.recordings) {
        jammed += static_cast<std::size_t>(rec.label);
        epochs += rec.epochs;
    }
    const double mean_t = static_cast<double>(epochs) / static_cast<double>(ds.recordings.size());
    std::printf("flights: %zu  jammed: %zu  prevalence: %.4f  mean T: %.1f\n",
                ds.recordings.size(), jammed,
                static_cast<double>(jammed) / static_cast<double>(ds.recordings.size()), mean_t);
    std::printf("manifest: %s\n", ds.manifest_path.c_str());
    return 0;
}

int cmd_featurize(const std::string& manifest_path, const std::string& out_path) {
    const Dataset ds = load_dataset_manifest(manifest_path);
    const FeatureMatrix fm = extract_features(ds);
    write_feature_csv(fm, out_path);
    std::printf("flights: %zu  features per flight: %zu\n", fm.size(), kFeatureDim);
    return 0;
}

int cmd_train(const std::string& manifest_path, const TrainOptions& options,
              const std::string& out_path) {
    const Dataset ds = load_dataset_manifest(manifest_path);
    const TrainResult result = train_pipeline(ds, options);
    save_model(result.model, out_path);
    if (!result.warning.empty()) {
        std::fprintf(stderr, "warning: %s\n", result.warning.c_str());
    }
    if (result.model.linear) {
        std::printf("iterations: %zu  final grad norm: %.3g\n", result.model.linear->iterations,
                    result.model.linear->final_grad_norm);
    }
    if (result.model.gbdt) {
        std::printf("trees: %zu\n", result.model.gbdt->trees.size());
    }
    std::printf("model written: %s\n", out_path.c_str());
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& manifest_path,
                 const std::string& report_path, const std::string& scores_path) {
    const ModelFile model = load_model(model_path);
    const Dataset ds = load_dataset_manifest(manifest_path);
    const EvaluateResult result = evaluate_pipeline(model, ds);
    std::fputs(format_report(result.report).c_str(), stdout);
    std::printf("mean per-flight inference: %.3g s\n", result.report.mean_inference_seconds);
    if (!report_path.empty()) {
        write_report(result.report, report_path);
    }
    if (!scores_path.empty()) {
        std::vector<std::string> ids;
        std::vector<double> scores;
        std::vector<int> labels;
        std::vector<int> predictions;
        for (std::size_t i = 0; i < result.scores.size(); ++i) {
            ids.push_back(result.scores[i].flight_id);
            scores.push_back(result.scores[i].score);
            predictions.push_back(result.scores[i].prediction);
            labels.push_back(ds.recordings[i].label);
        }
        write_score_csv(ids, scores, labels, predictions, scores_path);
    }
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& flight_path) {
    const ModelFile model = load_model(model_path);
    const FlightRecording rec = parse_flight_csv(flight_path);
    const FlightScore fs = score_flight(model, rec);
    std::printf("%s,%.9g,%d\n", fs.flight_id.c_str(), fs.score, fs.prediction);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GNSS RFI detection toolkit: simulate flights, extract features, "
                 "train and evaluate detectors"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out;
    std::string manifest;
    std::string model_path;
    std::string report_path;
    std::string scores_path;
    std::string flight_path;
    std::string kind_name = "gbdt";
    std::optional<std::uint64_t> seed;

    TrainOptions options;

    auto* simulate = app.add_subcommand("simulate", "Generate a labeled synthetic dataset");
    simulate->add_option("--config", config_path, "Simulation config file")->required();
    simulate->add_option("--out", out, "Output directory")->required();
    simulate->add_option("--seed", seed, "Override the config seed");

    auto* featurize = app.add_subcommand("featurize", "Dump the per-flight feature matrix");
    featurize->add_option("--manifest", manifest, "Dataset manifest")->required();
    featurize->add_option("--out", out, "Output CSV path")->required();

    auto* train = app.add_subcommand("train", "Train a detector from a manifest");
    train->add_option("--manifest", manifest, "Dataset manifest")->required();
    train->add_option("--model-kind", kind_name, "range|linear|gbdt")->required();
    train->add_option("--out", out, "Model output path")->required();
    train->add_option("--threshold", options.threshold, "Probability cut for the linear model");
    train->add_option("--l2", options.logistic.l2, "Ridge strength (linear)");
    train->add_option("--max-iters", options.logistic.max_iters, "Gradient-descent cap (linear)");
    train->add_option("--n-trees", options.gbdt.n_trees, "Boosting rounds (gbdt)");
    train->add_option("--learning-rate", options.gbdt.learning_rate, "Shrinkage (gbdt)");
    train->add_option("--max-leaves", options.gbdt.max_leaves, "Leaves per tree (gbdt)");
    train->add_flag("--range-normal-only", options.range_normal_only,
                    "Fit the range envelope on normal flights only");

    auto* evaluate = app.add_subcommand("evaluate", "Evaluate a model on a manifest");
    evaluate->add_option("--model", model_path, "Model file")->required();
    evaluate->add_option("--manifest", manifest, "Dataset manifest")->required();
    evaluate->add_option("--report", report_path, "Write a machine-readable report here");
    evaluate->add_option("--scores", scores_path, "Write per-flight scores CSV here");

    auto* predict = app.add_subcommand("predict", "Score a single flight CSV");
    predict->add_option("--model", model_path, "Model file")->required();
    predict->add_option("--flight", flight_path, "Flight CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            return cmd_simulate(config_path, out, seed);
        }
        if (featurize->parsed()) {
            return cmd_featurize(manifest, out);
        }
        if (train->parsed()) {
            const auto kind = rfikit::parse_model_kind(kind_name);
            if (!kind) {
                std::fprintf(stderr, "error: unknown model kind \"%s\" (expected range|linear|gbdt)\n",
                             kind_name.c_str());
                return 2;
            }
            options.kind = *kind;
            return cmd_train(manifest, options, out);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(model_path, manifest, report_path, scores_path);
        }
        if (predict->parsed()) {
            return cmd_predict(model_path, flight_path);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
