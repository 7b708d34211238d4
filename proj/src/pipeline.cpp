#include "rfikit/pipeline.hpp"

#include <chrono>

namespace rfikit {

TrainResult train_pipeline(const Dataset& dataset, const TrainOptions& options) {
    TrainResult result;
    result.model.kind = options.kind;

    if (options.kind == ModelKind::Range) {
        result.model.range = fit_range(dataset, options.range_normal_only);
        return result;
    }

    const FeatureMatrix raw = extract_features(dataset);
    Standardizer standardizer = fit_standardizer(raw);
    const FeatureMatrix scaled = apply_standardizer(standardizer, raw);
    result.model.standardizer = std::move(standardizer);

    std::size_t positives = 0;
    for (int y : scaled.labels) {
        positives += static_cast<std::size_t>(y);
    }
    if (positives == 0 || positives == scaled.size()) {
        result.warning = "training set contains a single class; model is degenerate";
    }

    if (options.kind == ModelKind::Linear) {
        LinearModel m = train_logistic(scaled, options.logistic);
        m.threshold = options.threshold;
        result.model.linear = std::move(m);
    } else {
        result.model.gbdt = train_gbdt(scaled, options.gbdt);
    }
    return result;
}

FlightScore score_flight(const ModelFile& model, const FlightRecording& recording) {
    FlightScore out;
    out.flight_id = recording.flight_id;

    if (model.kind == ModelKind::Range) {
        if (!model.range) {
            throw ModelIoError("range payload missing");
        }
        const RangeDetection det = detect_flight(*model.range, recording);
        out.score = det.score;
        out.prediction = det.label;
        return out;
    }

    FeatureVector fv = extract_features(recording);
    if (!model.standardizer) {
        throw ModelIoError("standardizer missing from model");
    }
    model.standardizer->apply(fv.values);

    if (model.kind == ModelKind::Linear) {
        if (!model.linear) {
            throw ModelIoError("linear payload missing");
        }
        const Prediction p = predict_logistic(*model.linear, fv.values);
        out.score = p.probability;
        out.prediction = p.label;
    } else {
        if (!model.gbdt) {
            throw ModelIoError("gbdt payload missing");
        }
        const Prediction p = predict_gbdt(*model.gbdt, fv.values);
        out.score = p.probability;
        out.prediction = p.label;
    }
    return out;
}

EvaluateResult evaluate_pipeline(const ModelFile& model, const Dataset& dataset) {
    if (dataset.recordings.empty()) {
        throw MetricError("evaluate: empty dataset");
    }
    EvaluateResult result;
    result.scores.reserve(dataset.recordings.size());
    std::vector<double> scores;
    std::vector<int> predictions;
    std::vector<int> labels;

    const auto start = std::chrono::steady_clock::now();
    for (const auto& rec : dataset.recordings) {
        try {
            FlightScore fs = score_flight(model, rec);
            scores.push_back(fs.score);
            predictions.push_back(fs.prediction);
            labels.push_back(rec.label);
            result.scores.push_back(std::move(fs));
        } catch (const std::exception& e) {
            throw MetricError("scoring flight " + rec.flight_id + ": " + e.what());
        }
    }
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

    double threshold = 0.5;
    if (model.kind == ModelKind::Linear && model.linear) {
        threshold = model.linear->threshold;
    } else if (model.kind == ModelKind::Range) {
        threshold = 0.0;  // any violation fires
    }
    result.report = make_report(scores, predictions, labels, threshold);
    result.report.mean_inference_seconds =
        elapsed.count() / static_cast<double>(dataset.recordings.size());
    return result;
}

}  // namespace rfikit
