#pragma once

#include <string>
#include <vector>

#include "rfikit/metrics.hpp"
#include "rfikit/model_io.hpp"
#include "rfikit/recording.hpp"

namespace rfikit {

struct TrainOptions {
    ModelKind kind = ModelKind::Gbdt;
    LogisticHyper logistic;
    GbdtHyper gbdt;
    double threshold = 0.5;
    bool range_normal_only = false;
};

/// extract_features -> fit_standardizer (train data only) -> train.
/// Single-class data yields the kind's degenerate model; `warning` is set.
struct TrainResult {
    ModelFile model;
    std::string warning;
};

TrainResult train_pipeline(const Dataset& dataset, const TrainOptions& options);

struct FlightScore {
    std::string flight_id;
    double score = 0.0;  // probability, or out-of-range fraction
    int prediction = 0;
};

/// Score one flight with a loaded model; never refits anything.
FlightScore score_flight(const ModelFile& model, const FlightRecording& recording);

/// Score every flight in manifest order and assemble the report, including
/// mean per-flight (featurize + predict) wall time.
struct EvaluateResult {
    EvaluationReport report;
    std::vector<FlightScore> scores;
};

EvaluateResult evaluate_pipeline(const ModelFile& model, const Dataset& dataset);

}  // namespace rfikit
