#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfikit {

class MetricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
};

struct ClassificationMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
};

struct EvaluationReport {
    double roc_auc = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    ConfusionCounts counts;
    std::size_t n_flights = 0;
    double prevalence = 0.0;
    double threshold = 0.5;
    double mean_inference_seconds = 0.0;  // featurize + score, per flight
};

/// Rank-based (Mann-Whitney) AUC with half credit for ties; exact.
/// Requires both classes present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Precision/recall/F1/accuracy with the zero-denominator conventions pinned
/// to 0 (precision when tp+fp=0, recall when tp+fn=0, f1 when p+r=0).
ClassificationMetrics classification_metrics(const ConfusionCounts& counts);

/// Assemble a full report from per-flight scores, hard predictions and labels.
EvaluationReport make_report(std::span<const double> scores, std::span<const int> predictions,
                             std::span<const int> labels, double threshold);

/// Human-readable table, Table-order columns (ROC AUC first).
std::string format_report(const EvaluationReport& report);

/// Machine-readable key-value dump.
void write_report(const EvaluationReport& report, const std::filesystem::path& path);

/// Optional per-flight CSV: flight_id,score,label,prediction.
void write_score_csv(std::span<const std::string> flight_ids, std::span<const double> scores,
                     std::span<const int> labels, std::span<const int> predictions,
                     const std::filesystem::path& path);

}  // namespace rfikit
