#include "rfikit/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace rfikit {

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw MetricError("roc_auc: scores and labels differ in length");
    }
    const std::size_t n = scores.size();
    std::size_t positives = 0;
    for (int y : labels) {
        if (y != 0 && y != 1) {
            throw MetricError("roc_auc: labels must be 0 or 1");
        }
        positives += static_cast<std::size_t>(y);
    }
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) {
        throw MetricError("roc_auc: both classes must be present");
    }

    // Mann-Whitney U via midranks: AUC = (sum of positive ranks - P(P+1)/2) / (P*N)
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) {
            ++j;
        }
        const double midrank = 0.5 * static_cast<double>(i + 1 + j + 1);  // 1-based
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] == 1) {
                positive_rank_sum += midrank;
            }
        }
        i = j + 1;
    }
    const double p = static_cast<double>(positives);
    const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(negatives));
}

ClassificationMetrics classification_metrics(const ConfusionCounts& counts) {
    if (counts.total() == 0) {
        throw MetricError("classification_metrics: empty counts");
    }
    ClassificationMetrics m;
    const double tp = static_cast<double>(counts.tp);
    if (counts.tp + counts.fp > 0) {
        m.precision = tp / static_cast<double>(counts.tp + counts.fp);
    }
    if (counts.tp + counts.fn > 0) {
        m.recall = tp / static_cast<double>(counts.tp + counts.fn);
    }
    if (m.precision + m.recall > 0.0) {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    m.accuracy = static_cast<double>(counts.tp + counts.tn) / static_cast<double>(counts.total());
    return m;
}

EvaluationReport make_report(std::span<const double> scores, std::span<const int> predictions,
                             std::span<const int> labels, double threshold) {
    if (scores.size() != labels.size() || predictions.size() != labels.size()) {
        throw MetricError("make_report: input lengths differ");
    }
    EvaluationReport r;
    r.n_flights = labels.size();
    r.threshold = threshold;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1) {
            (predictions[i] == 1 ? r.counts.tp : r.counts.fn) += 1;
        } else {
            (predictions[i] == 1 ? r.counts.fp : r.counts.tn) += 1;
        }
    }
    const ClassificationMetrics m = classification_metrics(r.counts);
    r.precision = m.precision;
    r.recall = m.recall;
    r.f1 = m.f1;
    r.accuracy = m.accuracy;
    r.prevalence = static_cast<double>(r.counts.tp + r.counts.fn) / static_cast<double>(r.n_flights);
    r.roc_auc = roc_auc(scores, labels);
    return r;
}

std::string format_report(const EvaluationReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "flights: %zu  prevalence: %.4f  threshold: %.4f\n"
                  "ROC AUC    Precision  Recall     F1         Accuracy\n"
                  "%-10.4f %-10.4f %-10.4f %-10.4f %-10.4f\n"
                  "tp=%zu fp=%zu tn=%zu fn=%zu\n",
                  r.n_flights, r.prevalence, r.threshold, r.roc_auc, r.precision, r.recall, r.f1,
                  r.accuracy, r.counts.tp, r.counts.fp, r.counts.tn, r.counts.fn);
    return buf;
}

void write_report(const EvaluationReport& r, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw MetricError("cannot open for writing: " + path.string());
    }
    char buf[64];
    auto kv = [&](const char* key, double v) {
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        out << key << ' ' << buf << '\n';
    };
    kv("roc_auc", r.roc_auc);
    kv("precision", r.precision);
    kv("recall", r.recall);
    kv("f1", r.f1);
    kv("accuracy", r.accuracy);
    out << "tp " << r.counts.tp << "\nfp " << r.counts.fp << "\ntn " << r.counts.tn << "\nfn "
        << r.counts.fn << '\n';
    out << "n_flights " << r.n_flights << '\n';
    kv("prevalence", r.prevalence);
    kv("threshold", r.threshold);
    kv("mean_inference_seconds", r.mean_inference_seconds);
    if (!out) {
        throw MetricError("write failed: " + path.string());
    }
}

void write_score_csv(std::span<const std::string> flight_ids, std::span<const double> scores,
                     std::span<const int> labels, std::span<const int> predictions,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw MetricError("cannot open for writing: " + path.string());
    }
    out << "flight_id,score,label,prediction\n";
    char buf[40];
    for (std::size_t i = 0; i < flight_ids.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.9g", scores[i]);
        out << flight_ids[i] << ',' << buf << ',' << labels[i] << ',' << predictions[i] << '\n';
    }
}

}  // namespace rfikit
