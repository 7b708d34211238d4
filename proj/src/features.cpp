#include "rfikit/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace rfikit {

namespace {

double series_mean(std::span<const double> xs) {
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    return sum / static_cast<double>(xs.size());
}

// Population variance, divisor n.
double series_variance(std::span<const double> xs) {
    const double mean = series_mean(xs);
    double acc = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        acc += d * d;
    }
    return acc / static_cast<double>(xs.size());
}

double series_median(std::span<const double> xs) {
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    if (n % 2 == 1) {
        return sorted[n / 2];
    }
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

}  // namespace

std::string feature_kind_name(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::Sum: return "sum";
        case FeatureKind::Median: return "median";
        case FeatureKind::Mean: return "mean";
        case FeatureKind::Length: return "length";
        case FeatureKind::StdDev: return "std";
        case FeatureKind::Variance: return "var";
        case FeatureKind::RootMeanSquare: return "rms";
        case FeatureKind::Maximum: return "max";
        case FeatureKind::AbsoluteMaximum: return "absmax";
        case FeatureKind::Minimum: return "min";
    }
    throw FeatureError("unknown feature kind");
}

double compute_feature(FeatureKind kind, std::span<const double> series) {
    if (series.empty()) {
        throw FeatureError("compute_feature: empty series");
    }
    switch (kind) {
        case FeatureKind::Sum: {
            double sum = 0.0;
            for (double x : series) {
                sum += x;
            }
            return sum;
        }
        case FeatureKind::Median:
            return series_median(series);
        case FeatureKind::Mean:
            return series_mean(series);
        case FeatureKind::Length:
            return static_cast<double>(series.size());
        case FeatureKind::StdDev:
            return std::sqrt(series_variance(series));
        case FeatureKind::Variance:
            return series_variance(series);
        case FeatureKind::RootMeanSquare: {
            double acc = 0.0;
            for (double x : series) {
                acc += x * x;
            }
            return std::sqrt(acc / static_cast<double>(series.size()));
        }
        case FeatureKind::Maximum:
            return *std::max_element(series.begin(), series.end());
        case FeatureKind::AbsoluteMaximum: {
            double m = 0.0;
            for (double x : series) {
                m = std::max(m, std::fabs(x));
            }
            return m;
        }
        case FeatureKind::Minimum:
            return *std::min_element(series.begin(), series.end());
    }
    throw FeatureError("unknown feature kind");
}

FeatureVector extract_features(const FlightRecording& recording) {
    FeatureVector fv;
    fv.flight_id = recording.flight_id;
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        const std::vector<double> values = recording.present_values(c);
        if (values.empty()) {
            fv.channel_present[c] = false;
            continue;  // ten zeros already in place
        }
        fv.channel_present[c] = true;
        for (std::size_t k = 0; k < kFeatureKinds; ++k) {
            const auto kind = static_cast<FeatureKind>(k);
            fv.values[feature_index(c, kind)] = compute_feature(kind, values);
        }
    }
    return fv;
}

FeatureMatrix extract_features(const Dataset& dataset) {
    FeatureMatrix fm;
    fm.rows.reserve(dataset.recordings.size());
    fm.labels.reserve(dataset.recordings.size());
    for (const auto& rec : dataset.recordings) {
        fm.rows.push_back(extract_features(rec));
        fm.labels.push_back(rec.label);
    }
    return fm;
}

void Standardizer::apply(std::span<double> row) const {
    if (row.size() != dim()) {
        throw FeatureError("standardizer dimension mismatch: row has " + std::to_string(row.size()) +
                           " columns, fitted on " + std::to_string(dim()));
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
        row[j] = (row[j] - mean[j]) / scale[j];
    }
}

Standardizer fit_standardizer(const FeatureMatrix& features) {
    const std::size_t n = features.size();
    if (n < 2) {
        throw FeatureError("fit_standardizer: need at least 2 training rows");
    }
    Standardizer s;
    s.mean.assign(kFeatureDim, 0.0);
    s.scale.assign(kFeatureDim, 1.0);
    s.constant.assign(kFeatureDim, 0);
    for (std::size_t j = 0; j < kFeatureDim; ++j) {
        double sum = 0.0;
        for (const auto& row : features.rows) {
            sum += row.values[j];
        }
        const double mu = sum / static_cast<double>(n);
        double acc = 0.0;
        for (const auto& row : features.rows) {
            const double d = row.values[j] - mu;
            acc += d * d;
        }
        const double sd = std::sqrt(acc / static_cast<double>(n));
        s.mean[j] = mu;
        if (sd > 0.0) {
            s.scale[j] = sd;
        } else {
            s.scale[j] = 1.0;
            s.constant[j] = 1;
        }
    }
    return s;
}

FeatureMatrix apply_standardizer(const Standardizer& std_, const FeatureMatrix& features) {
    FeatureMatrix out = features;
    for (auto& row : out.rows) {
        std_.apply(row.values);
    }
    return out;
}

void write_feature_csv(const FeatureMatrix& features, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FeatureError("cannot open for writing: " + path.string());
    }
    out << "flight_id,label";
    char buf[40];
    for (std::size_t j = 0; j < kFeatureDim; ++j) {
        std::snprintf(buf, sizeof(buf), ",f_%03zu", j);
        out << buf;
    }
    out << '\n';
    for (std::size_t i = 0; i < features.size(); ++i) {
        out << features.rows[i].flight_id << ',' << features.labels[i];
        for (double v : features.rows[i].values) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            out << buf;
        }
        out << '\n';
    }
    if (!out) {
        throw FeatureError("write failed: " + path.string());
    }
}

}  // namespace rfikit
