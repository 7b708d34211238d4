#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfikit/recording.hpp"

namespace rfikit {

// The ten per-channel statistics, in their frozen index order.
enum class FeatureKind : int {
    Sum = 0,
    Median,
    Mean,
    Length,
    StdDev,
    Variance,
    RootMeanSquare,
    Maximum,
    AbsoluteMaximum,
    Minimum,
};

inline constexpr std::size_t kFeatureKinds = 10;
inline constexpr std::size_t kFeatureDim = kChannelCount * kFeatureKinds;  // F = 370

std::string feature_kind_name(FeatureKind kind);

/// Frozen (channel, kind) -> flat index map: channel-major.
constexpr std::size_t feature_index(std::size_t channel, FeatureKind kind) {
    return channel * kFeatureKinds + static_cast<std::size_t>(kind);
}

class FeatureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluate one statistic over a series; requires n >= 1.
double compute_feature(FeatureKind kind, std::span<const double> series);

struct FeatureVector {
    std::string flight_id;
    std::array<double, kFeatureDim> values{};
    std::array<bool, kChannelCount> channel_present{};  // false = channel had no data
};

struct FeatureMatrix {
    std::vector<FeatureVector> rows;
    std::vector<int> labels;  // parallel to rows

    std::size_t size() const { return rows.size(); }
};

/// phi: features over present values of each of the 37 channels. A channel with
/// no present values contributes ten zeros and a cleared presence flag.
FeatureVector extract_features(const FlightRecording& recording);

FeatureMatrix extract_features(const Dataset& dataset);

// Per-column shift/scale fitted on training features only.
struct Standardizer {
    std::vector<double> mean;        // mu_j
    std::vector<double> scale;       // s_j (> 0; 1 for constant columns)
    std::vector<std::uint8_t> constant;  // constant-column flags

    std::size_t dim() const { return mean.size(); }
    void apply(std::span<double> row) const;
};

/// Column mean and population standard deviation; requires >= 2 rows.
/// Constant columns get scale 1 and a flag, so they transform to all zeros.
Standardizer fit_standardizer(const FeatureMatrix& features);

FeatureMatrix apply_standardizer(const Standardizer& std, const FeatureMatrix& features);

/// Dump `flight_id,label,f_000..f_369` for external tooling.
void write_feature_csv(const FeatureMatrix& features, const std::filesystem::path& path);

}  // namespace rfikit
