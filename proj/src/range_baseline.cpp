#include "rfikit/range_baseline.hpp"

#include <algorithm>

namespace rfikit {

RangeModel fit_range(const Dataset& dataset, bool normal_only) {
    RangeModel model;
    model.normal_only = normal_only;
    for (const auto& rec : dataset.recordings) {
        if (normal_only && rec.label != 0) {
            continue;
        }
        for (std::size_t c = 0; c < kChannelCount; ++c) {
            auto& env = model.envelopes[c];
            for (double v : rec.present_values(c)) {
                if (!env.known) {
                    env.min = env.max = v;
                    env.known = true;
                } else {
                    env.min = std::min(env.min, v);
                    env.max = std::max(env.max, v);
                }
            }
        }
    }
    return model;
}

int detect_point(const RangeModel& model, double value, std::size_t channel) {
    const auto& env = model.envelopes[channel];
    if (!env.known) {
        return 0;
    }
    return (value < env.min || value > env.max) ? 1 : 0;
}

RangeDetection detect_flight(const RangeModel& model, const FlightRecording& recording) {
    RangeDetection out;
    std::size_t pairs = 0;
    std::size_t violations = 0;
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        const auto& env = model.envelopes[c];
        const std::vector<double> values = recording.present_values(c);
        if (!env.known) {
            out.unknown_channel_hits += values.size();
            pairs += values.size();
            continue;
        }
        pairs += values.size();
        for (double v : values) {
            violations += static_cast<std::size_t>(v < env.min || v > env.max);
        }
    }
    if (pairs > 0) {
        out.score = static_cast<double>(violations) / static_cast<double>(pairs);
    }
    out.label = violations > 0 ? 1 : 0;
    return out;
}

}  // namespace rfikit
