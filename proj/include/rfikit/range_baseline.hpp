#pragma once

#include <array>
#include <cstddef>

#include "rfikit/recording.hpp"

namespace rfikit {

// Per-channel value envelope over the training set; the floor any trained
// model has to beat.
struct RangeModel {
    struct Envelope {
        double min = 0.0;
        double max = 0.0;
        bool known = false;  // false = channel never present in training
    };
    std::array<Envelope, kChannelCount> envelopes{};
    bool normal_only = false;  // envelope fitted on label-0 flights only
};

struct RangeDetection {
    int label = 0;
    double score = 0.0;  // fraction of (epoch, present-channel) pairs out of envelope
    std::size_t unknown_channel_hits = 0;  // values on channels with no training coverage
};

/// Envelope per channel over every present training value. With normal_only,
/// only label-0 flights contribute.
RangeModel fit_range(const Dataset& dataset, bool normal_only = false);

/// Point indicator: 0 inside the closed envelope, 1 outside. Unknown channels
/// never fire; the caller's diagnostic counter records them.
int detect_point(const RangeModel& model, double value, std::size_t channel);

/// Flight-level lift: label 1 iff any present value is out of envelope.
RangeDetection detect_flight(const RangeModel& model, const FlightRecording& recording);

}  // namespace rfikit
