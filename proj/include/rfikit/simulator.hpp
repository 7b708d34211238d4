#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>

#include "rfikit/recording.hpp"
#include "rfikit/rng.hpp"

namespace rfikit {

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimulationConfig {
    std::uint64_t seed = 42;
    std::size_t n_flights = 100;
    double jam_prevalence = 0.15;
    std::size_t duration_min = 600;   // seconds
    std::size_t duration_max = 2800;
    std::size_t sats_min = 8;         // tracked satellites, of 32
    std::size_t sats_max = 12;
    double nominal_cno_min = 38.0;    // dB-Hz
    double nominal_cno_max = 45.0;
    double noise_sigma = 0.7;         // dB
    double attitude_gain_min = -3.0;  // dB per radian, per satellite
    double attitude_gain_max = 3.0;

    void validate() const;
};

/// Parse a flat key=value config file; unknown keys are errors.
SimulationConfig load_simulation_config(const std::filesystem::path& path);

// Common-mode C/No drop: linear ramp to full depth, hold, linear release.
struct JammingEvent {
    std::size_t start = 0;    // epoch index of onset
    std::size_t ramp = 1;     // seconds, onset and release duration
    std::size_t plateau = 0;  // seconds at full depth
    double depth = 5.0;       // dB, in [3, 10]

    std::size_t end() const { return start + ramp + plateau; }  // release begins here
    /// Depth applied at epoch t.
    double depth_at(std::size_t t) const;
};

// Receiver loses lock below this C/No; such epochs become absent.
inline constexpr double kTrackingFloorDbHz = 28.0;

/// One synthetic flight. Draws T first, then validates `jam` against it.
/// label = 1 iff jam is present. Deterministic in (config, rng state, jam).
FlightRecording simulate_flight(const SimulationConfig& config, Rng& rng,
                                const std::optional<JammingEvent>& jam);

/// Draw jam parameters for a flight of length T from the configured ranges.
JammingEvent draw_jam(std::size_t T, Rng& rng);

/// Generate config.n_flights recordings in memory. Exactly
/// round(prevalence * n) flights are jammed; flight i uses substream(seed, i).
Dataset generate_dataset(const SimulationConfig& config);

/// As above, but writes flight CSVs plus manifest.csv under out_dir and
/// returns the dataset. Reruns with the same config are byte-identical.
Dataset generate_dataset(const SimulationConfig& config, const std::filesystem::path& out_dir);

}  // namespace rfikit
