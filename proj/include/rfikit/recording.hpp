#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfikit {

inline constexpr std::size_t kCnoChannels = 32;
inline constexpr std::size_t kChannelCount = 37;  // 32 C/No + heading + roll + pitch + gs + tas

// Channel indices within the fixed 37-channel layout.
inline constexpr std::size_t kHeadingChannel = 32;
inline constexpr std::size_t kRollChannel = 33;
inline constexpr std::size_t kPitchChannel = 34;
inline constexpr std::size_t kGroundSpeedChannel = 35;
inline constexpr std::size_t kTrueAirspeedChannel = 36;

/// Name of channel `c` as it appears in the flight CSV header.
std::string channel_name(std::size_t c);

// C/No series with a per-epoch presence mask. An absent epoch means the
// satellite was not tracked; its value slot is unspecified and must not be read.
struct MaskedSeries {
    std::vector<double> value;
    std::vector<std::uint8_t> present;

    std::size_t size() const { return value.size(); }
    bool is_present(std::size_t t) const { return present[t] != 0; }
};

class RecordingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One flight: 1 Hz multichannel timeseries with a single binary label.
// Immutable by convention after validate(); safe to share across threads.
struct FlightRecording {
    std::string flight_id;
    std::size_t epochs = 0;  // T
    std::array<MaskedSeries, kCnoChannels> cno;
    std::vector<double> heading;       // degrees [0, 360)
    std::vector<double> roll;          // degrees [-180, 180]
    std::vector<double> pitch;         // degrees [-90, 90]
    std::vector<double> ground_speed;  // m/s, >= 0
    std::vector<double> true_airspeed; // m/s, >= 0
    int label = 0;                     // 0 normal, 1 potential RFI

    /// Present values of channel `c` in epoch order (dense channels: all values).
    std::vector<double> present_values(std::size_t c) const;

    /// Throws RecordingError naming the offending channel/epoch on violation.
    void validate() const;
};

struct Dataset {
    std::vector<FlightRecording> recordings;
    std::string manifest_path;
};

/// Parse one flight CSV. flight_id defaults to the file stem unless overridden.
/// Empty C/No cells become absent epochs; gaps in dense channels are errors.
FlightRecording parse_flight_csv(const std::filesystem::path& path, const std::string& flight_id = "");

/// Write a flight CSV with 4 decimal places; parse(write(r)) reproduces r exactly.
void write_flight_csv(const FlightRecording& recording, const std::filesystem::path& path);

/// Load a manifest of `flight_id,relative_path,label` lines; paths are resolved
/// relative to the manifest's directory.
Dataset load_dataset_manifest(const std::filesystem::path& path);

}  // namespace rfikit
