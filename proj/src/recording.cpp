#include "rfikit/recording.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rfikit {

namespace {

std::string expected_header() {
    std::string h = "t";
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        h += ',';
        h += channel_name(c);
    }
    return h;
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t row, const std::string& what) {
    throw RecordingError(path.string() + ":" + std::to_string(row) + ": " + what);
}

// Strict double parse; rejects NaN/inf and trailing junk.
bool parse_number(const std::string& cell, double& out) {
    if (cell.empty()) {
        return false;
    }
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || errno == ERANGE || !std::isfinite(v)) {
        return false;
    }
    out = v;
    return true;
}

void split_line(const std::string& line, std::vector<std::string>& cells) {
    cells.clear();
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            return;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') {
        s.pop_back();
    }
    return s;
}

}  // namespace

std::string channel_name(std::size_t c) {
    if (c < kCnoChannels) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "cno_%02zu", c + 1);
        return buf;
    }
    switch (c) {
        case kHeadingChannel: return "heading_deg";
        case kRollChannel: return "roll_deg";
        case kPitchChannel: return "pitch_deg";
        case kGroundSpeedChannel: return "gs_mps";
        case kTrueAirspeedChannel: return "tas_mps";
        default: throw RecordingError("channel index out of range: " + std::to_string(c));
    }
}

std::vector<double> FlightRecording::present_values(std::size_t c) const {
    if (c < kCnoChannels) {
        std::vector<double> out;
        out.reserve(epochs);
        for (std::size_t t = 0; t < epochs; ++t) {
            if (cno[c].is_present(t)) {
                out.push_back(cno[c].value[t]);
            }
        }
        return out;
    }
    switch (c) {
        case kHeadingChannel: return heading;
        case kRollChannel: return roll;
        case kPitchChannel: return pitch;
        case kGroundSpeedChannel: return ground_speed;
        case kTrueAirspeedChannel: return true_airspeed;
        default: throw RecordingError("channel index out of range: " + std::to_string(c));
    }
}

void FlightRecording::validate() const {
    if (epochs == 0) {
        throw RecordingError(flight_id + ": recording has no epochs");
    }
    if (label != 0 && label != 1) {
        throw RecordingError(flight_id + ": label must be 0 or 1");
    }
    auto check_dense = [&](const std::vector<double>& v, std::size_t channel, double lo, double hi) {
        if (v.size() != epochs) {
            throw RecordingError(flight_id + ": channel " + channel_name(channel) + " has " +
                                 std::to_string(v.size()) + " values, expected " + std::to_string(epochs));
        }
        for (std::size_t t = 0; t < epochs; ++t) {
            if (!std::isfinite(v[t]) || v[t] < lo || v[t] > hi) {
                throw RecordingError(flight_id + ": channel " + channel_name(channel) + " epoch " +
                                     std::to_string(t) + " out of range");
            }
        }
    };
    check_dense(heading, kHeadingChannel, 0.0, std::nextafter(360.0, 0.0));
    check_dense(roll, kRollChannel, -180.0, 180.0);
    check_dense(pitch, kPitchChannel, -90.0, 90.0);
    check_dense(ground_speed, kGroundSpeedChannel, 0.0, 1e6);
    check_dense(true_airspeed, kTrueAirspeedChannel, 0.0, 1e6);
    for (std::size_t c = 0; c < kCnoChannels; ++c) {
        if (cno[c].value.size() != epochs || cno[c].present.size() != epochs) {
            throw RecordingError(flight_id + ": channel " + channel_name(c) + " length mismatch");
        }
        for (std::size_t t = 0; t < epochs; ++t) {
            if (!cno[c].is_present(t)) {
                continue;
            }
            const double v = cno[c].value[t];
            if (!std::isfinite(v) || v < 0.0 || v > 60.0) {
                throw RecordingError(flight_id + ": channel " + channel_name(c) + " epoch " +
                                     std::to_string(t) + " outside [0, 60] dB-Hz");
            }
        }
    }
}

FlightRecording parse_flight_csv(const std::filesystem::path& path, const std::string& flight_id) {
    std::ifstream in(path);
    if (!in) {
        throw RecordingError("cannot open flight file: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        fail(path, 1, "empty file");
    }
    if (strip_cr(line) != expected_header()) {
        fail(path, 1, "malformed header (expected \"" + expected_header() + "\")");
    }

    FlightRecording rec;
    rec.flight_id = flight_id.empty() ? path.stem().string() : flight_id;

    std::vector<std::string> cells;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        split_line(line, cells);
        if (cells.size() != kChannelCount + 1) {
            fail(path, row, "expected " + std::to_string(kChannelCount + 1) + " columns, got " +
                                std::to_string(cells.size()));
        }
        double tval = 0.0;
        if (!parse_number(cells[0], tval) || tval != static_cast<double>(rec.epochs)) {
            fail(path, row, "column t: expected " + std::to_string(rec.epochs));
        }
        for (std::size_t c = 0; c < kCnoChannels; ++c) {
            const std::string& cell = cells[c + 1];
            if (cell.empty()) {
                rec.cno[c].value.push_back(0.0);
                rec.cno[c].present.push_back(0);
                continue;
            }
            double v = 0.0;
            if (!parse_number(cell, v)) {
                fail(path, row, "column " + channel_name(c) + ": non-numeric cell \"" + cell + "\"");
            }
            rec.cno[c].value.push_back(v);
            rec.cno[c].present.push_back(1);
        }
        for (std::size_t c = kHeadingChannel; c < kChannelCount; ++c) {
            const std::string& cell = cells[c + 1];
            double v = 0.0;
            if (cell.empty()) {
                fail(path, row, "column " + channel_name(c) + ": dense-channel gap");
            }
            if (!parse_number(cell, v)) {
                fail(path, row, "column " + channel_name(c) + ": non-numeric cell \"" + cell + "\"");
            }
            switch (c) {
                case kHeadingChannel: rec.heading.push_back(v); break;
                case kRollChannel: rec.roll.push_back(v); break;
                case kPitchChannel: rec.pitch.push_back(v); break;
                case kGroundSpeedChannel: rec.ground_speed.push_back(v); break;
                case kTrueAirspeedChannel: rec.true_airspeed.push_back(v); break;
            }
        }
        ++rec.epochs;
    }
    if (rec.epochs == 0) {
        fail(path, row, "no data rows");
    }
    rec.validate();
    return rec;
}

void write_flight_csv(const FlightRecording& recording, const std::filesystem::path& path) {
    recording.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw RecordingError("cannot open for writing: " + path.string());
    }
    out << expected_header() << '\n';
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        out << ',' << buf;
    };
    for (std::size_t t = 0; t < recording.epochs; ++t) {
        out << t;
        for (std::size_t c = 0; c < kCnoChannels; ++c) {
            if (recording.cno[c].is_present(t)) {
                put(recording.cno[c].value[t]);
            } else {
                out << ',';
            }
        }
        put(recording.heading[t]);
        put(recording.roll[t]);
        put(recording.pitch[t]);
        put(recording.ground_speed[t]);
        put(recording.true_airspeed[t]);
        out << '\n';
    }
    if (!out) {
        throw RecordingError("write failed: " + path.string());
    }
}

Dataset load_dataset_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw RecordingError("cannot open manifest: " + path.string());
    }
    const std::filesystem::path base = path.parent_path();
    Dataset ds;
    ds.manifest_path = path.string();
    std::string line;
    std::size_t row = 0;
    std::vector<std::string> cells;
    while (std::getline(in, line)) {
        ++row;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        split_line(line, cells);
        if (cells.size() != 3) {
            fail(path, row, "expected flight_id,relative_path,label");
        }
        const std::string& id = cells[0];
        for (const auto& existing : ds.recordings) {
            if (existing.flight_id == id) {
                fail(path, row, "duplicate flight_id \"" + id + "\"");
            }
        }
        if (cells[2] != "0" && cells[2] != "1") {
            fail(path, row, "label \"" + cells[2] + "\" outside {0,1}");
        }
        const std::filesystem::path flight_path = base / cells[1];
        if (!std::filesystem::exists(flight_path)) {
            fail(path, row, "missing flight file: " + flight_path.string());
        }
        FlightRecording rec = parse_flight_csv(flight_path, id);
        rec.label = cells[2] == "1" ? 1 : 0;
        ds.recordings.push_back(std::move(rec));
    }
    if (ds.recordings.empty()) {
        throw RecordingError(path.string() + ": manifest lists no flights");
    }
    return ds;
}

}  // namespace rfikit
