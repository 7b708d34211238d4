#include "rfikit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

namespace rfikit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;

// Keep-out margin around a jam window where no maneuver may start or end, so
// the common-mode signature is not mixed with attitude effects.
constexpr double kJamManeuverMargin = 240.0;

struct ManeuverPulse {
    bool on_roll = true;   // else pitch
    double center = 0.0;   // seconds
    double duration = 30.0;
    double amplitude = 10.0;  // degrees

    double value_at(double t) const {
        const double half = duration / 2.0;
        if (t < center - half || t > center + half) {
            return 0.0;
        }
        // raised cosine: 0 at the edges, full amplitude at the center
        return amplitude * 0.5 * (1.0 + std::cos(kTwoPi * (t - center) / duration));
    }
};

struct SatelliteState {
    std::size_t channel = 0;
    double nominal = 40.0;
    double drift_amp = 0.5;
    double drift_period = 6000.0;
    double drift_phase = 0.0;
    double gain_roll = 0.0;   // dB per radian
    double gain_pitch = 0.0;
};

FlightRecording simulate_body(const SimulationConfig& config, Rng& rng, std::size_t T,
                              const std::optional<JammingEvent>& jam) {
    // Tracked satellite subset: partial Fisher-Yates over the 32 channels.
    const std::size_t n_sats = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(config.sats_min),
                        static_cast<std::int64_t>(config.sats_max)));
    std::vector<std::size_t> channels(kCnoChannels);
    for (std::size_t i = 0; i < kCnoChannels; ++i) {
        channels[i] = i;
    }
    for (std::size_t i = 0; i < n_sats; ++i) {
        const std::size_t j = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(i), kCnoChannels - 1));
        std::swap(channels[i], channels[j]);
    }
    channels.resize(n_sats);
    std::sort(channels.begin(), channels.end());

    std::vector<SatelliteState> sats;
    sats.reserve(n_sats);
    for (std::size_t c : channels) {
        SatelliteState s;
        s.channel = c;
        s.nominal = rng.uniform(config.nominal_cno_min, config.nominal_cno_max);
        s.drift_amp = rng.uniform(0.3, 1.2);
        s.drift_period = rng.uniform(4000.0, 9000.0);
        s.drift_phase = rng.uniform(0.0, kTwoPi);
        s.gain_roll = rng.uniform(config.attitude_gain_min, config.attitude_gain_max);
        s.gain_pitch = rng.uniform(config.attitude_gain_min, config.attitude_gain_max);
        sats.push_back(s);
    }

    // 0-3 attitude maneuvers; kept clear of the jam window.
    const std::size_t n_maneuvers = static_cast<std::size_t>(rng.uniform_int(0, 3));
    std::vector<ManeuverPulse> maneuvers;
    for (std::size_t m = 0; m < n_maneuvers; ++m) {
        ManeuverPulse p;
        p.on_roll = rng.uniform_int(0, 1) == 0;
        p.amplitude = rng.uniform(5.0, 30.0);
        p.duration = rng.uniform(20.0, 60.0);
        bool placed = false;
        for (int attempt = 0; attempt < 20 && !placed; ++attempt) {
            p.center = rng.uniform(0.0, static_cast<double>(T));
            if (!jam) {
                placed = true;
                break;
            }
            const double lo = static_cast<double>(jam->start) - kJamManeuverMargin;
            const double hi = static_cast<double>(jam->end() + jam->ramp) + kJamManeuverMargin;
            const double half = p.duration / 2.0;
            placed = p.center + half < lo || p.center - half > hi;
        }
        if (placed) {
            maneuvers.push_back(p);
        }
    }

    double heading = rng.uniform(0.0, 360.0);
    const double gs_base = rng.uniform(30.0, 70.0);
    const double gs_period = rng.uniform(300.0, 900.0);
    const double gs_phase = rng.uniform(0.0, kTwoPi);
    const double tas_offset = rng.uniform(-5.0, 5.0);

    FlightRecording rec;
    rec.epochs = T;
    rec.label = jam ? 1 : 0;
    rec.heading.reserve(T);
    rec.roll.reserve(T);
    rec.pitch.reserve(T);
    rec.ground_speed.reserve(T);
    rec.true_airspeed.reserve(T);
    for (std::size_t c = 0; c < kCnoChannels; ++c) {
        rec.cno[c].value.assign(T, 0.0);
        rec.cno[c].present.assign(T, 0);
    }

    for (std::size_t t = 0; t < T; ++t) {
        const double time = static_cast<double>(t);

        heading += rng.normal(0.0, 0.5);
        heading = std::fmod(heading, 360.0);
        if (heading < 0.0) {
            heading += 360.0;
        }
        // keep the 4-decimal serialized value strictly below 360
        const double heading_out = heading >= 359.99995 ? 0.0 : heading;

        double roll = rng.normal(0.0, 0.15);
        double pitch = rng.normal(0.0, 0.15);
        for (const auto& p : maneuvers) {
            (p.on_roll ? roll : pitch) += p.value_at(time);
        }
        roll = std::clamp(roll, -180.0, 180.0);
        pitch = std::clamp(pitch, -90.0, 90.0);

        double gs = gs_base + 1.5 * std::sin(kTwoPi * time / gs_period + gs_phase) +
                    rng.normal(0.0, 0.3);
        gs = std::max(gs, 0.0);
        double tas = std::max(gs + tas_offset + rng.normal(0.0, 0.3), 0.0);

        rec.heading.push_back(heading_out);
        rec.roll.push_back(roll);
        rec.pitch.push_back(pitch);
        rec.ground_speed.push_back(gs);
        rec.true_airspeed.push_back(tas);

        const double jam_depth = jam ? jam->depth_at(t) : 0.0;
        for (const auto& s : sats) {
            const double drift =
                s.drift_amp * std::sin(kTwoPi * time / s.drift_period + s.drift_phase);
            const double attitude =
                s.gain_roll * roll * kDegToRad + s.gain_pitch * pitch * kDegToRad;
            const double v =
                s.nominal + drift + attitude + rng.normal(0.0, config.noise_sigma) - jam_depth;
            if (v >= kTrackingFloorDbHz) {
                rec.cno[s.channel].value[t] = std::min(v, 60.0);
                rec.cno[s.channel].present[t] = 1;
            }
        }
    }
    return rec;
}

}  // namespace

void SimulationConfig::validate() const {
    if (n_flights == 0) {
        throw SimulationError("n_flights must be >= 1");
    }
    if (jam_prevalence < 0.0 || jam_prevalence > 1.0) {
        throw SimulationError("jam_prevalence must be in [0, 1]");
    }
    if (duration_min < 60 || duration_max < duration_min) {
        throw SimulationError("duration range invalid (min >= 60, max >= min)");
    }
    if (sats_min < 1 || sats_max < sats_min || sats_max > kCnoChannels) {
        throw SimulationError("tracked-satellite range invalid");
    }
    if (nominal_cno_max < nominal_cno_min) {
        throw SimulationError("nominal C/No range invalid");
    }
    if (noise_sigma <= 0.0) {
        throw SimulationError("noise_sigma must be positive");
    }
    if (attitude_gain_max < attitude_gain_min) {
        throw SimulationError("attitude gain range invalid");
    }
}

SimulationConfig load_simulation_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw SimulationError("cannot open config: " + path.string());
    }
    SimulationConfig cfg;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw SimulationError(path.string() + ":" + std::to_string(row) + ": expected key=value");
        }
        auto trim = [](std::string s) {
            const std::size_t a = s.find_first_not_of(" \t");
            const std::size_t b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "n_flights") cfg.n_flights = std::stoull(value);
            else if (key == "jam_prevalence") cfg.jam_prevalence = std::stod(value);
            else if (key == "duration_min") cfg.duration_min = std::stoull(value);
            else if (key == "duration_max") cfg.duration_max = std::stoull(value);
            else if (key == "sats_min") cfg.sats_min = std::stoull(value);
            else if (key == "sats_max") cfg.sats_max = std::stoull(value);
            else if (key == "nominal_cno_min") cfg.nominal_cno_min = std::stod(value);
            else if (key == "nominal_cno_max") cfg.nominal_cno_max = std::stod(value);
            else if (key == "noise_sigma") cfg.noise_sigma = std::stod(value);
            else if (key == "attitude_gain_min") cfg.attitude_gain_min = std::stod(value);
            else if (key == "attitude_gain_max") cfg.attitude_gain_max = std::stod(value);
            else throw SimulationError(path.string() + ":" + std::to_string(row) + ": unknown key \"" + key + "\"");
        } catch (const std::invalid_argument&) {
            throw SimulationError(path.string() + ":" + std::to_string(row) + ": bad value for " + key);
        }
    }
    cfg.validate();
    return cfg;
}

double JammingEvent::depth_at(std::size_t t) const {
    if (t < start) {
        return 0.0;
    }
    const double dt = static_cast<double>(t - start);
    const double ramp_s = static_cast<double>(ramp);
    if (dt < ramp_s) {
        return depth * dt / ramp_s;
    }
    if (t < end()) {
        return depth;
    }
    const double rt = static_cast<double>(t - end());
    if (rt < ramp_s) {
        return depth * (1.0 - rt / ramp_s);
    }
    return 0.0;
}

FlightRecording simulate_flight(const SimulationConfig& config, Rng& rng,
                                const std::optional<JammingEvent>& jam) {
    config.validate();
    const std::size_t T = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(config.duration_min),
                        static_cast<std::int64_t>(config.duration_max)));
    if (jam) {
        if (jam->ramp < 1 || jam->depth <= 0.0) {
            throw SimulationError("invalid jamming event (ramp >= 1, depth > 0 required)");
        }
        if (jam->end() > T) {
            throw SimulationError("jam window exceeds flight duration T=" + std::to_string(T));
        }
    }
    return simulate_body(config, rng, T, jam);
}

JammingEvent draw_jam(std::size_t T, Rng& rng) {
    JammingEvent jam;
    jam.depth = rng.uniform(3.0, 10.0);
    jam.ramp = static_cast<std::size_t>(rng.uniform_int(5, 30));
    if (T < jam.ramp + 180) {
        throw SimulationError("flight too short for a jam window (T=" + std::to_string(T) + ")");
    }
    const std::size_t plateau_max = std::min<std::size_t>(300, T - jam.ramp - 120);
    jam.plateau = static_cast<std::size_t>(
        rng.uniform_int(60, static_cast<std::int64_t>(plateau_max)));
    jam.start = static_cast<std::size_t>(
        rng.uniform_int(60, static_cast<std::int64_t>(T - jam.ramp - jam.plateau - 60)));
    return jam;
}

namespace {

std::vector<std::uint8_t> draw_jam_flags(const SimulationConfig& config) {
    const auto k = static_cast<std::size_t>(
        std::llround(config.jam_prevalence * static_cast<double>(config.n_flights)));
    std::vector<std::uint8_t> flags(config.n_flights, 0);
    Rng rng = Rng::substream(config.seed, 0x6a616d666c616773ULL);  // flag stream tag
    // mark k jammed flights via partial shuffle of indices
    std::vector<std::size_t> idx(config.n_flights);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        idx[i] = i;
    }
    for (std::size_t i = 0; i < k && i < idx.size(); ++i) {
        const std::size_t j = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(idx.size() - 1)));
        std::swap(idx[i], idx[j]);
        flags[idx[i]] = 1;
    }
    return flags;
}

std::string flight_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "flight_%06zu", i);
    return buf;
}

}  // namespace

Dataset generate_dataset(const SimulationConfig& config) {
    config.validate();
    const std::vector<std::uint8_t> jam_flags = draw_jam_flags(config);
    Dataset ds;
    ds.recordings.reserve(config.n_flights);
    for (std::size_t i = 0; i < config.n_flights; ++i) {
        Rng rng = Rng::substream(config.seed, i);
        const std::size_t T = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(config.duration_min),
                            static_cast<std::int64_t>(config.duration_max)));
        std::optional<JammingEvent> jam;
        if (jam_flags[i]) {
            jam = draw_jam(T, rng);
        }
        FlightRecording rec = simulate_body(config, rng, T, jam);
        rec.flight_id = flight_name(i);
        ds.recordings.push_back(std::move(rec));
    }
    return ds;
}

Dataset generate_dataset(const SimulationConfig& config, const std::filesystem::path& out_dir) {
    Dataset ds = generate_dataset(config);
    std::filesystem::create_directories(out_dir);
    std::ofstream manifest(out_dir / "manifest.csv", std::ios::binary);
    if (!manifest) {
        throw SimulationError("cannot write manifest in " + out_dir.string());
    }
    for (const auto& rec : ds.recordings) {
        const std::string file = rec.flight_id + ".csv";
        write_flight_csv(rec, out_dir / file);
        manifest << rec.flight_id << ',' << file << ',' << rec.label << '\n';
    }
    if (!manifest) {
        throw SimulationError("manifest write failed in " + out_dir.string());
    }
    ds.manifest_path = (out_dir / "manifest.csv").string();
    return ds;
}

}  // namespace rfikit
