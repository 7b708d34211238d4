#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>
#include <vector>

#include "rfikit/simulator.hpp"

using namespace rfikit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const char* tag) {
        path = fs::temp_directory_path() / (std::string("rfikit_sim_") + tag + "_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

SimulationConfig fixed_duration_config(std::size_t T) {
    SimulationConfig cfg;
    cfg.duration_min = T;
    cfg.duration_max = T;
    return cfg;
}

// Mean of present values of channel c over [lo, hi).
double window_mean(const FlightRecording& rec, std::size_t c, std::size_t lo, std::size_t hi) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t t = lo; t < hi; ++t) {
        if (rec.cno[c].is_present(t)) {
            sum += rec.cno[c].value[t];
            ++n;
        }
    }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

bool fully_present(const FlightRecording& rec, std::size_t c, std::size_t lo, std::size_t hi) {
    for (std::size_t t = lo; t < hi; ++t) {
        if (!rec.cno[c].is_present(t)) {
            return false;
        }
    }
    return true;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("identical seed and config give bit-identical recordings") {
    const SimulationConfig cfg = fixed_duration_config(700);
    Rng a(123);
    Rng b(123);
    const auto ra = simulate_flight(cfg, a, std::nullopt);
    const auto rb = simulate_flight(cfg, b, std::nullopt);
    REQUIRE(ra.epochs == rb.epochs);
    CHECK(ra.heading == rb.heading);
    CHECK(ra.ground_speed == rb.ground_speed);
    for (std::size_t c = 0; c < kCnoChannels; ++c) {
        CHECK(ra.cno[c].value == rb.cno[c].value);
        CHECK(ra.cno[c].present == rb.cno[c].present);
    }
}

TEST_CASE("no jam: label 0 and C/No stays near the nominal band") {
    const SimulationConfig cfg = fixed_duration_config(900);
    Rng rng(7);
    const auto rec = simulate_flight(cfg, rng, std::nullopt);
    rec.validate();
    CHECK(rec.label == 0);
    // nominal band +- drift (<= 2), attitude (<= ~1.6) and noise
    const double lo = cfg.nominal_cno_min - 2.0 - 1.6 - 5.0 * cfg.noise_sigma;
    const double hi = cfg.nominal_cno_max + 2.0 + 1.6 + 5.0 * cfg.noise_sigma;
    for (std::size_t c = 0; c < kCnoChannels; ++c) {
        for (double v : rec.present_values(c)) {
            CHECK(v >= lo);
            CHECK(v <= hi);
        }
    }
}

TEST_CASE("jam drops tracked channels by its depth, spread preserved") {
    const std::size_t T = 1700;
    const SimulationConfig cfg = fixed_duration_config(T);
    JammingEvent jam;
    jam.start = 600;
    jam.ramp = 10;
    jam.plateau = 60;
    jam.depth = 5.0;

    Rng rng(2024);
    const auto rec = simulate_flight(cfg, rng, jam);
    CHECK(rec.label == 1);

    const std::size_t pre_lo = jam.start - 60;
    const std::size_t plat_lo = jam.start + jam.ramp;
    const std::size_t plat_hi = jam.end();

    double pre_total = 0.0;
    double plat_total = 0.0;
    std::size_t tracked = 0;
    for (std::size_t c = 0; c < kCnoChannels; ++c) {
        if (!fully_present(rec, c, pre_lo, jam.start) || !fully_present(rec, c, plat_lo, plat_hi)) {
            continue;
        }
        ++tracked;
        pre_total += window_mean(rec, c, pre_lo, jam.start);
        plat_total += window_mean(rec, c, plat_lo, plat_hi);
    }
    REQUIRE(tracked >= 5);
    const double drop = (pre_total - plat_total) / static_cast<double>(tracked);
    CHECK(std::fabs(drop - 5.0) <= 0.5);
}

TEST_CASE("common-mode: pairwise channel differences survive the jam") {
    const std::size_t T = 1700;
    const SimulationConfig cfg = fixed_duration_config(T);
    JammingEvent jam;
    jam.start = 500;
    jam.ramp = 10;
    jam.plateau = 120;
    jam.depth = 4.0;

    Rng rng(99);
    const auto rec = simulate_flight(cfg, rng, jam);
    const std::size_t pre_lo = jam.start - 120;
    const std::size_t plat_lo = jam.start + jam.ramp;
    const std::size_t plat_hi = jam.end();

    std::vector<std::size_t> tracked;
    for (std::size_t c = 0; c < kCnoChannels; ++c) {
        if (fully_present(rec, c, pre_lo, jam.start) && fully_present(rec, c, plat_lo, plat_hi)) {
            tracked.push_back(c);
        }
    }
    REQUIRE(tracked.size() >= 2);
    const double bound = 3.0 * cfg.noise_sigma / std::sqrt(120.0) + 0.6;  // noise + drift slack
    for (std::size_t i = 0; i + 1 < tracked.size(); ++i) {
        const std::size_t a = tracked[i];
        const std::size_t b = tracked[i + 1];
        const double pre_diff =
            window_mean(rec, a, pre_lo, jam.start) - window_mean(rec, b, pre_lo, jam.start);
        const double plat_diff =
            window_mean(rec, a, plat_lo, plat_hi) - window_mean(rec, b, plat_lo, plat_hi);
        CHECK(std::fabs(pre_diff - plat_diff) <= bound);
    }
}

TEST_CASE("deep jam causes loss of track below the floor") {
    SimulationConfig cfg = fixed_duration_config(1200);
    cfg.nominal_cno_min = 36.0;
    cfg.nominal_cno_max = 38.0;
    JammingEvent jam;
    jam.start = 300;
    jam.ramp = 5;
    jam.plateau = 200;
    jam.depth = 10.0;
    Rng rng(31);
    const auto rec = simulate_flight(cfg, rng, jam);
    std::size_t absent_in_jam = 0;
    for (std::size_t c = 0; c < kCnoChannels; ++c) {
        if (!fully_present(rec, c, 0, 100)) {
            continue;  // untracked channel
        }
        for (std::size_t t = jam.start + jam.ramp; t < jam.end(); ++t) {
            absent_in_jam += !rec.cno[c].is_present(t);
        }
    }
    CHECK(absent_in_jam > 0);
    for (std::size_t c = 0; c < kCnoChannels; ++c) {
        for (double v : rec.present_values(c)) {
            CHECK(v >= kTrackingFloorDbHz);
        }
    }
}

TEST_CASE("jam window exceeding T is rejected") {
    const SimulationConfig cfg = fixed_duration_config(300);
    JammingEvent jam;
    jam.start = 250;
    jam.ramp = 10;
    jam.plateau = 100;
    Rng rng(1);
    CHECK_THROWS_AS(simulate_flight(cfg, rng, jam), SimulationError);
}

TEST_CASE("generate_dataset hits the exact jam count") {
    SimulationConfig cfg;
    cfg.seed = 11;
    cfg.n_flights = 100;
    cfg.jam_prevalence = 0.15;
    cfg.duration_min = 600;
    cfg.duration_max = 700;
    const Dataset ds = generate_dataset(cfg);
    std::size_t jammed = 0;
    for (const auto& rec : ds.recordings) {
        jammed += static_cast<std::size_t>(rec.label);
    }
    CHECK(ds.recordings.size() == 100);
    CHECK(jammed == 15);
}

TEST_CASE("prevalence 0 gives a single normal flight") {
    SimulationConfig cfg;
    cfg.n_flights = 1;
    cfg.jam_prevalence = 0.0;
    cfg.duration_min = 600;
    cfg.duration_max = 600;
    const Dataset ds = generate_dataset(cfg);
    REQUIRE(ds.recordings.size() == 1);
    CHECK(ds.recordings[0].label == 0);
}

TEST_CASE("same seed writes a byte-identical output tree") {
    SimulationConfig cfg;
    cfg.seed = 99;
    cfg.n_flights = 6;
    cfg.duration_min = 600;
    cfg.duration_max = 650;
    TempDir a("a");
    TempDir b("b");
    generate_dataset(cfg, a.path);
    generate_dataset(cfg, b.path);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a.path)) {
        const fs::path other = b.path / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(entry.path()) == slurp(other));
        ++files;
    }
    CHECK(files == 7);  // 6 flights + manifest
}

TEST_CASE("config validation rejects bad ranges") {
    SimulationConfig cfg;
    cfg.jam_prevalence = 1.5;
    CHECK_THROWS_AS(cfg.validate(), SimulationError);
    cfg = SimulationConfig{};
    cfg.duration_min = 10;
    CHECK_THROWS_AS(cfg.validate(), SimulationError);
    cfg = SimulationConfig{};
    cfg.sats_max = 40;
    CHECK_THROWS_AS(cfg.validate(), SimulationError);
}

TEST_CASE("config file round trip with overrides") {
    TempDir tmp("cfg");
    std::ofstream out(tmp.path / "sim.cfg");
    out << "# demo config\nseed=5\nn_flights=3\njam_prevalence=0.5\nduration_min=600\n"
           "duration_max=700\nnoise_sigma=0.4\n";
    out.close();
    const SimulationConfig cfg = load_simulation_config(tmp.path / "sim.cfg");
    CHECK(cfg.seed == 5);
    CHECK(cfg.n_flights == 3);
    CHECK(cfg.jam_prevalence == doctest::Approx(0.5));
    CHECK(cfg.noise_sigma == doctest::Approx(0.4));
    CHECK_THROWS_AS(load_simulation_config(tmp.path / "nope.cfg"), SimulationError);
}
