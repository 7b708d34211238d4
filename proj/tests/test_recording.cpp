#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <string>

#include "rfikit/recording.hpp"
#include "rfikit/rng.hpp"
#include "test_util.hpp"

using namespace rfikit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("rfikit_rec_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string header_line() {
    std::string h = "t";
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        h += "," + channel_name(c);
    }
    return h;
}

// A row with every channel populated.
std::string full_row(std::size_t t) {
    std::string row = std::to_string(t);
    for (std::size_t c = 0; c < kCnoChannels; ++c) {
        row += ",40.5000";
    }
    row += ",180.0000,1.0000,-2.0000,55.0000,57.0000";
    return row;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

bool recordings_equal(const FlightRecording& a, const FlightRecording& b) {
    if (a.epochs != b.epochs || a.label != b.label) return false;
    for (std::size_t c = 0; c < kCnoChannels; ++c) {
        if (a.cno[c].present != b.cno[c].present) return false;
        for (std::size_t t = 0; t < a.epochs; ++t) {
            if (a.cno[c].is_present(t) && a.cno[c].value[t] != b.cno[c].value[t]) return false;
        }
    }
    return a.heading == b.heading && a.roll == b.roll && a.pitch == b.pitch &&
           a.ground_speed == b.ground_speed && a.true_airspeed == b.true_airspeed;
}

}  // namespace

TEST_CASE("parse a fully populated 3-row file") {
    TempDir tmp;
    const fs::path p = tmp.path / "full.csv";
    write_file(p, header_line() + "\n" + full_row(0) + "\n" + full_row(1) + "\n" + full_row(2) + "\n");
    const FlightRecording rec = parse_flight_csv(p);
    CHECK(rec.epochs == 3);
    CHECK(rec.flight_id == "full");
    for (std::size_t c = 0; c < kCnoChannels; ++c) {
        for (std::size_t t = 0; t < 3; ++t) {
            CHECK(rec.cno[c].is_present(t));
            CHECK(rec.cno[c].value[t] == doctest::Approx(40.5));
        }
    }
    CHECK(rec.heading[1] == doctest::Approx(180.0));
}

TEST_CASE("empty cno column stays absent, others intact") {
    TempDir tmp;
    const fs::path p = tmp.path / "absent.csv";
    std::string body = header_line() + "\n";
    for (std::size_t t = 0; t < 4; ++t) {
        std::string row = full_row(t);
        // blank out cno_07 (7th value field)
        std::size_t pos = 0;
        for (int commas = 0; commas < 7; ++commas) {
            pos = row.find(',', pos) + 1;
        }
        row = row.substr(0, pos) + row.substr(row.find(',', pos));
        body += row + "\n";
    }
    write_file(p, body);
    const FlightRecording rec = parse_flight_csv(p);
    for (std::size_t t = 0; t < 4; ++t) {
        CHECK_FALSE(rec.cno[6].is_present(t));
        CHECK(rec.cno[5].is_present(t));
        CHECK(rec.cno[7].is_present(t));
    }
    CHECK(rec.present_values(6).empty());
}

TEST_CASE("NaN in a dense channel is a parse error") {
    TempDir tmp;
    const fs::path p = tmp.path / "nan.csv";
    std::string row = full_row(0);
    row.replace(row.find("180.0000"), 8, "NaN");
    write_file(p, header_line() + "\n" + row + "\n");
    CHECK_THROWS_AS(parse_flight_csv(p), RecordingError);
}

TEST_CASE("empty dense cell is a dense-channel gap error") {
    TempDir tmp;
    const fs::path p = tmp.path / "gap.csv";
    std::string row = full_row(0);
    row.replace(row.find("180.0000"), 8, "");
    write_file(p, header_line() + "\n" + row + "\n");
    CHECK_THROWS_WITH_AS(parse_flight_csv(p), doctest::Contains("dense-channel gap"), RecordingError);
}

TEST_CASE("malformed header and empty file are errors") {
    TempDir tmp;
    const fs::path bad_header = tmp.path / "hdr.csv";
    write_file(bad_header, "time,stuff\n1,2\n");
    CHECK_THROWS_WITH_AS(parse_flight_csv(bad_header), doctest::Contains("header"), RecordingError);

    const fs::path no_rows = tmp.path / "norows.csv";
    write_file(no_rows, header_line() + "\n");
    CHECK_THROWS_AS(parse_flight_csv(no_rows), RecordingError);
}

TEST_CASE("write-then-parse round trip") {
    TempDir tmp;
    Rng rng(555);
    auto rec = testutil::make_recording(50, 1);
    rec.flight_id = "rt";
    for (std::size_t c : {0u, 3u, 31u}) {
        for (std::size_t t = 0; t < 50; ++t) {
            if (rng.uniform() < 0.8) {
                // quantized to 4 decimals so serialization is exact
                rec.cno[c].value[t] = std::round(rng.uniform(28.0, 55.0) * 1e4) / 1e4;
                rec.cno[c].present[t] = 1;
            }
        }
    }
    for (std::size_t t = 0; t < 50; ++t) {
        rec.heading[t] = std::round(rng.uniform(0.0, 359.9) * 1e4) / 1e4;
        rec.roll[t] = std::round(rng.uniform(-30.0, 30.0) * 1e4) / 1e4;
        rec.pitch[t] = std::round(rng.uniform(-20.0, 20.0) * 1e4) / 1e4;
        rec.ground_speed[t] = std::round(rng.uniform(0.0, 80.0) * 1e4) / 1e4;
        rec.true_airspeed[t] = std::round(rng.uniform(0.0, 80.0) * 1e4) / 1e4;
    }
    const fs::path p = tmp.path / "rt.csv";
    write_flight_csv(rec, p);
    FlightRecording back = parse_flight_csv(p);
    back.label = rec.label;  // label travels in the manifest, not the CSV
    CHECK(recordings_equal(rec, back));
}

TEST_CASE("single-epoch recording round trips") {
    TempDir tmp;
    auto rec = testutil::make_recording(1);
    testutil::set_cno(rec, 4, {41.25});
    const fs::path p = tmp.path / "one.csv";
    write_flight_csv(rec, p);
    const FlightRecording back = parse_flight_csv(p);
    CHECK(back.epochs == 1);
    CHECK(back.cno[4].value[0] == doctest::Approx(41.25));
}

TEST_CASE("manifest loading attaches labels in order") {
    TempDir tmp;
    auto a = testutil::make_recording(2);
    auto b = testutil::make_recording(3);
    write_flight_csv(a, tmp.path / "a.csv");
    write_flight_csv(b, tmp.path / "b.csv");
    write_file(tmp.path / "manifest.csv", "fa,a.csv,0\nfb,b.csv,1\n");
    const Dataset ds = load_dataset_manifest(tmp.path / "manifest.csv");
    CHECK(ds.recordings.size() == 2);
    CHECK(ds.recordings[0].flight_id == "fa");
    CHECK(ds.recordings[0].label == 0);
    CHECK(ds.recordings[1].flight_id == "fb");
    CHECK(ds.recordings[1].label == 1);
}

TEST_CASE("manifest errors: duplicate id, bad label, missing file") {
    TempDir tmp;
    auto a = testutil::make_recording(2);
    write_flight_csv(a, tmp.path / "a.csv");

    write_file(tmp.path / "dup.csv", "fa,a.csv,0\nfa,a.csv,1\n");
    CHECK_THROWS_WITH_AS(load_dataset_manifest(tmp.path / "dup.csv"),
                         doctest::Contains("duplicate"), RecordingError);

    write_file(tmp.path / "badlabel.csv", "fa,a.csv,2\n");
    CHECK_THROWS_WITH_AS(load_dataset_manifest(tmp.path / "badlabel.csv"),
                         doctest::Contains("label"), RecordingError);

    write_file(tmp.path / "missing.csv", "fa,nope.csv,0\n");
    CHECK_THROWS_WITH_AS(load_dataset_manifest(tmp.path / "missing.csv"),
                         doctest::Contains("missing"), RecordingError);
}

TEST_CASE("validation rejects out-of-range values") {
    auto rec = testutil::make_recording(2);
    rec.cno[0].value[0] = 75.0;  // above 60 dB-Hz
    rec.cno[0].present[0] = 1;
    CHECK_THROWS_AS(rec.validate(), RecordingError);

    auto rec2 = testutil::make_recording(2);
    rec2.heading[0] = 360.0;  // heading must stay below 360
    CHECK_THROWS_AS(rec2.validate(), RecordingError);

    auto rec3 = testutil::make_recording(2);
    rec3.label = 2;
    CHECK_THROWS_AS(rec3.validate(), RecordingError);
}
