#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rti/detector.hpp"
#include "rti/keyval.hpp"
#include "rti/scenario.hpp"

using namespace rti;
namespace fs = std::filesystem;

namespace {

const char* kMiniConfig = R"(# four nodes, one channel, short run
[deployment]
layout = perimeter
node_count = 4
area_width = 4.0
area_height = 3.0
channels = 18

[grid]
pixel_size = 0.25

[noise]
snr_db = 25.0

[schedule]
frame_interval = 0.005
calibration_duration = 0.5
duration = 6.0

[object]
model = point

[trajectory]
type = waypoints
speed = 0.3
waypoints = 1.0,0.8; 3.0,0.8; 3.0,2.2; 1.0,2.2; 1.0,0.8

[run]
seed = 11
)";

struct CliFixture {
    fs::path base;

    CliFixture() {
        base = fs::temp_directory_path() / "rti_cli_tests";
        fs::remove_all(base);
        fs::create_directories(base);
        std::ofstream cfg(base / "mini.cfg");
        cfg << kMiniConfig;
    }

    fs::path config() const { return base / "mini.cfg"; }

    int run(const std::string& args) const {
        const std::string cmd = std::string(RTI_CLI_PATH) + " " + args + " > " +
                                (base / "stdout.txt").string() + " 2> " +
                                (base / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    }

    std::string stderr_text() const {
        std::ifstream in(base / "stderr.txt");
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) rows.push_back(split_list(line, ','));
    }
    return rows;
}

} // namespace

TEST_CASE("simulate writes the documented output files") {
    CliFixture cli;
    const fs::path out = cli.base / "sim";
    REQUIRE(cli.run("simulate --config " + cli.config().string() + " --out " + out.string() +
                    " --quiet") == 0);
    for (const char* name : {"frames.csv", "calibration.txt", "detections.bits", "estimates.csv",
                             "report.txt", "report.csv", "histogram.csv"})
        CHECK(fs::exists(out / name));
}

TEST_CASE("overrides are applied and echoed in the report") {
    CliFixture cli;
    const fs::path out = cli.base / "override";
    REQUIRE(cli.run("simulate --config " + cli.config().string() + " --out " + out.string() +
                    " --set gamma=0.35 --quiet") == 0);
    CHECK(slurp(out / "report.txt").find("gamma = 0.35") != std::string::npos);
}

TEST_CASE("missing config exits 2 without partial outputs") {
    CliFixture cli;
    const fs::path out = cli.base / "missing";
    CHECK(cli.run("simulate --config " + (cli.base / "nope.cfg").string() + " --out " +
                  out.string() + " --quiet") == 2);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("config errors exit 1 and name the offending key") {
    CliFixture cli;
    std::ofstream bad(cli.base / "bad.cfg");
    bad << kMiniConfig << "\n[detector]\ndelta_t = -1\n";
    bad.close();
    CHECK(cli.run("validate-config --config " + (cli.base / "bad.cfg").string()) == 1);
    CHECK(cli.stderr_text().find("delta_t") != std::string::npos);

    std::ofstream unknown(cli.base / "unknown.cfg");
    unknown << kMiniConfig << "\n[detector]\nmystery_key = 3\n";
    unknown.close();
    CHECK(cli.run("validate-config --config " + (cli.base / "unknown.cfg").string()) == 1);
    CHECK(cli.stderr_text().find("mystery_key") != std::string::npos);

    CHECK(cli.run("simulate --config " + cli.config().string() + " --out " +
                  (cli.base / "x").string() + " --set nonsense=1 --quiet") == 1);
    CHECK(cli.run("validate-config --config " + cli.config().string()) == 0);
}

TEST_CASE("localize replays simulate byte for byte") {
    CliFixture cli;
    const fs::path out = cli.base / "sim2";
    REQUIRE(cli.run("simulate --config " + cli.config().string() + " --out " + out.string() +
                    " --quiet") == 0);
    const fs::path replay = cli.base / "replay";
    REQUIRE(cli.run("localize --config " + cli.config().string() + " --frames " +
                    (out / "frames.csv").string() + " --calibration " +
                    (out / "calibration.txt").string() + " --out " + replay.string() +
                    " --quiet") == 0);
    CHECK(slurp(replay / "estimates.csv") == slurp(out / "estimates.csv"));
}

TEST_CASE("calibrate rebuilds the calibration file from frames") {
    CliFixture cli;
    const fs::path out = cli.base / "sim3";
    REQUIRE(cli.run("simulate --config " + cli.config().string() + " --out " + out.string() +
                    " --quiet") == 0);
    const fs::path cal = cli.base / "cal";
    REQUIRE(cli.run("calibrate --config " + cli.config().string() + " --frames " +
                    (out / "frames.csv").string() + " --out " + cal.string() + " --quiet") == 0);
    CHECK(slurp(cal / "calibration.txt") == slurp(out / "calibration.txt"));
}

TEST_CASE("localize rejects unknown link ids by name") {
    CliFixture cli;
    const fs::path out = cli.base / "sim4";
    REQUIRE(cli.run("simulate --config " + cli.config().string() + " --out " + out.string() +
                    " --quiet") == 0);
    std::ofstream frames(cli.base / "frames_bad.csv");
    frames << "frame,time_s,link,channel,rss_db,true_x,true_y\n0,0,42,18,-50,nan,nan\n";
    frames.close();
    CHECK(cli.run("localize --config " + cli.config().string() + " --frames " +
                  (cli.base / "frames_bad.csv").string() + " --calibration " +
                  (out / "calibration.txt").string() + " --out " + (cli.base / "r").string() +
                  " --quiet") == 1);
    CHECK(cli.stderr_text().find("42") != std::string::npos);
}

TEST_CASE("vacant-only frames localize to no-occupancy rows") {
    CliFixture cli;
    const fs::path out = cli.base / "sim5";
    REQUIRE(cli.run("simulate --config " + cli.config().string() + " --out " + out.string() +
                    " --set trajectory.type=absent --set schedule.duration=2 --quiet") == 0);
    const fs::path replay = cli.base / "replay5";
    REQUIRE(cli.run("localize --config " + cli.config().string() +
                    " --set trajectory.type=absent --set schedule.duration=2 --frames " +
                    (out / "frames.csv").string() + " --calibration " +
                    (out / "calibration.txt").string() + " --out " + replay.string() +
                    " --quiet") == 0);
    const auto rows = read_csv(replay / "estimates.csv");
    REQUIRE(rows.size() > 1);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].back() == "no_occupancy");
}

TEST_CASE("sweep over the mode threshold reports monotone support") {
    CliFixture cli;
    const fs::path out = cli.base / "sweep_a";
    REQUIRE(cli.run("sweep --config " + cli.config().string() + " --param estimator.a" +
                    " --values 0.5,0.75,0.9 --out " + out.string() + " --quiet") == 0);
    const auto rows = read_csv(out / "sweep.csv");
    REQUIRE(rows.size() == 4); // header + 3 values
    CHECK(rows[0][8] == "mean_support_pixels");
    double prev = 1e18;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double support = *parse_double(rows[i][8]);
        CHECK(support <= prev + 1e-12);
        prev = support;
    }
}

TEST_CASE("sweep over delta_t reports non-decreasing detection rates") {
    CliFixture cli;
    const fs::path out = cli.base / "sweep_dt";
    REQUIRE(cli.run("sweep --config " + cli.config().string() + " --param detector.delta_t" +
                    " --values 0.08,0.15625,0.3 --out " + out.string() + " --quiet") == 0);
    const auto rows = read_csv(out / "sweep.csv");
    REQUIRE(rows.size() == 4);
    double prev = -1.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double rate = *parse_double(rows[i][5]);
        CHECK(rate >= prev - 1e-12);
        prev = rate;
    }
}

TEST_CASE("sweep over gamma reports the detector thresholds") {
    CliFixture cli;
    const fs::path out = cli.base / "sweep_g";
    REQUIRE(cli.run("sweep --config " + cli.config().string() + " --param gamma" +
                    " --values 0.1,0.4,0.7 --out " + out.string() + " --quiet") == 0);
    const auto rows = read_csv(out / "sweep.csv");
    REQUIRE(rows.size() == 4);

    const ScenarioConfig cfg = load_scenario(cli.config(), {});
    const std::vector<double> gammas{0.1, 0.4, 0.7};
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        double sum = 0.0;
        for (std::size_t p = 0; p < cfg.deployment.pair_count(); ++p)
            sum += compute_threshold(cfg.deployment.pair_length(static_cast<int>(p)), gammas[i],
                                     cfg.eta, cfg.delta_t);
        const double expected = sum / static_cast<double>(cfg.deployment.pair_count());
        CHECK(*parse_double(rows[i + 1][7]) == doctest::Approx(expected).epsilon(1e-9));
    }

    CHECK(cli.run("sweep --config " + cli.config().string() + " --param trajectory.type" +
                  " --values a,b --out " + (cli.base / "sweep_bad").string() + " --quiet") == 1);
}

TEST_CASE("snapshot PGMs are emitted at the configured interval") {
    CliFixture cli;
    const fs::path out = cli.base / "snaps";
    REQUIRE(cli.run("simulate --config " + cli.config().string() + " --out " + out.string() +
                    " --set run.snapshot_interval=1.0 --quiet") == 0);
    REQUIRE(fs::exists(out / "snapshots"));
    std::size_t count = 0;
    for (const auto& entry : fs::directory_iterator(out / "snapshots")) {
        ++count;
        const std::string content = slurp(entry.path());
        CHECK(content.substr(0, 3) == "P5\n");
    }
    CHECK(count >= 4); // ~6 s of object phase at 1 s spacing
}

TEST_CASE("repeated runs with one seed are byte-identical") {
    CliFixture cli;
    const fs::path a = cli.base / "det_a";
    const fs::path b = cli.base / "det_b";
    REQUIRE(cli.run("simulate --config " + cli.config().string() + " --out " + a.string() +
                    " --seed 99 --quiet") == 0);
    REQUIRE(cli.run("simulate --config " + cli.config().string() + " --out " + b.string() +
                    " --seed 99 --quiet") == 0);
    for (const char* name : {"frames.csv", "estimates.csv", "report.txt", "detections.bits"})
        CHECK(slurp(a / name) == slurp(b / name));
}
