#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rti/channel.hpp"
#include "rti/classifier.hpp"
#include "rti/errors.hpp"

using namespace rti;

TEST_CASE("fade_level and the blacklisting rule") {
    CHECK(fade_level(-60.0, -60.0) == 0.0);
    CHECK(fade_level(-85.0, -60.0) == -25.0);
    CHECK(fade_level(-57.0, -60.0) == 3.0);

    CHECK_FALSE(link_usable(-25.0, -20.0));
    CHECK_FALSE(link_usable(-20.0, -20.0)); // boundary blacklists
    CHECK(link_usable(-19.99, -20.0));
    CHECK(link_usable(3.0, -20.0));
    CHECK_THROWS_AS(link_usable(-1.0, 0.0), std::domain_error);
}

TEST_CASE("blacklisting is monotone in the fade level") {
    for (double fade = -30.0; fade <= -20.0; fade += 0.5)
        CHECK_FALSE(link_usable(fade, -20.0));
}

TEST_CASE("channel majority keeps ties") {
    CHECK_FALSE(channel_majority_usable(std::vector<std::uint8_t>{0, 0, 1}));
    CHECK(channel_majority_usable(std::vector<std::uint8_t>{1, 1, 0}));
    CHECK(channel_majority_usable(std::vector<std::uint8_t>{0, 1})); // tie -> kept
    CHECK_THROWS_AS(channel_majority_usable(std::vector<std::uint8_t>{}), std::invalid_argument);
}

namespace {

CalibrationSet make_noiseless_set(double eta, double p1_a, double p1_b, double p_s) {
    CalibrationSet cal;
    cal.p_s = p_s;
    cal.d_1 = 1.0;
    for (int i = 0; i < 12; ++i) {
        const double d = 1.0 + 0.8 * i;
        cal.entries.push_back({2 * i, 11, d, p_s - p1_a - 10.0 * eta * std::log10(d)});
        cal.entries.push_back({2 * i + 1, 18, d, p_s - p1_b - 10.0 * eta * std::log10(d)});
    }
    return cal;
}

} // namespace

TEST_CASE("fit_path_loss recovers noiseless parameters exactly") {
    const CalibrationSet cal = make_noiseless_set(2.0, 40.0, 43.0, 0.0);
    const PathLossFit fit = fit_path_loss(cal);
    CHECK(std::abs(fit.eta - 2.0) < 1e-9);
    CHECK(std::abs(fit.p1.at(11) - 40.0) < 1e-9);
    CHECK(std::abs(fit.p1.at(18) - 43.0) < 1e-9);
}

TEST_CASE("fit_path_loss under 1 dB noise recovers eta within 0.1 in most seeds") {
    int good = 0;
    for (int seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed) + 1000);
        std::normal_distribution<double> noise(0.0, 1.0);
        std::uniform_real_distribution<double> dist(1.0, 12.0);
        CalibrationSet cal;
        cal.p_s = 0.0;
        cal.d_1 = 1.0;
        for (int i = 0; i < 200; ++i) {
            const double d = dist(rng);
            cal.entries.push_back({i, 11, d, -40.0 - 20.0 * std::log10(d) + noise(rng)});
        }
        const PathLossFit fit = fit_path_loss(cal);
        if (std::abs(fit.eta - 2.0) < 0.1) ++good;
    }
    CHECK(good >= 95);
}

TEST_CASE("fit_path_loss separates per-channel reference powers") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> dist(1.0, 12.0);
    CalibrationSet cal;
    cal.p_s = 0.0;
    cal.d_1 = 1.0;
    for (int i = 0; i < 1000; ++i) {
        const double d_a = dist(rng), d_b = dist(rng);
        cal.entries.push_back({2 * i, 11, d_a, -40.0 - 20.0 * std::log10(d_a) + noise(rng)});
        cal.entries.push_back({2 * i + 1, 18, d_b, -43.0 - 20.0 * std::log10(d_b) + noise(rng)});
    }
    const PathLossFit fit = fit_path_loss(cal);
    CHECK(std::abs((fit.p1.at(18) - fit.p1.at(11)) - 3.0) < 0.1);
}

TEST_CASE("fit_path_loss rejects degenerate geometry") {
    CalibrationSet cal;
    cal.p_s = 0.0;
    cal.d_1 = 1.0;
    for (int i = 0; i < 10; ++i) cal.entries.push_back({i, 11, 3.0, -50.0});
    CHECK_THROWS_AS(fit_path_loss(cal), NumericalError);

    CalibrationSet empty;
    CHECK_THROWS_AS(fit_path_loss(empty), std::invalid_argument);

    CalibrationSet non_finite;
    non_finite.entries.push_back({0, 11, 1.0, std::nan("")});
    non_finite.entries.push_back({1, 11, 2.0, -40.0});
    CHECK_THROWS_AS(fit_path_loss(non_finite), std::domain_error);
}

namespace {

Deployment twelve_node_ring() {
    Deployment dep;
    for (int i = 0; i < 12; ++i) {
        const double angle = 2.0 * 3.14159265358979 * i / 12;
        dep.node_positions.push_back({4.0 + 3.0 * std::cos(angle), 4.0 + 3.0 * std::sin(angle)});
    }
    for (int i = 0; i < 12; ++i)
        for (int j = i + 1; j < 12; ++j) dep.links.push_back({i, j, 18});
    dep.validate();
    return dep;
}

} // namespace

TEST_CASE("classify_deployment blacklists a deep-faded link and fuses per pair") {
    const Deployment dep = twelve_node_ring();
    std::vector<double> baseline(dep.link_count());
    for (std::size_t l = 0; l < dep.link_count(); ++l)
        baseline[l] = los_power({0.0, 40.0, 1.0, 2.0}, dep.link_length(static_cast<int>(l)));
    baseline[2] -= 25.0; // deep fade well past the -20 dB threshold

    const CalibrationResult cal = classify_deployment(dep, baseline, 0.0, 1.0, -20.0);
    CHECK(cal.link_usable[2] == 0);
    CHECK(cal.fade_db[2] < -20.0);
    for (std::size_t l = 0; l < dep.link_count(); ++l)
        if (l != 2) CHECK(cal.link_usable[l] == 1);
    // single channel per pair: the pair flag mirrors the link flag
    CHECK(cal.pair_usable[static_cast<std::size_t>(dep.pair_of_link(2))] == 0);
    // the fit stays close to the generating model despite one outlier
    CHECK(std::abs(cal.eta_hat - 2.0) < 0.3);
    CHECK(std::abs(cal.p1_hat.at(18) - 40.0) < 2.0);
}

TEST_CASE("calibration files round-trip exactly") {
    const Deployment dep = twelve_node_ring();
    std::vector<double> baseline(dep.link_count());
    for (std::size_t l = 0; l < dep.link_count(); ++l)
        baseline[l] =
            los_power({0.0, 40.0, 1.0, 2.0}, dep.link_length(static_cast<int>(l))) + 0.0123 * l;
    baseline[5] -= 30.0;

    const CalibrationResult cal = classify_deployment(dep, baseline, 0.0, 1.0, -20.0);
    std::stringstream io;
    save_calibration(io, cal);
    const CalibrationResult loaded = load_calibration(io, "test", dep);

    CHECK(loaded.eta_hat == cal.eta_hat);
    CHECK(loaded.p_s == cal.p_s);
    CHECK(loaded.d_1 == cal.d_1);
    CHECK(loaded.fade_threshold_db == cal.fade_threshold_db);
    CHECK(loaded.p1_hat == cal.p1_hat);
    CHECK(loaded.baseline_db == cal.baseline_db);
    CHECK(loaded.fade_db == cal.fade_db);
    CHECK(loaded.link_usable == cal.link_usable);
    CHECK(loaded.pair_usable == cal.pair_usable);
}

TEST_CASE("load_calibration validates against the deployment") {
    const Deployment dep = twelve_node_ring();
    std::stringstream missing("[fit]\neta = 2\n");
    CHECK_THROWS_AS(load_calibration(missing, "test", dep), ConfigError);
}
