#pragma once
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "rti/geometry.hpp"

namespace rti {

/// Deviation (dB) of the estimated vacant-environment power from the
/// log-distance prediction. Strongly negative values indicate deep fade.
double fade_level(double p0_estimate, double predicted);

/// Link classification: false (blacklisted) iff fade <= p_d, p_d < 0.
bool link_usable(double fade, double p_d);

/// A tx-rx pair stays usable unless strictly more than half of its channels
/// are blacklisted. Ties keep the pair.
bool channel_majority_usable(std::span<const std::uint8_t> channel_usable);

/// One vacant-environment power estimate with its link metadata.
struct CalibrationEntry {
    int link = 0;
    int channel = 0;
    double distance = 0.0; // m
    double p0_hat = 0.0;   // dBm
};

struct CalibrationSet {
    double p_s = 0.0; // dBm
    double d_1 = 1.0; // m
    std::vector<CalibrationEntry> entries;
};

struct PathLossFit {
    double eta = 0.0;
    std::map<int, double> p1; // per channel, dB
};

/// Least-squares estimate of the shared path-loss exponent and the
/// per-channel reference loss from vacant-environment power estimates:
///   p0_hat = p_s - p1(channel) - 10 eta log10(d / d_1).
/// Throws NumericalError when the system is rank deficient (e.g. all link
/// distances equal).
PathLossFit fit_path_loss(const CalibrationSet& cal);

/// Full calibration state consumed by the per-frame pipeline.
struct CalibrationResult {
    double eta_hat = 0.0;
    std::map<int, double> p1_hat;        // per channel
    double p_s = 0.0;
    double d_1 = 1.0;
    double fade_threshold_db = -20.0;
    std::vector<double> baseline_db;     // per link: vacant RSS estimate
    std::vector<double> fade_db;         // per link
    std::vector<std::uint8_t> link_usable; // per link
    std::vector<std::uint8_t> pair_usable; // per pair (channel majority)
};

/// Batch calibration: fit the path-loss model from the per-link baselines,
/// compute fade levels, blacklist links and fuse per pair.
CalibrationResult classify_deployment(const Deployment& dep, std::span<const double> baseline_db,
                                      double p_s, double d_1, double p_d);

void save_calibration(std::ostream& out, const CalibrationResult& cal);
CalibrationResult load_calibration(std::istream& in, const std::string& source_name,
                                   const Deployment& dep);

} // namespace rti
