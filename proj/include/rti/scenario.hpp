#pragma once
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rti/geometry.hpp"
#include "rti/keyval.hpp"
#include "rti/noise.hpp"
#include "rti/reconstruction.hpp"

namespace rti {

enum class ObjectKind { point, circle };
enum class TrajectoryKind { absent, standstill, waypoints, random_walk };
enum class BaselineMode { mean, histogram_mode, single_frame };

struct TrajectorySpec {
    TrajectoryKind kind = TrajectoryKind::absent;
    std::vector<Vec2> waypoints; // waypoints kind: polyline, repeated when exhausted
    double speed = 0.0;          // m/s (waypoints, random_walk)
    std::vector<Vec2> points;    // standstill kind: visited in order, looping
    double dwell = 0.0;          // s per standstill point
    double wall_margin = 0.5;    // random_walk inset from the grid extent (m)
};

struct ReportSpec {
    double significance = 0.05;
    std::string fit_family = "best"; // rayleigh | gamma | lognormal | best
    std::vector<std::pair<std::string, double>> comparisons;
};

/// Full parameterization of a synthetic run. Built by parse_scenario which
/// validates every field and rejects unknown keys.
struct ScenarioConfig {
    Deployment deployment;
    Grid grid;
    double area_width = 0.0;  // m, region extent used for layout defaults
    double area_height = 0.0;

    double gamma = 0.5;
    double eta = 2.0;
    double p_s = 0.0;           // dBm
    double d_1 = 1.0;           // m
    std::map<int, double> p1;   // per channel, dB

    double snr_db = 30.0;       // LoS SNR of the weakest link; <=> sigma2
    double sigma2 = 0.0;        // linear power; 0 = derive from snr_db
    int k_samples = 512;
    double quantization_step_db = 1.0;

    double frame_interval = 0.005;      // s
    double calibration_duration = 5.0;  // s, rounded up to whole frame cycles
    double duration = 60.0;             // s of object phase

    ObjectKind object_kind = ObjectKind::point;
    double object_radius = 0.1575;

    TrajectorySpec trajectory;

    double delta_t = 0.15625; // m
    int smoothing_window = 0; // frame cycles of moving average on observations; 0 = raw

    double fade_threshold_db = -20.0;
    BaselineMode baseline_mode = BaselineMode::mean;

    double mode_threshold_scale = 0.75; // a

    ScaleMode scale_mode = ScaleMode::pixel_count;
    int partitions = 1;

    std::map<int, double> fade_injection_db; // link id -> offset

    std::uint64_t seed = 1;
    double snapshot_interval = 0.0; // s; 0 = no occupancy snapshots

    ReportSpec report;

    /// sigma2, deriving it from snr_db against the weakest link when unset.
    double noise_sigma2() const;
    NoiseModel noise_model() const;
    /// Echo of every effective scalar parameter for the report.
    std::vector<std::pair<std::string, std::string>> parameter_echo() const;
};

/// Parse + validate. Field errors name the offending [section] key.
ScenarioConfig parse_scenario(const KeyValueFile& file, const std::string& source_name);

/// Read the file, apply `--set section.key=value` overrides (bare keys are
/// resolved when unambiguous), then parse. Missing file raises IoError.
ScenarioConfig load_scenario(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides);

/// All documented (section, key) pairs, for override validation. Dynamic keys
/// are listed with their prefix form, e.g. "faults.fade_link_<id>".
std::vector<std::string> documented_keys();

/// Resolve an override key ("gamma" or "channel_model.gamma") to section+key.
/// Throws ConfigError for unknown or ambiguous names.
std::pair<std::string, std::string> resolve_config_key(const std::string& name);

} // namespace rti
